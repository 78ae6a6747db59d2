"""Python access to the weighted Hoelder space checks."""

import json

from . import _core
from ._core import (
    ConfigError,
    Error,
    NoLimitError,
    PreconditionError,
    TooFewRungsError,
    UnknownCheckError,
    iterated_log,
)

__all__ = [
    "ConfigError",
    "Error",
    "NoLimitError",
    "PreconditionError",
    "TooFewRungsError",
    "UnknownCheckError",
    "default_case",
    "evaluate",
    "gauge",
    "iterated_log",
    "list_cases",
    "plot_csv",
    "poisson_extension",
    "recompute_verdict",
    "run_check",
]


def list_cases():
    return json.loads(_core.list_cases_json())


def default_case(check_id, m, n, gamma):
    return json.loads(_core.default_case_json(check_id, m, n, gamma))


def run_check(case, threads=1):
    """Runs a case dict on top of its default case. Returns (report, seconds)."""
    text, seconds = _core.run_case_json(json.dumps(case), threads)
    return json.loads(text), seconds


def gauge(expr, m, n, gamma, full=False):
    return json.loads(_core.gauge_json(json.dumps(expr), m, n, gamma, full))


def evaluate(expr, x, t=0.0):
    return _core.evaluate_expression(json.dumps(expr), list(x), t)


def poisson_extension(boundary, points, t=0.0):
    return _core.poisson_values(json.dumps(boundary), [list(p) for p in points], t)


def plot_csv(report):
    return _core.plot_csv(json.dumps(report))


def recompute_verdict(report):
    return _core.recompute_verdict(json.dumps(report))
