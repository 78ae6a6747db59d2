import math

import pytest

import wholder


def test_list_cases():
    ids = {c["id"] for c in wholder.list_cases()}
    assert {"main-estimate", "counterexample", "trace-extension", "interpolation"} <= ids


def test_counterexample_slope():
    case = wholder.default_case("counterexample", 2, 0.5, 0.5)
    report, seconds = wholder.run_check(case)
    assert report["verdict"]
    assert seconds >= 0.0
    assert wholder.recompute_verdict(report)
    slopes = [a["measured"] for a in report["assertions"] if a["name"].endswith("mixed term slope")]
    assert slopes and abs(slopes[0] - 1.625) < 0.15
    csv = wholder.plot_csv(report)
    assert csv.startswith("scale,term,value,slope\n")


def test_case_overrides():
    report, _ = wholder.run_check(
        {"id": "k-difference", "params": {"m": 2, "n": 1, "gamma": 0.25}, "window": {"levels": 12}}
    )
    assert report["verdict"]


def test_errors_map_to_python():
    with pytest.raises(KeyError):
        wholder.default_case("no-such-check", 2, 0.5, 0.5)
    with pytest.raises(ValueError):
        wholder.run_check({"id": "counterexample", "params": {"m": 2, "n": 0.5, "gamma": 0.5}, "ladder": {"kind": "window", "scales": [1]}})


def test_iterated_log():
    for x in (0.1, 0.5, 2.0):
        assert wholder.iterated_log(1, x) == pytest.approx(x * math.log(x) - x, rel=1e-14)
    assert wholder.iterated_log(0, 2.0) == pytest.approx(math.log(2.0))


def test_gauge_power():
    expr = {"kind": "scale", "factor": 5.0, "children": [{"kind": "boundary-power", "exponent": 1.5}]}
    assert wholder.evaluate(expr, [0.0, 0.25]) == pytest.approx(0.625)
    g = wholder.gauge(expr, 2, 0.5, 0.5)
    assert g["a"] == pytest.approx(3.75, rel=1e-10)
    assert g["b"] == pytest.approx(4.0 / 3.0)
    assert g["branch"] == "power"


def test_poisson_cosine():
    v = {"kind": "windowed-cosine", "xi": 1.0, "r_in": 40.0, "r_out": 60.0}
    vals = wholder.poisson_extension(v, [[0.3, 0.2], [0.3, 0.4]])
    for val, xn in zip(vals, (0.2, 0.4)):
        assert val == pytest.approx(math.cos(0.3) * math.exp(-xn), rel=1e-3)
