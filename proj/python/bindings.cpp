#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wholder/checks.hpp"
#include "wholder/error.hpp"
#include "wholder/operators.hpp"
#include "wholder/suite.hpp"

namespace py = pybind11;
using namespace wholder;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string list_cases_json() {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : list_cases()) {
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : c.params) ps.push_back(p.to_json());
    j.push_back({{"id", c.id}, {"summary", c.summary}, {"expectation", expectation_name(c.expectation)}, {"params", ps}});
  }
  return j.dump();
}

std::string default_case_json(const std::string& id, int m, double n, double gamma) {
  return default_case(id, SpaceParams(m, n, gamma)).to_json().dump();
}

std::pair<std::string, double> run_case_json(const std::string& case_json, unsigned threads) {
  const auto j = nlohmann::json::parse(case_json);
  const CheckCase base = default_case(j.at("id").get<std::string>(), SpaceParams::from_json(j.at("params")));
  set_thread_budget(threads);
  VerificationReport r;
  {
    py::gil_scoped_release release;
    r = run_check(CheckCase::from_json(j, base));
  }
  return {r.to_json().dump(), r.runtime};
}

std::string gauge_json(const std::string& expr_json, int m, double n, double gamma, bool full) {
  const Expression u = Expression::from_json(nlohmann::json::parse(expr_json));
  const SpaceParams p(m, n, gamma);
  return (full ? gauge_full(u, p) : gauge_tilde(u, p)).to_json().dump();
}

std::vector<double> poisson_values(const std::string& boundary_json, const std::vector<std::vector<double>>& points,
                                   double t) {
  const auto v = BoundaryFunction::from_json(nlohmann::json::parse(boundary_json));
  const PoissonExtension w(v, std::nullopt);
  std::vector<double> out;
  for (const auto& x : points) out.push_back(w.value(x, t));
  return out;
}

double evaluate_expression(const std::string& expr_json, const std::vector<double>& x, double t) {
  return Expression::from_json(nlohmann::json::parse(expr_json)).evaluate(x, t);
}

std::string plot_csv(const std::string& report_json) { return emit_plot_data(nlohmann::json::parse(report_json)); }

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Weighted Hoelder space checks";

  py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<UnknownCheckError>(mod, "UnknownCheckError", PyExc_KeyError);
  py::register_exception<PreconditionError>(mod, "PreconditionError", PyExc_ValueError);
  py::register_exception<NoLimitError>(mod, "NoLimitError", PyExc_ArithmeticError);
  py::register_exception<TooFewRungsError>(mod, "TooFewRungsError", PyExc_ValueError);

  mod.def("list_cases_json", &list_cases_json);
  mod.def("default_case_json", &default_case_json, py::arg("id"), py::arg("m"), py::arg("n"), py::arg("gamma"));
  mod.def("run_case_json", &run_case_json, py::arg("case_json"), py::arg("threads") = 1);
  mod.def("iterated_log", &iterated_log, py::arg("k"), py::arg("x"));
  mod.def("gauge_json", &gauge_json, py::arg("expr_json"), py::arg("m"), py::arg("n"), py::arg("gamma"),
          py::arg("full") = false);
  mod.def("poisson_values", &poisson_values, py::arg("boundary_json"), py::arg("points"), py::arg("t") = 0.0);
  mod.def("evaluate_expression", &evaluate_expression, py::arg("expr_json"), py::arg("x"), py::arg("t") = 0.0);
  mod.def("plot_csv", &plot_csv, py::arg("report_json"));
  mod.def("recompute_verdict", [](const std::string& r) { return recompute_verdict(nlohmann::json::parse(r)); });
}
