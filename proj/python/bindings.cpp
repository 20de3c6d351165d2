// Python module _chainscope: config-driven runs return the same JSON text as
// the CLI; graph and odometer helpers work on plain Python data.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chainscope/analysis.hpp"
#include "chainscope/config.hpp"
#include "chainscope/error.hpp"
#include "chainscope/odometer.hpp"
#include "chainscope/report.hpp"

namespace py = pybind11;
using namespace chainscope;

namespace {

std::string run(const std::string& command, const std::string& text, const std::string& source) {
  const RunConfig cfg = parse_config_text(text, source);
  Json j;
  if (command == "analyze")
    j = run_analyze(cfg).report;
  else if (command == "scan")
    j = run_scan(cfg);
  else if (command == "shadow")
    j = run_shadow(cfg);
  else if (command == "odometer")
    j = run_odometer(cfg);
  else if (command == "export")
    j = run_export(cfg);
  else
    throw DomainError("unknown command '" + command + "'");
  return dump(j);
}

py::dict graph_summary(std::size_t n, const std::vector<std::pair<BoxIndex, BoxIndex>>& edges) {
  std::vector<GraphEdge> list;
  list.reserve(edges.size());
  for (auto [u, v] : edges) list.push_back({u, v, {0}});
  const ChainGraph g = ChainGraph::from_edges(n, std::move(list));
  const ChainAnalysis a = analyze(g);
  py::dict d;
  d["sccs"] = a.sccs;
  d["recurrent"] = a.is_chain_recurrent;
  d["transitive"] = a.is_chain_transitive;
  d["k"] = a.k_epsilon ? py::cast(*a.k_epsilon) : py::none();
  d["classes"] = a.cyclic_classes ? py::cast(*a.cyclic_classes) : py::none();
  d["mixing_N"] = a.mixing ? py::cast(a.mixing->N) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_chainscope, m) {
  m.doc() = "chain-level dynamics of iterated function systems on box grids";
  m.attr("version") = kVersion;

  auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ConfigError", domain.ptr());
  auto hypothesis = py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_RuntimeError);
  py::register_exception<DiscretizationBreakdown>(m, "DiscretizationBreakdown", hypothesis.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  m.def("run", &run, py::arg("command"), py::arg("config_text"), py::arg("source") = "<config>",
        "Run a CLI subcommand on config text; returns the JSON report as a string.",
        py::call_guard<py::gil_scoped_release>());
  m.def("graph_summary", &graph_summary, py::arg("n"), py::arg("edges"),
        "SCCs, transitivity, period k, cyclic classes and mixing N of a digraph on n nodes.");
  m.def(
      "odometer_add",
      [](const std::vector<std::uint32_t>& alpha, const DigitString& x, const DigitString& y) {
        return add(Odometer(alpha, alpha.size()), x, y);
      },
      py::arg("alpha"), py::arg("x"), py::arg("y"));
  m.def(
      "odometer_step",
      [](const std::vector<std::uint32_t>& alpha, const DigitString& x) {
        return g_alpha(Odometer(alpha, alpha.size()), x);
      },
      py::arg("alpha"), py::arg("x"), "x + 1 with carries");
}
