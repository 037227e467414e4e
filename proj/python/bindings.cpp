#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdcfa/metrics.hpp"

namespace py = pybind11;
using namespace pdcfa;

namespace {

struct Ran {
  Metrics metrics;
  std::string json;
  std::string dot;
};

AnalysisKind kind_of(const std::string& name) {
  auto k = analysis_from_name(name);
  if (!k) throw py::value_error("unknown analysis: " + name);
  return *k;
}

Ran run_one(const std::string& src, const std::string& analysis, unsigned k, std::size_t max_nodes,
            std::optional<double> timeout, const std::string& program, bool timing) {
  AnfProgram p = parse_anf(src);
  Session s(p, AllocPolicy::from_k(k));
  AnalysisOptions o;
  o.max_nodes = max_nodes;
  o.timeout_secs = timeout;
  AnalysisResult r = analyze(s, kind_of(analysis), o);
  if (!timing) r.wall_time_ms = 0;
  Ran out{measure(s, r, program, k), "", ""};
  out.json = to_json(s, r, out.metrics);
  out.dot = to_dot(s, r);
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["program"] = m.program;
  d["analysis"] = std::string(analysis_name(m.kind));
  d["k"] = m.k;
  d["gc"] = std::string(gc_mode(m.kind));
  d["control_states"] = m.control_states;
  d["edges"] = m.edges;
  d["singleton_vars"] = m.singleton_vars;
  d["variables_total"] = m.variables_total;
  d["wall_time_ms"] = m.wall_time_ms;
  d["saturated"] = m.saturated;
  return d;
}

const char* outcome_name(concrete::Outcome o) {
  switch (o) {
    case concrete::Outcome::Halt: return "halt";
    case concrete::Outcome::Stuck: return "stuck";
    case concrete::Outcome::FuelExhausted: return "fuel-exhausted";
  }
  return "?";
}

}  // namespace

PYBIND11_MODULE(_pdcfa, m) {
  m.doc() = "Pushdown control-flow analysis with abstract garbage collection";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      PyErr_SetString(parse_error.ptr(), e.what());
    } catch (const UnboundVariable& e) {
      std::string msg = std::to_string(e.span().line) + ":" + std::to_string(e.span().column) +
                        ": unbound variable " + e.name();
      PyErr_SetString(parse_error.ptr(), msg.c_str());
    }
  });

  m.def("analyses", [] {
    std::vector<std::string> names;
    for (AnalysisKind k : kAllAnalyses) names.emplace_back(analysis_name(k));
    return names;
  });

  m.def("dump_anf", [](const std::string& src) { return print_anf(parse_anf(src)); }, py::arg("src"));

  m.def(
      "run_concrete",
      [](const std::string& src, std::size_t fuel) {
        AnfProgram p = parse_anf(src);
        concrete::RunResult r = concrete::run(p, fuel);
        py::dict d;
        d["outcome"] = outcome_name(r.outcome);
        d["steps"] = r.steps();
        d["value"] = r.value ? py::object(py::str(concrete::show(*r.value, p.vars()))) : py::none();
        d["reason"] = r.reason;
        return d;
      },
      py::arg("src"), py::arg("fuel") = concrete::kDefaultFuel);

  m.def(
      "analyze",
      [](const std::string& src, const std::string& analysis, unsigned k, std::size_t max_nodes,
         std::optional<double> timeout_secs, const std::string& program, bool timing) {
        Ran r = run_one(src, analysis, k, max_nodes, timeout_secs, program, timing);
        py::dict d = metrics_dict(r.metrics);
        d["json"] = r.json;
        d["dot"] = r.dot;
        return d;
      },
      py::arg("src"), py::arg("analysis") = "pdcfa-gc", py::arg("k") = 0u,
      py::arg("max_nodes") = std::size_t{100000}, py::arg("timeout_secs") = py::none(),
      py::arg("program") = "program", py::arg("timing") = true);
}
