#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdcfa/metrics.hpp"

using namespace pdcfa;

namespace {

struct Options {
  std::string file;
  std::string analysis = "pdcfa-gc";
  unsigned k = 0;
  std::size_t fuel = concrete::kDefaultFuel;
  std::string format = "summary";
  std::string out;
  std::optional<double> timeout;
  std::size_t max_nodes = 100000;
  bool dump_anf = false;
  bool no_timing = false;
};

std::string stem(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

std::string outcome_name(concrete::Outcome o) {
  switch (o) {
    case concrete::Outcome::Halt: return "halt";
    case concrete::Outcome::Stuck: return "stuck";
    case concrete::Outcome::FuelExhausted: return "fuel-exhausted";
  }
  return "?";
}

std::string run_concrete(const AnfProgram& p, const Options& o) {
  concrete::RunResult r = concrete::run(p, o.fuel);
  std::string value = r.value ? concrete::show(*r.value, p.vars()) : "";
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["program"] = stem(o.file);
    j["analysis"] = "concrete";
    j["outcome"] = outcome_name(r.outcome);
    j["steps"] = r.steps();
    if (r.value) j["value"] = value;
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j.dump(2) + "\n";
  }
  std::string s = stem(o.file) + ": " + outcome_name(r.outcome) + " after " +
                  std::to_string(r.steps()) + " steps";
  if (r.value) s += ", value " + value;
  if (!r.reason.empty()) s += " (" + r.reason + ")";
  return s + "\n";
}

std::string grid(const std::vector<Metrics>& ms) {
  auto count = [&](AnalysisKind k) {
    for (const auto& m : ms)
      if (m.kind == k) return std::to_string(m.control_states) + (m.saturated ? "" : "+");
    return std::string("-");
  };
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "\n%-10s %10s %10s\n%-10s %10s %10s\n%-10s %10s %10s\n%-10s %10s %10s\n", "",
                "finite", "pushdown", "no gc", count(AnalysisKind::Plain).c_str(),
                count(AnalysisKind::Pdcfa).c_str(), "gc", count(AnalysisKind::PlainGc).c_str(),
                count(AnalysisKind::PdcfaGc).c_str(), "approx", "",
                count(AnalysisKind::PdcfaGcApprox).c_str());
  std::string s = buf;
  s += "widened: " + count(AnalysisKind::PdcfaWidened) + "\n";
  return s;
}

std::string run_abstract(const AnfProgram& p, const Options& o) {
  std::vector<AnalysisKind> kinds;
  if (o.analysis == "all")
    kinds.assign(std::begin(kAllAnalyses), std::end(kAllAnalyses));
  else
    kinds.push_back(*analysis_from_name(o.analysis));

  Session s(p, AllocPolicy::from_k(o.k));
  AnalysisOptions opts;
  opts.max_nodes = o.max_nodes;
  opts.timeout_secs = o.timeout;

  std::string text;
  std::vector<Metrics> ms;
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  if (o.format == "summary") text = summary_header() + "\n";
  for (AnalysisKind kind : kinds) {
    AnalysisResult r = analyze(s, kind, opts);
    if (o.no_timing) r.wall_time_ms = 0;
    Metrics m = measure(s, r, stem(o.file), o.k);
    ms.push_back(m);
    if (o.format == "summary")
      text += summary_line(m) + "\n";
    else if (o.format == "dot")
      text += to_dot(s, r);
    else if (kinds.size() == 1)
      text = to_json(s, r, m) + "\n";
    else
      all.push_back(nlohmann::ordered_json::parse(to_json(s, r, m)));
  }
  if (o.format == "summary" && kinds.size() > 1) text += grid(ms);
  if (o.format == "json" && kinds.size() > 1) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["program"] = stem(o.file);
    j["k"] = o.k;
    j["results"] = std::move(all);
    text = j.dump(2) + "\n";
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pushdown control-flow analysis with abstract garbage collection"};
  app.require_subcommand(1);
  Options o;
  CLI::App* run = app.add_subcommand("run", "Analyze one program");
  run->add_option("file", o.file, "Scheme source file")->required()->check(CLI::ExistingFile);
  run->add_option("--analysis", o.analysis, "Analysis to run")
      ->check(CLI::IsMember({"concrete", "plain", "plain-gc", "pdcfa", "pdcfa-gc",
                             "pdcfa-gc-approx", "pdcfa-widened", "all"}));
  run->add_option("--k", o.k, "Context depth: 0 is monovariant, 1 is 1CFA");
  run->add_option("--fuel", o.fuel, "Step budget for the concrete machine");
  run->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"summary", "json", "dot"}));
  run->add_option("--out", o.out, "Write output here instead of stdout");
  run->add_option("--timeout-secs", o.timeout, "Abort an analysis after this long")
      ->check(CLI::PositiveNumber);
  run->add_option("--max-nodes", o.max_nodes, "Abort an analysis past this many nodes");
  run->add_flag("--dump-anf", o.dump_anf, "Print the normalized program first");
  run->add_flag("--no-timing", o.no_timing, "Report wall time as 0 for reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 2;
  }

  std::string text;
  try {
    std::ifstream in(o.file);
    std::stringstream ss;
    ss << in.rdbuf();
    AnfProgram p = parse_anf(ss.str());
    if (o.dump_anf) text += print_anf(p) + "\n";
    text += o.analysis == "concrete" ? run_concrete(p, o) : run_abstract(p, o);
  } catch (const ParseError& e) {
    std::cerr << o.file << ":" << e.what() << "\n";
    return 1;
  } catch (const UnboundVariable& e) {
    std::cerr << o.file << ":" << e.span().line << ":" << e.span().column << ": unbound variable "
              << e.name() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << o.out << "\n";
      return 1;
    }
    f << text;
  }
  return 0;
}
