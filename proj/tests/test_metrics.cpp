#include "doctest.h"
#include "json.hpp"
#include "pdcfa/metrics.hpp"
#include "util.hpp"

using namespace pdcfa;
using nlohmann::json;

TEST_SUITE("metrics") {
  TEST_CASE("identity program has only singletons") {
    AnfProgram p = parse_anf("((lambda (x) x) (lambda (y) y))");
    Session s(p, AllocPolicy::mono());
    for (AnalysisKind k : kAllAnalyses) {
      AnalysisResult r = analyze(s, k);
      Metrics m = measure(s, r, "id", 0);
      CHECK(m.variables_total == 2);
      CHECK(m.singleton_vars == 1);  // y is never bound
    }
  }

  TEST_CASE("a constant has no variables") {
    AnfProgram p = parse_anf("1");
    Session s(p, AllocPolicy::mono());
    Metrics m = measure(s, analyze(s, AnalysisKind::PdcfaGc), "one", 0);
    CHECK(m.variables_total == 0);
    CHECK(m.singleton_vars == 0);
    CHECK(m.control_states == 1);
  }

  TEST_CASE("merging shows up in fig1") {
    AnfProgram p = parse_anf(bench("fig1"));
    Session s(p, AllocPolicy::mono());
    SingletonTable t = singleton_count(s, analyze(s, AnalysisKind::Plain));
    bool merged = false;
    for (const auto& row : t.rows) merged |= row.values > 1;
    CHECK(merged);
    CHECK(t.singletons < t.rows.size());
  }

  TEST_CASE("json carries the graph") {
    AnfProgram p = parse_anf(bench("eta"));
    Session s(p, AllocPolicy::mono());
    for (AnalysisKind k : kAllAnalyses) {
      AnalysisResult r = analyze(s, k);
      Metrics m = measure(s, r, "eta", 0);
      json j = json::parse(to_json(s, r, m));
      CHECK(j["schema"] == 1);
      CHECK(j["program"] == "eta");
      CHECK(j["analysis"] == analysis_name(k));
      CHECK(j["gc"] == gc_mode(k));
      CHECK(j["control_states"] == m.control_states);
      CHECK(j["nodes"].size() == m.control_states);
      CHECK(j["edges_list"].size() == m.edges);
      CHECK(j["flow_set_sizes"].size() == m.variables_total);
      json small = json::parse(to_json(m));
      CHECK(small["edges"] == m.edges);
      CHECK_FALSE(small.contains("nodes"));
    }
  }

  TEST_CASE("dot has one line per node and edge") {
    AnfProgram p = parse_anf(bench("mj09"));
    Session s(p, AllocPolicy::mono());
    AnalysisResult r = analyze(s, AnalysisKind::PdcfaGcApprox);
    Metrics m = measure(s, r, "mj09", 0);
    std::string dot = to_dot(s, r);
    std::size_t arrows = 0, pos = 0;
    while ((pos = dot.find(" -> ", pos)) != std::string::npos) ++arrows, ++pos;
    CHECK(arrows == m.edges);
    CHECK(dot.rfind("digraph \"pdcfa-gc-approx\"", 0) == 0);
  }

  TEST_CASE("output is deterministic") {
    AnfProgram p = parse_anf(bench("blur"));
    std::string first;
    for (int round = 0; round < 2; ++round) {
      Session s(p, AllocPolicy::one_cfa());
      std::string out;
      for (AnalysisKind k : kAllAnalyses) {
        AnalysisResult r = analyze(s, k);
        r.wall_time_ms = 0;
        out += to_json(s, r, measure(s, r, "blur", 1)) + to_dot(s, r);
      }
      if (round == 0)
        first = out;
      else
        CHECK(out == first);
    }
  }

  TEST_CASE("summary line") {
    Metrics m;
    m.program = "fig1";
    m.kind = AnalysisKind::PdcfaGc;
    m.control_states = 78;
    m.singleton_vars = 3;
    m.variables_total = 9;
    std::string line = summary_line(m);
    CHECK(line.find("pdcfa-gc") != std::string::npos);
    CHECK(line.find("precise") != std::string::npos);
    CHECK(line.find("3/9") != std::string::npos);
    CHECK(summary_header().find("singletons") != std::string::npos);
  }

  TEST_CASE("corpus lists the bundled programs") {
    auto corpus = benchmark_corpus(PDCFA_BENCH_DIR);
    CHECK(corpus.size() == 8);
    for (const auto& b : corpus) CHECK_FALSE(slurp(b.path).empty());
  }
}
