// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "pdcfa/metrics.hpp"
#include "util.hpp"

using namespace pdcfa;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kOracles = 200;
constexpr int kActionStrings = 1000;
constexpr double kOracleBudgetSecs = 30;
constexpr double kFig1BudgetSecs = 5;
constexpr double kFig1MinRatio = 4;
constexpr std::size_t kBlowupStates = 10000;
constexpr double kBlowupTimeoutSecs = 60;
constexpr std::size_t kFusedMaxStates = 500;
constexpr double kDominanceMax = 0.8;
constexpr int kTruncations = 100;
constexpr std::size_t kSuiteMaxNodes = 100000;

int failures = 0;

void report(int n, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %2d %-24s %s\n", ok ? "PASS" : "FAIL", n, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Bench {
  std::string name;
  AnfProgram prog;
  concrete::RunResult run;
};

// One analysis of one benchmark at one k, with everything the criteria read.
struct Row {
  std::string bench;
  unsigned k;
  AnalysisKind kind;
  Metrics m;
  std::size_t unsound = 0;
  std::string serialized;
};

struct Pairing {
  std::size_t precise_uncovered = 0;
  std::size_t pdcfa_uncovered = 0;
};

struct Suite {
  std::vector<Row> rows;
  std::map<std::pair<std::string, unsigned>, Pairing> pairs;
};

Suite run_suite(const std::vector<Bench>& benches) {
  Suite out;
  AnalysisOptions opts;
  opts.max_nodes = kSuiteMaxNodes;
  for (const Bench& b : benches) {
    for (unsigned k : {0u, 1u}) {
      Session s(b.prog, AllocPolicy::from_k(k));
      bool halts = b.run.outcome == concrete::Outcome::Halt;
      AbstractTrace trace;
      if (halts) trace = alpha_trace(s.machine(), b.run);
      std::map<AnalysisKind, AnalysisResult> rs;
      for (AnalysisKind kind : kAllAnalyses) {
        AnalysisResult r = analyze(s, kind, opts);
        r.wall_time_ms = 0;
        Row row{b.name, k, kind, measure(s, r, b.name, k)};
        if (halts) row.unsound = check_soundness(s, r, trace).size();
        row.serialized = to_json(s, r, row.m) + to_dot(s, r);
        out.rows.push_back(std::move(row));
        rs.emplace(kind, std::move(r));
      }
      Pairing& p = out.pairs[{b.name, k}];
      p.precise_uncovered =
          uncovered_nodes(s, rs.at(AnalysisKind::PdcfaGc), rs.at(AnalysisKind::PdcfaGcApprox)).size();
      p.pdcfa_uncovered =
          uncovered_nodes(s, rs.at(AnalysisKind::Pdcfa), rs.at(AnalysisKind::PdcfaWidened)).size();
    }
  }
  return out;
}

const Row& find(const Suite& s, const std::string& bench, unsigned k, AnalysisKind kind) {
  for (const Row& r : s.rows)
    if (r.bench == bench && r.k == k && r.kind == kind) return r;
  throw std::runtime_error("missing row");
}

void oracle_equivalence() {
  auto t0 = Clock::now();
  std::mt19937 rng(20260101);
  std::uniform_int_distribution<int> states(1, 6), frames(1, 3), rules(0, 10);
  int compared = 0, mismatches = 0;
  for (int i = 0; i < kOracles; ++i) {
    RuleSystem sys = random_system(rng, states(rng), frames(rng), rules(rng));
    auto o = sys.oracle();
    auto naive = compact_naive(o, 8, 10000);
    if (!naive.saturated) continue;
    ++compared;
    auto w = compact_worklist(o);
    if (!w.saturated || node_set(w.graph) != node_set(naive.graph) ||
        edge_set(w.graph) != edge_set(naive.graph) || pair_set(w.ecg) != pair_set(naive.ecg))
      ++mismatches;
  }
  double t = secs_since(t0);
  report(1, "oracle-equivalence", mismatches == 0 && compared > 0 && t < kOracleBudgetSecs,
         fmt("%d oracles, %d saturated and compared, %d mismatches, %.2f s", kOracles, compared,
             mismatches, t));
}

void action_algebra() {
  using A = StackAct<int>;
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(0, 20), kind(0, 2), frame(0, 2);
  auto gen = [&] {
    std::vector<A> s(len(rng));
    for (A& a : s) {
      int k = kind(rng);
      a = k == 0 ? A::push(frame(rng)) : k == 1 ? A::pop(frame(rng)) : A::unch();
    }
    return s;
  };
  int bad = 0;
  for (int i = 0; i < kActionStrings; ++i) {
    auto s = gen(), t = gen();
    auto ns = net(s);
    if (net(ns) != ns) ++bad;
    auto st = s;
    st.insert(st.end(), t.begin(), t.end());
    auto joined = ns;
    auto nt = net(t);
    joined.insert(joined.end(), nt.begin(), nt.end());
    if (net(st) != net(joined)) ++bad;
    bool all_push = std::all_of(ns.begin(), ns.end(), [](const A& a) { return a.is_push(); });
    auto stack = stackify(s);
    if (stack.has_value() != all_push) ++bad;
    if (stack) {
      std::vector<int> want;
      for (auto it = ns.rbegin(); it != ns.rend(); ++it) want.push_back(it->frame);
      if (*stack != want) ++bad;
    }
  }
  report(2, "stack-action-algebra", bad == 0,
         fmt("%d strings, %d failures", kActionStrings, bad));
}

void soundness(const Suite& s) {
  std::size_t violations = 0, checked = 0;
  std::string where;
  for (const Row& r : s.rows) {
    ++checked;
    if (r.unsound) {
      violations += r.unsound;
      where += " " + r.bench + "/" + std::string(analysis_name(r.kind)) + "/k" + std::to_string(r.k);
    }
  }
  report(3, "soundness", violations == 0,
         fmt("%zu analysis runs, %zu violations%s", checked, violations, where.c_str()));
}

void state_ordering(const Bench& fig1) {
  auto t0 = Clock::now();
  Session s(fig1.prog, AllocPolicy::mono());
  auto count = [&](AnalysisKind k) { return analyze(s, k).nodes.size(); };
  std::size_t plain = count(AnalysisKind::Plain), gc = count(AnalysisKind::PlainGc),
              pd = count(AnalysisKind::Pdcfa), fused = count(AnalysisKind::PdcfaGc);
  double t = secs_since(t0);
  double ratio = static_cast<double>(plain) / static_cast<double>(fused);
  bool ok = fused < gc && gc < pd && pd < plain && ratio >= kFig1MinRatio && t < kFig1BudgetSecs;
  report(4, "state-ordering", ok,
         fmt("fused %zu < gc-only %zu < pushdown %zu < plain %zu, ratio %.2f, %.2f s", fused, gc, pd,
             plain, ratio, t));
}

void blowup(const std::vector<Bench>& benches) {
  bool ok = true;
  std::string detail;
  for (const Bench& b : benches) {
    if (b.name != "kcfa2" && b.name != "kcfa3") continue;
    Session s(b.prog, AllocPolicy::one_cfa());
    AnalysisOptions o;
    o.max_nodes = kBlowupStates + 1;
    o.timeout_secs = kBlowupTimeoutSecs;
    AnalysisResult plain = analyze(s, AnalysisKind::Plain, o);
    AnalysisResult fused = analyze(s, AnalysisKind::PdcfaGc);
    bool blew = plain.nodes.size() > kBlowupStates || !plain.saturated;
    bool small = fused.saturated && fused.nodes.size() < kFusedMaxStates;
    ok = ok && blew && small;
    detail += fmt("%s plain %zu%s fused %zu; ", b.name.c_str(), plain.nodes.size(),
                  plain.saturated ? "" : "+", fused.nodes.size());
  }
  report(5, "blowup", ok, detail + fmt("need plain > %zu and fused < %zu", kBlowupStates, kFusedMaxStates));
}

void dominance(const Suite& s, const std::vector<Bench>& benches) {
  int pairs = 0, over_max = 0, over_min = 0;
  for (const Bench& b : benches) {
    if (b.name == "fig1") continue;
    for (unsigned k : {0u, 1u}) {
      std::size_t fused = find(s, b.name, k, AnalysisKind::PdcfaGc).m.singleton_vars;
      std::size_t pd = find(s, b.name, k, AnalysisKind::Pdcfa).m.singleton_vars;
      std::size_t gc = find(s, b.name, k, AnalysisKind::PlainGc).m.singleton_vars;
      ++pairs;
      if (fused >= std::max(pd, gc)) ++over_max;
      if (fused >= std::min(pd, gc)) ++over_min;
    }
  }
  bool ok = over_min == pairs && over_max >= kDominanceMax * pairs;
  report(6, "precision-dominance", ok,
         fmt("%d pairs, fused >= max on %d, >= min on %d", pairs, over_max, over_min));
}

void containment(int n, const char* name, const Suite& s, bool precise) {
  std::size_t bad = 0;
  std::string where;
  for (const auto& [key, p] : s.pairs) {
    std::size_t u = precise ? p.precise_uncovered : p.pdcfa_uncovered;
    bad += u;
    if (u) where += " " + key.first + "/k" + std::to_string(key.second);
  }
  report(n, name, bad == 0,
         fmt("%zu benchmark pairs, %zu uncovered nodes%s", s.pairs.size(), bad, where.c_str()));
}

void root_cache(const std::vector<Bench>& benches) {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<std::size_t> pick(0, benches.size() - 1), steps(1, 3000);
  std::uniform_int_distribution<unsigned> kpick(0, 1);
  int mismatches = 0, truncated = 0;
  for (int i = 0; i < kTruncations; ++i) {
    const Bench& b = benches[pick(rng)];
    Session s(b.prog, AllocPolicy::from_k(kpick(rng)));
    AnalysisOptions o;
    o.max_steps = steps(rng);
    AnalysisResult r = analyze(s, AnalysisKind::PdcfaGcApprox, o);
    if (!r.saturated) ++truncated;
    if (recorded_root_cache(r) != compute_root_cache(s, r)) ++mismatches;
  }
  report(9, "root-cache", mismatches == 0,
         fmt("%d prefixes (%d truncated), %d mismatches", kTruncations, truncated, mismatches));
}

void determinism(const Suite& a, const Suite& b) {
  std::size_t differ = 0, bytes = 0;
  bool same_shape = a.rows.size() == b.rows.size();
  for (std::size_t i = 0; same_shape && i < a.rows.size(); ++i) {
    bytes += a.rows[i].serialized.size();
    if (a.rows[i].serialized != b.rows[i].serialized) ++differ;
  }
  report(10, "determinism", same_shape && differ == 0,
         fmt("%zu outputs, %zu bytes, %zu differ", a.rows.size(), bytes, differ));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance BENCH_DIR\n");
    return 2;
  }
  std::vector<BenchmarkEntry> corpus = benchmark_corpus(argv[1]);
  std::vector<Bench> benches;
  benches.reserve(corpus.size());
  for (const BenchmarkEntry& e : corpus) {
    Bench& b = benches.emplace_back(Bench{e.name, parse_anf(slurp(e.path)), {}});
    b.run = concrete::run(b.prog, e.fuel, true);
  }

  oracle_equivalence();
  action_algebra();
  auto t0 = Clock::now();
  Suite first = run_suite(benches);
  std::printf("     full suite: %zu runs in %.1f s\n", first.rows.size(), secs_since(t0));
  soundness(first);
  state_ordering(benches.front());
  blowup(benches);
  dominance(first, benches);
  containment(7, "approx-gc-soundness", first, true);
  containment(8, "widened-containment", first, false);
  root_cache(benches);
  determinism(first, run_suite(benches));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
