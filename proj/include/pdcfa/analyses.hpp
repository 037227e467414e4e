#pragma once

// Analysis drivers. All analyses of one program share a Session so their
// states are interned in the same table and can be compared by id.

#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pdcfa/abstract.hpp"
#include "pdcfa/concrete.hpp"
#include "pdcfa/gc.hpp"
#include "pdcfa/pushdown.hpp"

namespace pdcfa {

enum class AnalysisKind : std::uint8_t {
  Plain,          // finite-state, continuations in a store
  PlainGc,        // the same with abstract GC
  Pdcfa,          // pushdown, per-state stores
  PdcfaGc,        // pushdown with precise GC
  PdcfaGcApprox,  // pushdown with cached-root approximate GC
  PdcfaWidened,   // pushdown, single global store
};

inline constexpr AnalysisKind kAllAnalyses[] = {
    AnalysisKind::Plain,   AnalysisKind::PlainGc,       AnalysisKind::Pdcfa,
    AnalysisKind::PdcfaGc, AnalysisKind::PdcfaGcApprox, AnalysisKind::PdcfaWidened};

std::string_view analysis_name(AnalysisKind k);
std::optional<AnalysisKind> analysis_from_name(std::string_view name);
bool uses_gc(AnalysisKind k);
bool is_pushdown(AnalysisKind k);

class Session {
 public:
  Session(const AnfProgram& prog, AllocPolicy policy);

  const AnfProgram& program() const { return prog_; }
  AllocPolicy policy() const { return machine_.policy(); }
  Interner& interner() { return in_; }
  const Interner& interner() const { return in_; }
  AbstractMachine& machine() { return machine_; }
  const AbstractMachine& machine() const { return machine_; }
  const std::string& program_hash() const { return hash_; }

 private:
  const AnfProgram& prog_;
  Interner in_;
  AbstractMachine machine_;
  std::string hash_;
};

struct AnalysisOptions {
  std::size_t max_nodes = 100000;
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  std::optional<double> timeout_secs;
};

struct ResultNode {
  StateId state;
  RootSetId roots{};  // precise: stack root A; approx: final cached R
  KAddr kaddr{};      // finite baselines
};

struct ResultEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  StackAct<FrameId> act;
  RootSetId frame_roots{};          // precise: the pusher's root set
  std::optional<RootSetId> guard;   // approx: cached roots when emitted
};

using KontStore = std::unordered_map<KAddr, std::vector<std::pair<FrameId, KAddr>>, KAddrHash>;

struct AnalysisResult {
  AnalysisKind kind = AnalysisKind::Plain;
  AllocPolicy policy;
  std::string program_hash;

  std::vector<ResultNode> nodes;  // nodes[0] is the root
  std::vector<ResultEdge> edges;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ecg;  // pushdown analyses
  std::optional<StoreId> global_store;                        // widened
  KontStore kstore;                                           // finite baselines
  std::optional<StoreId> bindings;  // join of every binding made by a step (set by analyze)

  bool saturated = true;
  std::size_t stale_edges = 0;  // approx: edges whose guard is below the final R(src)
  std::size_t rounds = 1;       // widened: store-growth rounds
  double wall_time_ms = 0;
};

/// Runs one analysis and records the bindings its transitions made.
AnalysisResult analyze(Session& s, AnalysisKind kind, const AnalysisOptions& opts = {});

AnalysisResult analyze_pdcfa(Session& s, const AnalysisOptions& opts = {});
AnalysisResult analyze_pdcfa_widened(Session& s, const AnalysisOptions& opts = {});
AnalysisResult analyze_gc_precise(Session& s, const AnalysisOptions& opts = {});
AnalysisResult analyze_gc_approx(Session& s, const AnalysisOptions& opts = {});
AnalysisResult analyze_finite(Session& s, bool gc, const AnalysisOptions& opts = {});

/// One transition of the finite baseline from (q, k). Pushes join into the
/// continuation store; `grew` lists continuation addresses whose entry
/// changed. With gc, the store is collected using the frames reachable
/// from k.
struct FiniteSucc {
  StateId state;
  KAddr kaddr;
  StackAct<FrameId> act;
};
std::vector<FiniteSucc> astep_finite(AbstractMachine& m, StateId q, const KAddr& k,
                                     KontStore& kstore, bool gc, std::vector<KAddr>* grew = nullptr,
                                     std::vector<KAddr>* read = nullptr);

/// Frames reachable from k through the continuation store.
RootSet kont_roots(const Interner& in, const KontStore& kstore, const KAddr& k,
                   std::vector<KAddr>* visited = nullptr);

/// From-scratch least fixpoint of the root-cache equations over the push
/// edges and summary pairs of a result.
using RootCache = std::vector<RootSetId>;  // indexed like result.nodes
RootCache compute_root_cache(Session& s, const AnalysisResult& r);
RootCache recorded_root_cache(const AnalysisResult& r);

/// Soundness against a concrete run: every configuration's abstraction
/// (collected, for GC analyses) must be covered by a reached node whose
/// stack is realizable in the result. Returns the trace indices that fail.
std::vector<std::size_t> check_soundness(Session& s, const AnalysisResult& r,
                                         const AbstractTrace& trace);

/// Nodes of `inner` (by index) with no node of `outer` at the same
/// expression, environment and context whose store is at least as large.
/// For a widened `outer` its global store stands in for every node store.
std::vector<std::size_t> uncovered_nodes(const Session& s, const AnalysisResult& inner,
                                         const AnalysisResult& outer);

}  // namespace pdcfa
