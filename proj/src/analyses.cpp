#include "pdcfa/analyses.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>

namespace pdcfa {

namespace {

struct OPNode {
  StateId state;
  RootSetId roots;
  friend bool operator==(const OPNode&, const OPNode&) = default;
};

struct GcFrame {
  FrameId frame;
  RootSetId roots;
  friend bool operator==(const GcFrame&, const GcFrame&) = default;
};

}  // namespace
}  // namespace pdcfa

template <>
struct std::hash<pdcfa::OPNode> {
  std::size_t operator()(const pdcfa::OPNode& n) const {
    std::size_t s = n.state.value;
    pdcfa::hash_combine(s, n.roots.value);
    return s;
  }
};

template <>
struct std::hash<pdcfa::GcFrame> {
  std::size_t operator()(const pdcfa::GcFrame& f) const {
    std::size_t s = f.frame.value;
    pdcfa::hash_combine(s, f.roots.value);
    return s;
  }
};

namespace pdcfa {

std::string_view analysis_name(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::Plain: return "plain";
    case AnalysisKind::PlainGc: return "plain-gc";
    case AnalysisKind::Pdcfa: return "pdcfa";
    case AnalysisKind::PdcfaGc: return "pdcfa-gc";
    case AnalysisKind::PdcfaGcApprox: return "pdcfa-gc-approx";
    case AnalysisKind::PdcfaWidened: return "pdcfa-widened";
  }
  return "?";
}

std::optional<AnalysisKind> analysis_from_name(std::string_view name) {
  for (auto k : kAllAnalyses)
    if (analysis_name(k) == name) return k;
  return std::nullopt;
}

bool uses_gc(AnalysisKind k) {
  return k == AnalysisKind::PlainGc || k == AnalysisKind::PdcfaGc ||
         k == AnalysisKind::PdcfaGcApprox;
}

bool is_pushdown(AnalysisKind k) { return k != AnalysisKind::Plain && k != AnalysisKind::PlainGc; }

namespace {

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

using Clock = std::chrono::steady_clock;

EngineLimits limits_of(const AnalysisOptions& o, Clock::time_point start) {
  EngineLimits l;
  l.max_nodes = o.max_nodes;
  l.max_steps = o.max_steps;
  if (o.timeout_secs)
    l.deadline = start + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(*o.timeout_secs));
  return l;
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AnalysisResult blank(Session& s, AnalysisKind kind) {
  AnalysisResult r;
  r.kind = kind;
  r.policy = s.policy();
  r.program_hash = s.program_hash();
  return r;
}

/// Copies an engine's graph and closure graph into a result, mapping nodes
/// and frames through the given projections.
template <class Q, class F, class NodeFn, class EdgeFn>
void export_engine(const EcgEngine<Q, F>& engine, AnalysisResult& r, NodeFn node_of,
                   EdgeFn edge_of) {
  std::unordered_map<Q, std::uint32_t> index;
  for (const Q& q : engine.graph().nodes()) {
    index.emplace(q, static_cast<std::uint32_t>(r.nodes.size()));
    r.nodes.push_back(node_of(q));
  }
  for (const auto& e : engine.graph().edges()) {
    ResultEdge re = edge_of(e);
    re.src = index.at(e.src);
    re.dst = index.at(e.dst);
    r.edges.push_back(re);
  }
  for (const auto& [a, b] : engine.ecg().pairs()) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia != index.end() && ib != index.end()) r.ecg.emplace_back(ia->second, ib->second);
  }
}

ResultEdge plain_edge(StackAct<FrameId> act) {
  ResultEdge e;
  e.act = act;
  return e;
}

using Succs = std::vector<std::pair<StateId, AAct>>;

Succs to_succs(const std::vector<ASucc>& xs) {
  Succs out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.emplace_back(x.state, x.act);
  return out;
}

struct NodeKey {
  StateId state;
  KAddr kaddr;
  friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& n) const {
    std::size_t h = n.state.value;
    hash_combine(h, KAddrHash{}(n.kaddr));
    return h;
  }
};

struct EdgeKey {
  std::uint32_t src, dst;
  StackAct<FrameId> act;
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const {
    std::size_t h = e.src;
    hash_combine(h, e.dst);
    hash_combine(h, hash_act(e.act));
    return h;
  }
};

struct Key {
  const Exp* exp;
  EnvId env;
  CtxId ctx;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = std::hash<const void*>{}(k.exp);
    hash_combine(h, k.env.value);
    hash_combine(h, k.ctx.value);
    return h;
  }
};

struct FiniteLinkHash {
  std::size_t operator()(const std::pair<std::uint32_t, KAddr>& p) const {
    std::size_t h = p.first;
    hash_combine(h, KAddrHash{}(p.second));
    return h;
  }
};

struct StateFrameHash {
  std::size_t operator()(const std::pair<StateId, FrameId>& p) const {
    std::size_t s = p.first.value;
    hash_combine(s, p.second.value);
    return s;
  }
};

}  // namespace

Session::Session(const AnfProgram& prog, AllocPolicy policy)
    : prog_(prog), machine_(prog, policy, in_), hash_(fnv_hex(print_anf(prog))) {}

// ---------------------------------------------------------------------------
// Pushdown, per-state stores

AnalysisResult analyze_pdcfa(Session& s, const AnalysisOptions& opts) {
  auto start = Clock::now();
  AbstractMachine& m = s.machine();
  std::unordered_map<std::pair<StateId, FrameId>, Succs, StateFrameHash> pops;
  RpdsOracle<StateId, FrameId> oracle;
  oracle.root = m.inject();
  oracle.nop_delta = [&](const StateId& q) { return to_succs(m.step(q, std::nullopt)); };
  oracle.top_delta = [&](const StateId& q, const FrameId& f) {
    auto key = std::pair{q, f};
    auto it = pops.find(key);
    if (it == pops.end()) it = pops.emplace(key, to_succs(m.step(q, f))).first;
    return it->second;
  };
  EcgEngine<StateId, FrameId> engine(oracle, limits_of(opts, start));
  AnalysisResult r = blank(s, AnalysisKind::Pdcfa);
  r.saturated = engine.run();
  export_engine(
      engine, r, [](StateId q) { return ResultNode{q}; },
      [](const Edge<StateId, FrameId>& e) { return plain_edge(e.act); });
  r.wall_time_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Pushdown, single global store

AnalysisResult analyze_pdcfa_widened(Session& s, const AnalysisOptions& opts) {
  auto start = Clock::now();
  AbstractMachine& m = s.machine();
  Interner& in = s.interner();
  StoreId global = in.empty_store();
  StoreId emitted = in.empty_store();

  auto project = [&](const std::vector<ASucc>& xs) {
    Succs out;
    for (const auto& x : xs) {
      emitted = in.store_join(emitted, in.state(x.state).store);
      out.emplace_back(in.with_store(x.state, in.empty_store()), x.act);
    }
    return out;
  };
  RpdsOracle<StateId, FrameId> oracle;
  oracle.root = m.inject();
  oracle.nop_delta = [&](const StateId& q) {
    return project(m.step(in.with_store(q, global), std::nullopt));
  };
  oracle.top_delta = [&](const StateId& q, const FrameId& f) {
    return project(m.step(in.with_store(q, global), f));
  };
  EcgEngine<StateId, FrameId> engine(oracle, limits_of(opts, start));
  AnalysisResult r = blank(s, AnalysisKind::PdcfaWidened);
  r.rounds = 0;
  for (;;) {
    ++r.rounds;
    if (!engine.run()) {
      r.saturated = false;
      break;
    }
    StoreId next = in.store_join(global, emitted);
    if (next == global) break;
    global = next;
    engine.rescan();
  }
  export_engine(
      engine, r, [](StateId q) { return ResultNode{q}; },
      [](const Edge<StateId, FrameId>& e) { return plain_edge(e.act); });
  r.global_store = in.store_join(global, emitted);
  r.wall_time_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Pushdown with precise GC: nodes carry the stack root of the stacks that
// reach them, and frames carry the root set below them.

AnalysisResult analyze_gc_precise(Session& s, const AnalysisOptions& opts) {
  auto start = Clock::now();
  AbstractMachine& m = s.machine();
  Interner& in = s.interner();
  using Q = OPNode;
  using F = GcFrame;
  using PSuccs = std::vector<std::pair<Q, StackAct<F>>>;

  auto node = [&](StateId q, RootSetId roots) { return Q{gc(in, q, in.roots(roots)), roots}; };

  RpdsOracle<Q, F> oracle;
  oracle.root = Q{m.inject(), in.empty_roots()};
  oracle.nop_delta = [&](const Q& n) {
    PSuccs out;
    for (const auto& x : m.step(n.state, std::nullopt)) {
      if (x.act.is_push()) {
        RootSetId below = in.roots_union(n.roots, touches(in, x.act.frame));
        out.emplace_back(node(x.state, below), StackAct<F>::push({x.act.frame, n.roots}));
      } else {
        out.emplace_back(node(x.state, n.roots), StackAct<F>::unch());
      }
    }
    return out;
  };
  oracle.top_delta = [&](const Q& n, const F& f) {
    PSuccs out;
    for (const auto& x : m.step(n.state, f.frame))
      out.emplace_back(node(x.state, f.roots), StackAct<F>::pop(f));
    return out;
  };
  EcgEngine<Q, F> engine(oracle, limits_of(opts, start));
  AnalysisResult r = blank(s, AnalysisKind::PdcfaGc);
  r.saturated = engine.run();
  export_engine(
      engine, r, [](const Q& q) { return ResultNode{q.state, q.roots}; },
      [](const Edge<Q, F>& e) {
        ResultEdge re;
        re.act.kind = static_cast<StackAct<FrameId>::Kind>(e.act.kind);
        re.act.frame = e.act.frame.frame;
        re.frame_roots = e.act.frame.roots;
        return re;
      });
  r.wall_time_ms = ms_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// Pushdown with approximate GC: one node per control state, with a cached
// over-approximation R of the stack roots that can reach it.

AnalysisResult analyze_gc_approx(Session& s, const AnalysisOptions& opts) {
  auto start = Clock::now();
  AbstractMachine& m = s.machine();
  Interner& in = s.interner();
  using E = Edge<StateId, FrameId>;

  std::unordered_map<StateId, RootSetId> cache;
  std::unordered_map<E, RootSetId, EdgeHash<StateId, FrameId>> guards;
  auto roots_of = [&](StateId q) {
    auto it = cache.find(q);
    return it == cache.end() ? in.empty_roots() : it->second;
  };
  auto emit = [&](StateId q, RootSetId guard, const std::vector<ASucc>& xs) {
    Succs out;
    for (const auto& x : xs) {
      guards.emplace(E{q, x.act, x.state}, guard);
      out.emplace_back(x.state, x.act);
    }
    return out;
  };

  RpdsOracle<StateId, FrameId> oracle;
  oracle.root = m.inject();
  oracle.nop_delta = [&](const StateId& q) {
    RootSetId r = roots_of(q);
    return emit(q, r, m.step(gc(in, q, in.roots(r)), std::nullopt));
  };
  oracle.top_delta = [&](const StateId& q, const FrameId& f) {
    RootSetId r = roots_of(q);
    RootSet roots = roots_union(in.roots(r), touches(in, f));
    return emit(q, r, m.step(gc(in, q, roots), f));
  };
  EcgEngine<StateId, FrameId> engine(oracle, limits_of(opts, start));

  // Incremental maintenance of R. A push edge s -f-> d contributes
  // touches(f) and R(s) to R(d); a summary pair (a, b) contributes R(a) to
  // R(b). Growth is propagated eagerly and grown states are re-stepped.
  std::vector<StateId> work;
  auto grow = [&](StateId q, RootSetId delta) {
    RootSetId old = roots_of(q);
    RootSetId now = in.roots_union(old, delta);
    if (now == old) return;
    cache[q] = now;
    work.push_back(q);
  };
  bool propagating = false;
  auto propagate = [&] {
    if (propagating) return;
    propagating = true;
    std::vector<StateId> grown;
    while (!work.empty()) {
      StateId x = work.back();
      work.pop_back();
      grown.push_back(x);
      RootSetId rx = roots_of(x);
      const auto& g = engine.graph();
      if (g.has_node(x)) {
        for (auto i : g.out(x)) {
          const E& e = g.edges()[i];
          if (e.act.is_push())
            grow(e.dst, in.roots_union(rx, in.roots(touches(in, e.act.frame))));
        }
      }
      std::vector<StateId> succ = engine.ecg().succ(x);
      for (StateId y : succ)
        if (y != x) grow(y, rx);
    }
    std::sort(grown.begin(), grown.end());
    grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
    for (StateId q : grown) engine.resprout(q);
    propagating = false;
  };
  engine.on_edge = [&](const E& e) {
    if (!e.act.is_push()) return;
    grow(e.dst, in.roots_union(roots_of(e.src), in.roots(touches(in, e.act.frame))));
    propagate();
  };
  engine.on_pair = [&](const StateId& a, const StateId& b) {
    if (a == b) return;
    grow(b, roots_of(a));
    propagate();
  };

  AnalysisResult r = blank(s, AnalysisKind::PdcfaGcApprox);
  r.saturated = engine.run();
  export_engine(
      engine, r, [&](StateId q) { return ResultNode{q, roots_of(q)}; },
      [&](const E& e) {
        ResultEdge re = plain_edge(e.act);
        auto it = guards.find(e);
        if (it != guards.end()) re.guard = it->second;
        return re;
      });
  for (const auto& e : r.edges)
    if (e.guard && *e.guard != r.nodes[e.src].roots) ++r.stale_edges;
  r.wall_time_ms = ms_since(start);
  return r;
}

RootCache recorded_root_cache(const AnalysisResult& r) {
  RootCache c;
  for (const auto& n : r.nodes) c.push_back(n.roots);
  return c;
}

RootCache compute_root_cache(Session& s, const AnalysisResult& r) {
  Interner& in = s.interner();
  RootCache c(r.nodes.size(), in.empty_roots());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : r.edges) {
      if (!e.act.is_push()) continue;
      RootSetId n = in.roots_union(in.roots_union(c[e.dst], c[e.src]),
                                   in.roots(touches(in, e.act.frame)));
      if (n != c[e.dst]) {
        c[e.dst] = n;
        changed = true;
      }
    }
    for (const auto& [a, b] : r.ecg) {
      if (a == b) continue;
      RootSetId n = in.roots_union(c[b], c[a]);
      if (n != c[b]) {
        c[b] = n;
        changed = true;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Finite baselines

RootSet kont_roots(const Interner& in, const KontStore& kstore, const KAddr& k,
                   std::vector<KAddr>* visited) {
  std::vector<KAddr> seen{k};
  std::vector<KAddr> work{k};
  RootSet roots;
  while (!work.empty()) {
    KAddr a = work.back();
    work.pop_back();
    auto it = kstore.find(a);
    if (it == kstore.end()) continue;
    for (const auto& [f, next] : it->second) {
      roots = roots_union(roots, touches(in, f));
      if (std::find(seen.begin(), seen.end(), next) == seen.end()) {
        seen.push_back(next);
        work.push_back(next);
      }
    }
  }
  if (visited) *visited = std::move(seen);
  return roots;
}

std::vector<FiniteSucc> astep_finite(AbstractMachine& m, StateId q, const KAddr& k,
                                     KontStore& kstore, bool collect, std::vector<KAddr>* grew,
                                     std::vector<KAddr>* read) {
  Interner& in = m.interner();
  StateId c = q;
  if (collect) {
    c = gc(in, q, kont_roots(in, kstore, k, read));
  } else if (read) {
    *read = {k};
  }
  std::vector<FiniteSucc> out;
  for (const auto& x : m.step(c, std::nullopt)) {
    if (x.act.is_push()) {
      const AFrame& f = in.frame(x.act.frame);
      KAddr next{f.exp->label, f.env};
      auto& entry = kstore[next];
      std::pair<FrameId, KAddr> link{x.act.frame, k};
      if (std::find(entry.begin(), entry.end(), link) == entry.end()) {
        entry.push_back(link);
        if (grew) grew->push_back(next);
      }
      out.push_back({x.state, next, x.act});
    } else {
      out.push_back({x.state, k, x.act});
    }
  }
  auto it = kstore.find(k);
  if (it != kstore.end()) {
    auto links = it->second;
    for (const auto& [f, next] : links)
      for (const auto& x : m.step(c, f)) out.push_back({x.state, next, x.act});
  }
  return out;
}

AnalysisResult analyze_finite(Session& s, bool collect, const AnalysisOptions& opts) {
  auto start = Clock::now();
  AbstractMachine& m = s.machine();
  AnalysisResult r = blank(s, collect ? AnalysisKind::PlainGc : AnalysisKind::Plain);
  std::optional<Clock::time_point> deadline;
  if (opts.timeout_secs)
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(*opts.timeout_secs));



  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> index;
  std::unordered_set<EdgeKey, EdgeKeyHash> edge_set;
  std::unordered_map<KAddr, std::vector<std::uint32_t>, KAddrHash> readers;
  std::unordered_set<std::pair<std::uint32_t, KAddr>, FiniteLinkHash> registered;
  std::deque<std::uint32_t> work;
  std::vector<char> queued;

  auto add_node = [&](StateId q, KAddr k) {
    auto [it, inserted] = index.emplace(NodeKey{q, k}, static_cast<std::uint32_t>(r.nodes.size()));
    if (inserted) {
      r.nodes.push_back({q, RootSetId{}, k});
      queued.push_back(1);
      work.push_back(it->second);
    }
    return it->second;
  };
  auto requeue = [&](std::uint32_t n) {
    if (!queued[n]) {
      queued[n] = 1;
      work.push_back(n);
    }
  };

  add_node(m.inject(), KAddr{});
  std::size_t steps = 0;
  while (!work.empty()) {
    if (r.nodes.size() >= opts.max_nodes || steps >= opts.max_steps ||
        (deadline && (steps & 255) == 0 && Clock::now() > *deadline)) {
      r.saturated = false;
      break;
    }
    ++steps;
    std::uint32_t n = work.front();
    work.pop_front();
    queued[n] = 0;
    ResultNode cur = r.nodes[n];
    std::vector<KAddr> grew, read;
    auto succs = astep_finite(m, cur.state, cur.kaddr, r.kstore, collect, &grew, &read);
    for (const KAddr& k : read) {
      if (registered.insert({n, k}).second) readers[k].push_back(n);
    }
    for (const auto& x : succs) {
      std::uint32_t d = add_node(x.state, x.kaddr);
      if (edge_set.insert({n, d, x.act}).second) {
        ResultEdge e = plain_edge(x.act);
        e.src = n;
        e.dst = d;
        r.edges.push_back(e);
      }
    }
    for (const KAddr& k : grew) {
      auto it = readers.find(k);
      if (it == readers.end()) continue;
      for (auto reader : it->second) requeue(reader);
    }
  }
  r.wall_time_ms = ms_since(start);
  return r;
}

namespace {

AnalysisResult dispatch(Session& s, AnalysisKind kind, const AnalysisOptions& opts) {
  switch (kind) {
    case AnalysisKind::Plain: return analyze_finite(s, false, opts);
    case AnalysisKind::PlainGc: return analyze_finite(s, true, opts);
    case AnalysisKind::Pdcfa: return analyze_pdcfa(s, opts);
    case AnalysisKind::PdcfaGc: return analyze_gc_precise(s, opts);
    case AnalysisKind::PdcfaGcApprox: return analyze_gc_approx(s, opts);
    case AnalysisKind::PdcfaWidened: return analyze_pdcfa_widened(s, opts);
  }
  throw std::logic_error("unknown analysis");
}

}  // namespace

AnalysisResult analyze(Session& s, AnalysisKind kind, const AnalysisOptions& opts) {
  Interner& in = s.interner();
  std::unordered_map<AddrId, ValSetId> flows;
  s.machine().on_bind = [&](AddrId a, ValSetId vs) {
    ValSetId& x = flows[a];
    x = in.valset_union(x, vs);
  };
  AnalysisResult r;
  try {
    r = dispatch(s, kind, opts);
  } catch (...) {
    s.machine().on_bind = nullptr;
    throw;
  }
  s.machine().on_bind = nullptr;
  AStore st(flows.begin(), flows.end());
  std::erase_if(st, [&](const auto& e) { return e.second == in.empty_valset(); });
  std::sort(st.begin(), st.end());
  r.bindings = in.store(st);
  return r;
}

// ---------------------------------------------------------------------------
// Soundness against concrete runs

std::vector<std::size_t> check_soundness(Session& s, const AnalysisResult& r,
                                         const AbstractTrace& trace) {
  Interner& in = s.interner();
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> by_key;
  for (std::uint32_t i = 0; i < r.nodes.size(); ++i) {
    const ControlState& c = in.state(r.nodes[i].state);
    by_key[{c.exp, c.env, c.ctx}].push_back(i);
  }

  // Pushdown results: nodes reachable with exactly a given stack.
  std::vector<std::vector<std::uint32_t>> push_out(r.nodes.size()), ecg_succ(r.nodes.size());
  for (std::uint32_t i = 0; i < r.edges.size(); ++i)
    if (r.edges[i].act.is_push()) push_out[r.edges[i].src].push_back(i);
  for (const auto& [a, b] : r.ecg) ecg_succ[a].push_back(b);
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reach;
  std::function<const std::vector<std::uint32_t>&(std::uint32_t)> reachable =
      [&](std::uint32_t k) -> const std::vector<std::uint32_t>& {
    auto it = reach.find(k);
    if (it != reach.end()) return it->second;
    std::vector<std::uint32_t> out;
    if (k == 0) {
      out = ecg_succ[0];
    } else {
      const auto& node = trace.stack_nodes[k];
      std::vector<std::uint32_t> below = reachable(node.parent);
      for (auto d : below)
        for (auto ei : push_out[d])
          if (r.edges[ei].act.frame == node.frame) {
            const auto& succ = ecg_succ[r.edges[ei].dst];
            out.insert(out.end(), succ.begin(), succ.end());
          }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return reach.emplace(k, std::move(out)).first->second;
  };

  // Finite results: the continuation address must unwind to the stack.
  std::map<std::pair<KAddr, std::uint32_t>, bool> chain_memo;
  std::function<bool(const KAddr&, std::uint32_t)> chain = [&](const KAddr& ka,
                                                              std::uint32_t k) -> bool {
    if (k == 0) return ka == KAddr{};
    auto key = std::pair{ka, k};
    auto it = chain_memo.find(key);
    if (it != chain_memo.end()) return it->second;
    bool ok = false;
    auto ks = r.kstore.find(ka);
    if (ks != r.kstore.end()) {
      const auto& node = trace.stack_nodes[k];
      for (const auto& [f, next] : ks->second)
        if (f == node.frame && chain(next, node.parent)) {
          ok = true;
          break;
        }
    }
    chain_memo[key] = ok;
    return ok;
  };

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    StateId target = trace.states[i];
    std::uint32_t k = trace.stacks[i];
    if (uses_gc(r.kind)) target = trace.collected[i];
    const ControlState& t = in.state(target);
    auto it = by_key.find({t.exp, t.env, t.ctx});
    bool ok = false;
    if (it != by_key.end()) {
      for (auto n : it->second) {
        StoreId have = r.global_store ? *r.global_store : in.state(r.nodes[n].state).store;
        if (!in.store_leq(t.store, have)) continue;
        if (is_pushdown(r.kind)) {
          const auto& here = reachable(k);
          ok = std::binary_search(here.begin(), here.end(), n);
        } else {
          ok = chain(r.nodes[n].kaddr, k);
        }
        if (ok) break;
      }
    }
    if (!ok) bad.push_back(i);
  }
  return bad;
}

std::vector<std::size_t> uncovered_nodes(const Session& s, const AnalysisResult& inner,
                                         const AnalysisResult& outer) {
  const Interner& in = s.interner();
  auto key = [&](const ControlState& q) {
    std::size_t h = std::hash<const Exp*>{}(q.exp);
    hash_combine(h, q.env.value);
    hash_combine(h, q.ctx.value);
    return h;
  };
  auto same_point = [](const ControlState& a, const ControlState& b) {
    return a.exp == b.exp && a.env == b.env && a.ctx == b.ctx;
  };
  std::unordered_map<std::size_t, std::vector<StateId>> by_point;
  for (const auto& n : outer.nodes) by_point[key(in.state(n.state))].push_back(n.state);

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < inner.nodes.size(); ++i) {
    const ControlState& q = in.state(inner.nodes[i].state);
    StoreId want = inner.global_store ? *inner.global_store : q.store;
    bool ok = false;
    auto it = by_point.find(key(q));
    if (it != by_point.end()) {
      for (StateId c : it->second) {
        const ControlState& o = in.state(c);
        if (!same_point(q, o)) continue;
        StoreId have = outer.global_store ? *outer.global_store : o.store;
        if (in.store_leq(want, have)) {
          ok = true;
          break;
        }
      }
    }
    if (!ok) bad.push_back(i);
  }
  return bad;
}

}  // namespace pdcfa
