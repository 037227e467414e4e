#pragma once

// Generic pushdown reachability: stack actions, intensional rooted pushdown
// systems, and the epsilon-closure-graph worklist that compacts them.

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pdcfa/id.hpp"

namespace pdcfa {

template <class F>
struct StackAct {
  enum class Kind : std::uint8_t { Push, Pop, Unch };
  Kind kind = Kind::Unch;
  F frame{};

  static StackAct push(F f) { return {Kind::Push, f}; }
  static StackAct pop(F f) { return {Kind::Pop, f}; }
  static StackAct unch() { return {Kind::Unch, F{}}; }

  bool is_push() const { return kind == Kind::Push; }
  bool is_pop() const { return kind == Kind::Pop; }
  bool is_unch() const { return kind == Kind::Unch; }

  friend bool operator==(const StackAct&, const StackAct&) = default;
};

template <class F>
std::size_t hash_act(const StackAct<F>& a) {
  std::size_t s = static_cast<std::size_t>(a.kind);
  if (!a.is_unch()) hash_combine(s, std::hash<F>{}(a.frame));
  return s;
}

/// Cancels adjacent push/pop pairs of the same frame and drops Unch.
template <class F>
std::vector<StackAct<F>> net(const std::vector<StackAct<F>>& acts) {
  std::vector<StackAct<F>> out;
  for (const auto& a : acts) {
    if (a.is_unch()) continue;
    if (a.is_pop() && !out.empty() && out.back().is_push() && out.back().frame == a.frame) {
      out.pop_back();
      continue;
    }
    out.push_back(a);
  }
  return out;
}

/// The stack denoted by an action string, top first; absent if the string
/// pops below its starting point.
template <class F>
std::optional<std::vector<F>> stackify(const std::vector<StackAct<F>>& acts) {
  auto n = net(acts);
  std::vector<F> stack;
  for (auto it = n.rbegin(); it != n.rend(); ++it) {
    if (!it->is_push()) return std::nullopt;
    stack.push_back(it->frame);
  }
  return stack;
}

template <class Q, class F>
struct RpdsOracle {
  using Succs = std::vector<std::pair<Q, StackAct<F>>>;
  Q root;
  /// Moves available on any stack: pushes and unchanged moves.
  std::function<Succs(const Q&)> nop_delta;
  /// Pops available with frame on top of the stack.
  std::function<Succs(const Q&, const F&)> top_delta;
};

template <class Q, class F>
struct Edge {
  Q src;
  StackAct<F> act;
  Q dst;
  friend bool operator==(const Edge&, const Edge&) = default;
};

template <class Q, class F>
struct EdgeHash {
  std::size_t operator()(const Edge<Q, F>& e) const {
    std::size_t s = std::hash<Q>{}(e.src);
    hash_combine(s, hash_act(e.act));
    hash_combine(s, std::hash<Q>{}(e.dst));
    return s;
  }
};

template <class Q>
struct PairHash {
  std::size_t operator()(const std::pair<Q, Q>& p) const {
    std::size_t s = std::hash<Q>{}(p.first);
    hash_combine(s, std::hash<Q>{}(p.second));
    return s;
  }
};

/// Compacted rooted pushdown system: explicit nodes and edges, insertion
/// ordered.
template <class Q, class F>
class Crpds {
 public:
  using E = Edge<Q, F>;

  explicit Crpds(Q root) : root_(root) { add_node(root); }

  const Q& root() const { return root_; }
  const std::vector<Q>& nodes() const { return nodes_; }
  const std::vector<E>& edges() const { return edges_; }
  bool has_node(const Q& q) const { return index_.count(q) != 0; }
  bool has_edge(const E& e) const { return edge_set_.count(e) != 0; }

  /// Returns true if q was new.
  bool add_node(const Q& q) {
    auto [it, inserted] = index_.emplace(q, nodes_.size());
    if (!inserted) return false;
    nodes_.push_back(q);
    out_.emplace_back();
    in_.emplace_back();
    push_in_.emplace_back();
    return true;
  }

  bool add_edge(const E& e) {
    if (!edge_set_.insert(e).second) return false;
    add_node(e.src);
    add_node(e.dst);
    std::size_t i = edges_.size();
    edges_.push_back(e);
    out_[index_.at(e.src)].push_back(i);
    in_[index_.at(e.dst)].push_back(i);
    if (e.act.is_push()) push_in_[index_.at(e.dst)].push_back(i);
    return true;
  }

  const std::vector<std::size_t>& out(const Q& q) const { return out_[index_.at(q)]; }
  const std::vector<std::size_t>& in(const Q& q) const { return in_[index_.at(q)]; }
  const std::vector<std::size_t>& push_in(const Q& q) const { return push_in_[index_.at(q)]; }

  std::vector<std::pair<StackAct<F>, Q>> forward(const Q& q) const {
    std::vector<std::pair<StackAct<F>, Q>> r;
    for (auto i : out(q)) r.emplace_back(edges_[i].act, edges_[i].dst);
    return r;
  }
  std::vector<std::pair<StackAct<F>, Q>> backward(const Q& q) const {
    std::vector<std::pair<StackAct<F>, Q>> r;
    for (auto i : in(q)) r.emplace_back(edges_[i].act, edges_[i].src);
    return r;
  }

 private:
  Q root_;
  std::vector<Q> nodes_;
  std::vector<E> edges_;
  std::unordered_map<Q, std::size_t> index_;
  std::unordered_set<E, EdgeHash<Q, F>> edge_set_;
  std::vector<std::vector<std::size_t>> out_, in_, push_in_;
};

/// Epsilon-closure graph: (a, b) means b is reachable from a with no net
/// stack change.
template <class Q>
class Ecg {
 public:
  bool contains(const Q& a, const Q& b) const { return set_.count({a, b}) != 0; }

  bool add(const Q& a, const Q& b) {
    if (!set_.insert({a, b}).second) return false;
    pairs_.emplace_back(a, b);
    fwd_[a].push_back(b);
    bwd_[b].push_back(a);
    return true;
  }

  const std::vector<Q>& succ(const Q& q) const {
    auto it = fwd_.find(q);
    return it == fwd_.end() ? empty_ : it->second;
  }
  const std::vector<Q>& pred(const Q& q) const {
    auto it = bwd_.find(q);
    return it == bwd_.end() ? empty_ : it->second;
  }
  const std::vector<std::pair<Q, Q>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  std::unordered_set<std::pair<Q, Q>, PairHash<Q>> set_;
  std::vector<std::pair<Q, Q>> pairs_;
  std::unordered_map<Q, std::vector<Q>> fwd_, bwd_;
  std::vector<Q> empty_;
};

struct EngineLimits {
  std::size_t max_nodes = 100000;
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Worklist computation of the compacted system and its epsilon-closure
/// graph. Work items are processed summary pairs first, then edges, then
/// new states.
template <class Q, class F>
class EcgEngine {
 public:
  using Act = StackAct<F>;
  using E = Edge<Q, F>;

  EcgEngine(RpdsOracle<Q, F> oracle, EngineLimits limits = {})
      : oracle_(std::move(oracle)), limits_(limits), graph_(oracle_.root) {}

  std::function<void(const E&)> on_edge;
  std::function<void(const Q&, const Q&)> on_pair;

  /// Runs to a fixpoint or until a limit trips; returns true on fixpoint.
  bool run() {
    if (!started_) {
      started_ = true;
      ecg_add(graph_.root(), graph_.root());
      ds_.push_back(graph_.root());
    }
    for (;;) {
      if (!dh_.empty()) {
        auto p = dh_.front();
        dh_.pop_front();
        dh_queued_.erase(p);
        process_pair(p.first, p.second);
      } else if (!de_.empty()) {
        E e = de_.front();
        de_.pop_front();
        de_queued_.erase(e);
        process_edge(e);
      } else if (!ds_.empty()) {
        Q q = ds_.front();
        ds_.pop_front();
        sprout(q);
      } else {
        return true;
      }
      ++steps_;
      if (over_limit()) return false;
    }
  }

  /// Re-queries the oracle at q, as if q were new and every stack reaching
  /// it had just arrived. Used when the oracle's answer at q has grown.
  void resprout(const Q& q) {
    sprout(q);
    std::vector<Q> anc = ecg_.pred(q);
    for (const Q& x : anc) {
      std::vector<std::size_t> pushes = graph_.push_in(x);
      for (auto i : pushes) {
        E pe = graph_.edges()[i];
        match_pops(pe.src, pe.act.frame, q);
      }
    }
  }

  void rescan() {
    std::vector<Q> all = graph_.nodes();
    for (const Q& q : all) resprout(q);
  }

  const Crpds<Q, F>& graph() const { return graph_; }
  const Ecg<Q>& ecg() const { return ecg_; }
  std::size_t steps() const { return steps_; }
  const RpdsOracle<Q, F>& oracle() const { return oracle_; }

 private:
  bool over_limit() const {
    if (graph_.nodes().size() >= limits_.max_nodes) return true;
    if (steps_ >= limits_.max_steps) return true;
    if (limits_.deadline && (steps_ & 255) == 0 &&
        std::chrono::steady_clock::now() > *limits_.deadline)
      return true;
    return false;
  }

  void enqueue_edge(const E& e) {
    if (graph_.has_edge(e) || de_queued_.count(e)) return;
    de_queued_.insert(e);
    de_.push_back(e);
  }

  void enqueue_pair(const Q& a, const Q& b) {
    std::pair<Q, Q> p{a, b};
    if (ecg_.contains(a, b) || dh_queued_.count(p)) return;
    dh_queued_.insert(p);
    dh_.push_back(p);
  }

  void ensure_node(const Q& q) {
    if (graph_.add_node(q)) {
      ecg_add(q, q);
      ds_.push_back(q);
    }
  }

  void ecg_add(const Q& a, const Q& b) {
    if (ecg_.add(a, b) && on_pair) on_pair(a, b);
  }

  void sprout(const Q& q) {
    for (const auto& [dst, act] : oracle_.nop_delta(q)) {
      if (act.is_pop()) continue;
      enqueue_edge(E{q, act, dst});
      if (act.is_unch()) enqueue_pair(q, dst);
    }
  }

  /// Pops of frame g available at y, for a push of g by pusher s that is
  /// epsilon-connected to y.
  void match_pops(const Q& s, const F& g, const Q& y) {
    for (const auto& [dst, act] : oracle_.top_delta(y, g)) {
      if (!act.is_pop() || !(act.frame == g)) continue;
      enqueue_edge(E{y, act, dst});
      enqueue_pair(s, dst);
    }
  }

  void process_edge(const E& e) {
    if (graph_.has_edge(e)) return;
    ensure_node(e.dst);
    graph_.add_edge(e);
    if (on_edge) on_edge(e);
    if (e.act.is_push()) {
      std::vector<Q> desc = ecg_.succ(e.dst);
      for (const Q& y : desc) match_pops(e.src, e.act.frame, y);
    } else if (e.act.is_pop()) {
      std::vector<Q> anc = ecg_.pred(e.src);
      for (const Q& x : anc) {
        for (auto i : graph_.push_in(x)) {
          const E& pe = graph_.edges()[i];
          if (pe.act.frame == e.act.frame) enqueue_pair(pe.src, e.dst);
        }
      }
    } else {
      enqueue_pair(e.src, e.dst);
    }
  }

  void process_pair(const Q& a, const Q& b) {
    if (ecg_.contains(a, b)) return;
    ensure_node(a);
    ensure_node(b);
    std::vector<Q> anc = ecg_.pred(a);
    std::vector<Q> desc = ecg_.succ(b);
    std::vector<std::pair<Q, Q>> fresh;
    for (const Q& x : anc)
      for (const Q& y : desc)
        if (!ecg_.contains(x, y)) {
          ecg_add(x, y);
          fresh.emplace_back(x, y);
        }
    for (const auto& [x, y] : fresh) {
      std::vector<std::size_t> pushes = graph_.push_in(x);
      for (auto i : pushes) {
        E pe = graph_.edges()[i];
        match_pops(pe.src, pe.act.frame, y);
      }
    }
  }

  RpdsOracle<Q, F> oracle_;
  EngineLimits limits_;
  Crpds<Q, F> graph_;
  Ecg<Q> ecg_;
  bool started_ = false;
  std::size_t steps_ = 0;
  std::deque<Q> ds_;
  std::deque<E> de_;
  std::deque<std::pair<Q, Q>> dh_;
  std::unordered_set<E, EdgeHash<Q, F>> de_queued_;
  std::unordered_set<std::pair<Q, Q>, PairHash<Q>> dh_queued_;
};

template <class Q, class F>
struct Compacted {
  Crpds<Q, F> graph;
  Ecg<Q> ecg;
  bool saturated;
};

template <class Q, class F>
Compacted<Q, F> compact_worklist(const RpdsOracle<Q, F>& oracle, EngineLimits limits = {}) {
  EcgEngine<Q, F> engine(oracle, limits);
  bool sat = engine.run();
  return {engine.graph(), engine.ecg(), sat};
}

// Single-step operations of the worklist, exposed for testing. Each takes
// the current graph and closure graph and returns the new work.

template <class Q, class F>
struct Work {
  std::vector<Edge<Q, F>> edges;
  std::vector<std::pair<Q, Q>> pairs;
};

template <class Q, class F>
Work<Q, F> sprout(const RpdsOracle<Q, F>& o, const Q& q) {
  Work<Q, F> w;
  for (const auto& [dst, act] : o.nop_delta(q)) {
    if (act.is_pop()) continue;
    w.edges.push_back({q, act, dst});
    if (act.is_unch()) w.pairs.emplace_back(q, dst);
  }
  return w;
}

template <class Q, class F>
Work<Q, F> add_push(const Crpds<Q, F>&, const Ecg<Q>& h, const RpdsOracle<Q, F>& o,
                    const Edge<Q, F>& e) {
  Work<Q, F> w;
  for (const Q& y : h.succ(e.dst))
    for (const auto& [dst, act] : o.top_delta(y, e.act.frame))
      if (act.is_pop() && act.frame == e.act.frame) {
        w.edges.push_back({y, act, dst});
        w.pairs.emplace_back(e.src, dst);
      }
  return w;
}

template <class Q, class F>
Work<Q, F> add_pop(const Crpds<Q, F>& g, const Ecg<Q>& h, const RpdsOracle<Q, F>&,
                   const Edge<Q, F>& e) {
  Work<Q, F> w;
  for (const Q& x : h.pred(e.src)) {
    if (!g.has_node(x)) continue;
    for (auto i : g.push_in(x)) {
      const auto& pe = g.edges()[i];
      if (pe.act.frame == e.act.frame) w.pairs.emplace_back(pe.src, e.dst);
    }
  }
  return w;
}

/// New work caused by the summary pair (a, b): the transitive pairs through
/// it and the pops enabled across it.
template <class Q, class F>
Work<Q, F> add_empty(const Crpds<Q, F>& g, const Ecg<Q>& h, const RpdsOracle<Q, F>& o,
                     const Q& a, const Q& b) {
  Work<Q, F> w;
  std::vector<Q> anc = h.pred(a);
  if (anc.empty()) anc.push_back(a);
  std::vector<Q> desc = h.succ(b);
  if (desc.empty()) desc.push_back(b);
  for (const Q& x : anc)
    for (const Q& y : desc)
      if (!(x == a && y == b)) w.pairs.emplace_back(x, y);
  for (const Q& x : anc) {
    if (!g.has_node(x)) continue;
    for (auto i : g.push_in(x)) {
      const auto& pe = g.edges()[i];
      for (const Q& y : desc)
        for (const auto& [dst, act] : o.top_delta(y, pe.act.frame))
          if (act.is_pop() && act.frame == pe.act.frame) {
            w.edges.push_back({y, act, dst});
            w.pairs.emplace_back(pe.src, dst);
          }
    }
  }
  return w;
}

/// Bounded explicit search over (state, stack) configurations. Exact when
/// it reports saturation.
template <class Q, class F>
Compacted<Q, F> compact_naive(const RpdsOracle<Q, F>& o, std::size_t depth_bound,
                              std::size_t step_bound) {
  using Conf = std::pair<Q, std::vector<F>>;
  struct ConfHash {
    std::size_t operator()(const Conf& c) const {
      std::size_t s = std::hash<Q>{}(c.first);
      for (const auto& f : c.second) hash_combine(s, std::hash<F>{}(f));
      return s;
    }
  };
  Compacted<Q, F> r{Crpds<Q, F>(o.root), Ecg<Q>{}, true};

  auto moves = [&](const Conf& c) {
    std::vector<std::pair<Q, StackAct<F>>> out;
    for (const auto& m : o.nop_delta(c.first))
      if (!m.second.is_pop()) out.push_back(m);
    if (!c.second.empty())
      for (const auto& m : o.top_delta(c.first, c.second.back()))
        if (m.second.is_pop() && m.second.frame == c.second.back()) out.push_back(m);
    return out;
  };
  auto apply = [](std::vector<F> st, const StackAct<F>& a) {
    if (a.is_push()) st.push_back(a.frame);
    if (a.is_pop()) st.pop_back();
    return st;
  };

  std::size_t steps = 0;
  {
    std::unordered_set<Conf, ConfHash> seen;
    std::deque<Conf> frontier;
    Conf start{o.root, {}};
    seen.insert(start);
    frontier.push_back(start);
    while (!frontier.empty()) {
      if (++steps > step_bound) {
        r.saturated = false;
        break;
      }
      Conf c = frontier.front();
      frontier.pop_front();
      for (const auto& [dst, act] : moves(c)) {
        auto st = apply(c.second, act);
        if (st.size() > depth_bound) {
          r.saturated = false;
          continue;
        }
        r.graph.add_edge({c.first, act, dst});
        Conf n{dst, std::move(st)};
        if (seen.insert(n).second) frontier.push_back(std::move(n));
      }
    }
  }

  // Balanced paths: from each reached state, search with a private stack and
  // record every state reached with that stack empty.
  for (const Q& s : r.graph.nodes()) {
    std::unordered_set<Conf, ConfHash> seen;
    std::deque<Conf> frontier;
    Conf start{s, {}};
    seen.insert(start);
    frontier.push_back(start);
    r.ecg.add(s, s);
    std::size_t local = 0;
    while (!frontier.empty()) {
      if (++local > step_bound) {
        r.saturated = false;
        break;
      }
      Conf c = frontier.front();
      frontier.pop_front();
      for (const auto& [dst, act] : moves(c)) {
        auto st = apply(c.second, act);
        if (st.size() > depth_bound) {
          r.saturated = false;
          continue;
        }
        if (st.empty()) r.ecg.add(s, dst);
        Conf n{dst, std::move(st)};
        if (seen.insert(n).second) frontier.push_back(std::move(n));
      }
    }
  }
  return r;
}

}  // namespace pdcfa

template <class F>
struct std::hash<pdcfa::StackAct<F>> {
  std::size_t operator()(const pdcfa::StackAct<F>& a) const { return pdcfa::hash_act(a); }
};
