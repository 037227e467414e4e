#pragma once

// Abstract CESK components. Every component is hash-consed in an Interner so
// states compare by id.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdcfa/concrete.hpp"
#include "pdcfa/id.hpp"
#include "pdcfa/pushdown.hpp"
#include "pdcfa/syntax.hpp"

namespace pdcfa {

enum class PolicyKind : std::uint8_t { Mono, OneCFA, KCFA, PolySplit };

struct AllocPolicy {
  PolicyKind kind = PolicyKind::Mono;
  unsigned k = 0;

  static AllocPolicy mono() { return {PolicyKind::Mono, 0}; }
  static AllocPolicy one_cfa() { return {PolicyKind::OneCFA, 1}; }
  static AllocPolicy kcfa(unsigned k) { return {PolicyKind::KCFA, k}; }
  static AllocPolicy poly_split() { return {PolicyKind::PolySplit, 0}; }
  /// CLI mapping: 0 -> Mono, 1 -> OneCFA, otherwise KCFA(k).
  static AllocPolicy from_k(unsigned k);

  std::string name() const;
  friend bool operator==(const AllocPolicy&, const AllocPolicy&) = default;
};

using AddrId = Id<struct AddrTag>;
using EnvId = Id<struct EnvTag>;
using ValId = Id<struct ValTag>;
using ValSetId = Id<struct ValSetTag>;
using StoreId = Id<struct StoreTag>;
using FrameId = Id<struct FrameTag>;
using CtxId = Id<struct CtxTag>;
using StateId = Id<struct StateTag>;
using RootSetId = Id<struct RootSetTag>;

inline constexpr Label kNoLabel = 0xffffffffu;

/// Bind(v) / Bind1(v, l) / BindK(v, ctx) / PolyBind(v, l?) all share this
/// shape; unused parts are kNoLabel / the empty context.
struct AAddr {
  Var var;
  Label site = kNoLabel;
  CtxId ctx{};
  friend bool operator==(const AAddr&, const AAddr&) = default;
};

using AEnv = std::vector<std::pair<Var, AddrId>>;  // sorted by var

enum class AScalar : std::uint8_t { IntTop, True, False, BoolTop };

struct AVal {
  enum class Kind : std::uint8_t { Clo, Scalar, Prim };
  explicit AVal(Kind k = Kind::Clo) : kind(k) {}

  Kind kind;
  const Lambda* lam = nullptr;
  EnvId env{};
  AScalar scalar = AScalar::IntTop;
  PrimOp op = PrimOp::Add;
  std::vector<AScalar> args;
  friend bool operator==(const AVal&, const AVal&) = default;
};

using ValSet = std::vector<ValId>;                      // sorted
using AStore = std::vector<std::pair<AddrId, ValSetId>>;  // sorted, no empty images
using RootSet = std::vector<AddrId>;                    // sorted

struct AFrame {
  Var var;
  const Exp* exp;
  EnvId env;
  friend bool operator==(const AFrame&, const AFrame&) = default;
};

using Ctx = std::vector<Label>;  // most recent call first

struct ControlState {
  const Exp* exp;
  EnvId env;
  StoreId store;
  CtxId ctx;
  friend bool operator==(const ControlState&, const ControlState&) = default;
};

struct AAddrHash {
  std::size_t operator()(const AAddr& a) const;
};
struct AValHash {
  std::size_t operator()(const AVal& v) const;
};
struct AFrameHash {
  std::size_t operator()(const AFrame& f) const;
};
struct StateHash {
  std::size_t operator()(const ControlState& s) const;
};
template <class V>
struct VecHash {
  std::size_t operator()(const V& v) const {
    return hash_range(v.begin(), v.end(), [](const auto& x) { return elem(x); });
  }
  template <class T>
  static std::size_t elem(const T& x) {
    return std::hash<T>{}(x);
  }
  template <class A, class B>
  static std::size_t elem(const std::pair<A, B>& p) {
    std::size_t s = elem(p.first);
    hash_combine(s, elem(p.second));
    return s;
  }
  static std::size_t elem(AScalar s) { return static_cast<std::size_t>(s); }
};

/// Hash-consing tables for one analysis run. Not synchronized: each run
/// owns its interner.
class Interner {
 public:
  Interner();

  AddrId addr(const AAddr& a) { return addrs_.intern(a); }
  EnvId env(const AEnv& e) { return envs_.intern(e); }
  ValId val(const AVal& v) { return vals_.intern(v); }
  ValSetId valset(const ValSet& s) { return valsets_.intern(s); }
  StoreId store(const AStore& s) { return stores_.intern(s); }
  FrameId frame(const AFrame& f) { return frames_.intern(f); }
  CtxId ctx(const Ctx& c) { return ctxs_.intern(c); }
  StateId state(const ControlState& s) { return states_.intern(s); }
  RootSetId roots(const RootSet& r) { return rootsets_.intern(r); }

  const AAddr& addr(AddrId id) const { return addrs_.get(id); }
  const AEnv& env(EnvId id) const { return envs_.get(id); }
  const AVal& val(ValId id) const { return vals_.get(id); }
  const ValSet& valset(ValSetId id) const { return valsets_.get(id); }
  const AStore& store(StoreId id) const { return stores_.get(id); }
  const AFrame& frame(FrameId id) const { return frames_.get(id); }
  const Ctx& ctx(CtxId id) const { return ctxs_.get(id); }
  const ControlState& state(StateId id) const { return states_.get(id); }
  const RootSet& roots(RootSetId id) const { return rootsets_.get(id); }

  std::size_t state_count() const { return states_.size(); }

  EnvId empty_env() const { return EnvId(0); }
  ValSetId empty_valset() const { return ValSetId(0); }
  StoreId empty_store() const { return StoreId(0); }
  CtxId empty_ctx() const { return CtxId(0); }
  RootSetId empty_roots() const { return RootSetId(0); }

  std::optional<AddrId> lookup(EnvId env, Var v) const;
  EnvId restrict(EnvId env, const std::vector<Var>& keep);
  EnvId extend(EnvId env, Var v, AddrId a);

  ValSetId store_get(StoreId s, AddrId a) const;
  StoreId store_join(StoreId s, AddrId a, ValSetId vs);
  StoreId store_join(StoreId a, StoreId b);
  StoreId store_restrict(StoreId s, const RootSet& live);
  ValSetId valset_union(ValSetId a, ValSetId b);
  ValSetId singleton(ValId v);

  RootSetId roots_union(RootSetId a, RootSetId b);
  RootSetId roots_union(RootSetId a, const RootSet& b);

  StateId with_store(StateId s, StoreId store);

  bool val_leq(ValId a, ValId b) const;
  bool valset_leq(ValSetId a, ValSetId b) const;
  bool store_leq(StoreId a, StoreId b) const;

 private:
  InternTable<AAddr, AddrId, AAddrHash> addrs_;
  InternTable<AEnv, EnvId, VecHash<AEnv>> envs_;
  InternTable<AVal, ValId, AValHash> vals_;
  InternTable<ValSet, ValSetId, VecHash<ValSet>> valsets_;
  InternTable<AStore, StoreId, VecHash<AStore>> stores_;
  InternTable<AFrame, FrameId, AFrameHash> frames_;
  InternTable<Ctx, CtxId, VecHash<Ctx>> ctxs_;
  InternTable<ControlState, StateId, StateHash> states_;
  InternTable<RootSet, RootSetId, VecHash<RootSet>> rootsets_;
};

bool scalar_leq(AScalar a, AScalar b);

using AAct = StackAct<FrameId>;

struct ASucc {
  StateId state;
  AAct act;
  friend bool operator==(const ASucc&, const ASucc&) = default;
};

/// The abstract transition relation over interned control states. The stack
/// is not part of the state: a step is asked either with no top frame
/// (yielding pushes and unchanged moves) or with one (yielding pops).
class AbstractMachine {
 public:
  AbstractMachine(const AnfProgram& prog, AllocPolicy policy, Interner& in);

  const AnfProgram& program() const { return prog_; }
  AllocPolicy policy() const { return policy_; }
  Interner& interner() { return in_; }
  const Interner& interner() const { return in_; }

  StateId inject();

  AddrId aalloc(Var v, Label site, CtxId ctx, bool let_bound_call);
  CtxId push_ctx(CtxId ctx, Label call);

  ValSetId aeval(const AExp& ae, EnvId env, StoreId store);

  /// Successors of q. Without a frame: pushes and unchanged moves. With a
  /// frame: only the pops of that frame.
  std::vector<ASucc> step(StateId q, std::optional<FrameId> top);
  std::vector<ASucc> nop_delta(StateId q) { return step(q, std::nullopt); }
  std::vector<ASucc> top_delta(StateId q, FrameId f) { return step(q, f); }

  /// touches(f): range of the frame's environment.
  RootSet touches(FrameId f) const;

  /// Called with every binding a step performs, before any collection.
  std::function<void(AddrId, ValSetId)> on_bind;

  std::string show_state(StateId q) const;
  std::string show_frame(FrameId f) const;
  std::string show_addr(AddrId a) const;
  std::string show_val(ValId v) const;

 private:
  void apply(const ControlState& c, ValSetId fun, ValSetId arg, const Call& call, Label label,
             std::optional<FrameId> top, std::vector<ASucc>& out);
  void ret(const ControlState& c, StoreId store, ValSetId vals, Label site, FrameId top,
           std::vector<ASucc>& out);

  const AnfProgram& prog_;
  AllocPolicy policy_;
  Interner& in_;
};

/// Abstract values of concrete ones, given the address map of the run.
struct Abstraction {
  Interner& in;
  const std::vector<AddrId>& addr_map;

  EnvId env(const concrete::Env& e) const;
  ValId val(const concrete::Value& v) const;
  StoreId store(const concrete::Store& s) const;
  FrameId frame(const concrete::Frame& f) const;
};

/// alpha of a concrete run: per configuration, the abstract control state
/// and the abstract stack (bottom first).
struct AbstractTrace {
  struct StackNode {
    std::uint32_t parent;
    FrameId frame;
  };
  std::vector<StateId> states;
  std::vector<StateId> collected;        // abstraction of the concretely collected store
  std::vector<std::uint32_t> stacks;     // per configuration, a node of the stack trie
  std::vector<StackNode> stack_nodes;    // node 0 is the empty stack

  std::vector<FrameId> frames(std::uint32_t node) const;  // bottom first
};

/// Replays a concrete run (with logs) through the allocation policy.
AbstractTrace alpha_trace(AbstractMachine& m, const concrete::RunResult& run);

/// The partial order on configurations with stacks: equal expression,
/// environment and context, pointwise store, equal-length equal frames.
bool aconf_leq(const Interner& in, StateId a, const std::vector<FrameId>& ka, StateId b,
               const std::vector<FrameId>& kb);

/// A full abstract configuration: control state plus explicit stack.
struct AConf {
  StateId state;
  std::vector<FrameId> kont;  // bottom first
  friend bool operator==(const AConf&, const AConf&) = default;
};

/// Successors of a full configuration.
std::vector<AConf> astep(AbstractMachine& m, const AConf& c);

// Finite-state baseline: continuations live in a store of their own.

struct KAddr {
  Label label = kNoLabel;  // kNoLabel = halt continuation
  EnvId env{};
  friend bool operator==(const KAddr&, const KAddr&) = default;
  friend auto operator<=>(const KAddr&, const KAddr&) = default;
};

struct KAddrHash {
  std::size_t operator()(const KAddr& k) const;
};

}  // namespace pdcfa
