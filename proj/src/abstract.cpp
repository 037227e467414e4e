#include "pdcfa/abstract.hpp"

#include <algorithm>
#include <unordered_map>

namespace pdcfa {

AllocPolicy AllocPolicy::from_k(unsigned k) {
  if (k == 0) return mono();
  if (k == 1) return one_cfa();
  return kcfa(k);
}

std::string AllocPolicy::name() const {
  switch (kind) {
    case PolicyKind::Mono: return "0cfa";
    case PolicyKind::OneCFA: return "1cfa";
    case PolicyKind::KCFA: return std::to_string(k) + "cfa-callsite";
    case PolicyKind::PolySplit: return "poly-split";
  }
  return "?";
}

std::size_t AAddrHash::operator()(const AAddr& a) const {
  std::size_t s = a.var.value;
  hash_combine(s, a.site);
  hash_combine(s, a.ctx.value);
  return s;
}

std::size_t AValHash::operator()(const AVal& v) const {
  std::size_t s = static_cast<std::size_t>(v.kind);
  hash_combine(s, std::hash<const void*>{}(v.lam));
  hash_combine(s, v.env.value);
  hash_combine(s, static_cast<std::size_t>(v.scalar));
  hash_combine(s, static_cast<std::size_t>(v.op));
  for (auto a : v.args) hash_combine(s, static_cast<std::size_t>(a));
  return s;
}

std::size_t AFrameHash::operator()(const AFrame& f) const {
  std::size_t s = f.var.value;
  hash_combine(s, std::hash<const void*>{}(f.exp));
  hash_combine(s, f.env.value);
  return s;
}

std::size_t StateHash::operator()(const ControlState& c) const {
  std::size_t s = std::hash<const void*>{}(c.exp);
  hash_combine(s, c.env.value);
  hash_combine(s, c.store.value);
  hash_combine(s, c.ctx.value);
  return s;
}

std::size_t KAddrHash::operator()(const KAddr& k) const {
  std::size_t s = k.label;
  hash_combine(s, k.env.value);
  return s;
}

bool scalar_leq(AScalar a, AScalar b) {
  return a == b || (b == AScalar::BoolTop && (a == AScalar::True || a == AScalar::False));
}

// ---------------------------------------------------------------------------
// Interner

Interner::Interner() {
  env(AEnv{});
  valset(ValSet{});
  store(AStore{});
  ctx(Ctx{});
  roots(RootSet{});
}

std::optional<AddrId> Interner::lookup(EnvId e, Var v) const {
  const AEnv& env = envs_.get(e);
  auto it = std::lower_bound(env.begin(), env.end(), v,
                             [](const auto& p, Var x) { return p.first < x; });
  if (it == env.end() || it->first != v) return std::nullopt;
  return it->second;
}

EnvId Interner::restrict(EnvId e, const std::vector<Var>& keep) {
  const AEnv& env = envs_.get(e);
  AEnv out;
  out.reserve(keep.size());
  // Both sorted: merge walk.
  auto it = env.begin();
  for (Var v : keep) {
    while (it != env.end() && it->first < v) ++it;
    if (it != env.end() && it->first == v) out.push_back(*it);
  }
  if (out.size() == env.size()) return e;
  return envs_.intern(out);
}

EnvId Interner::extend(EnvId e, Var v, AddrId a) {
  AEnv env = envs_.get(e);
  auto it = std::lower_bound(env.begin(), env.end(), v,
                             [](const auto& p, Var x) { return p.first < x; });
  if (it != env.end() && it->first == v)
    it->second = a;
  else
    env.insert(it, {v, a});
  return envs_.intern(env);
}

ValSetId Interner::store_get(StoreId s, AddrId a) const {
  const AStore& st = stores_.get(s);
  auto it = std::lower_bound(st.begin(), st.end(), a,
                             [](const auto& p, AddrId x) { return p.first < x; });
  if (it == st.end() || it->first != a) return empty_valset();
  return it->second;
}

StoreId Interner::store_join(StoreId s, AddrId a, ValSetId vs) {
  if (vs == empty_valset()) return s;
  AStore st = stores_.get(s);
  auto it = std::lower_bound(st.begin(), st.end(), a,
                             [](const auto& p, AddrId x) { return p.first < x; });
  if (it != st.end() && it->first == a) {
    ValSetId u = valset_union(it->second, vs);
    if (u == it->second) return s;
    it->second = u;
  } else {
    st.insert(it, {a, vs});
  }
  return stores_.intern(st);
}

StoreId Interner::store_join(StoreId a, StoreId b) {
  if (a == b || b == empty_store()) return a;
  if (a == empty_store()) return b;
  const AStore& x = stores_.get(a);
  const AStore& y = stores_.get(b);
  AStore out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].first < x[i].first) {
      out.push_back(y[j++]);
    } else {
      out.emplace_back(x[i].first, valset_union(x[i].second, y[j].second));
      ++i;
      ++j;
    }
  }
  return stores_.intern(out);
}

StoreId Interner::store_restrict(StoreId s, const RootSet& live) {
  const AStore& st = stores_.get(s);
  AStore out;
  for (const auto& entry : st)
    if (std::binary_search(live.begin(), live.end(), entry.first)) out.push_back(entry);
  if (out.size() == st.size()) return s;
  return stores_.intern(out);
}

ValSetId Interner::valset_union(ValSetId a, ValSetId b) {
  if (a == b || b == empty_valset()) return a;
  if (a == empty_valset()) return b;
  const ValSet& x = valsets_.get(a);
  const ValSet& y = valsets_.get(b);
  ValSet out;
  out.reserve(x.size() + y.size());
  std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  if (out.size() == x.size()) return a;
  if (out.size() == y.size()) return b;
  return valsets_.intern(out);
}

ValSetId Interner::singleton(ValId v) { return valsets_.intern(ValSet{v}); }

RootSetId Interner::roots_union(RootSetId a, RootSetId b) {
  if (a == b || b == empty_roots()) return a;
  if (a == empty_roots()) return b;
  return roots_union(a, rootsets_.get(b));
}

RootSetId Interner::roots_union(RootSetId a, const RootSet& b) {
  const RootSet& x = rootsets_.get(a);
  RootSet out;
  out.reserve(x.size() + b.size());
  std::set_union(x.begin(), x.end(), b.begin(), b.end(), std::back_inserter(out));
  if (out.size() == x.size()) return a;
  return rootsets_.intern(out);
}

StateId Interner::with_store(StateId s, StoreId store) {
  ControlState c = states_.get(s);
  if (c.store == store) return s;
  c.store = store;
  return states_.intern(c);
}

bool Interner::val_leq(ValId a, ValId b) const {
  if (a == b) return true;
  const AVal& x = vals_.get(a);
  const AVal& y = vals_.get(b);
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case AVal::Kind::Clo: return false;
    case AVal::Kind::Scalar: return scalar_leq(x.scalar, y.scalar);
    case AVal::Kind::Prim:
      if (x.op != y.op || x.args.size() != y.args.size()) return false;
      for (std::size_t i = 0; i < x.args.size(); ++i)
        if (!scalar_leq(x.args[i], y.args[i])) return false;
      return true;
  }
  return false;
}

bool Interner::valset_leq(ValSetId a, ValSetId b) const {
  if (a == b || a == empty_valset()) return true;
  const ValSet& y = valsets_.get(b);
  for (ValId v : valsets_.get(a)) {
    if (std::binary_search(y.begin(), y.end(), v)) continue;
    if (std::none_of(y.begin(), y.end(), [&](ValId w) { return val_leq(v, w); })) return false;
  }
  return true;
}

bool Interner::store_leq(StoreId a, StoreId b) const {
  if (a == b || a == empty_store()) return true;
  for (const auto& [addr, vs] : stores_.get(a))
    if (!valset_leq(vs, store_get(b, addr))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Transition relation

AbstractMachine::AbstractMachine(const AnfProgram& prog, AllocPolicy policy, Interner& in)
    : prog_(prog), policy_(policy), in_(in) {}

StateId AbstractMachine::inject() {
  return in_.state({&prog_.root(), in_.empty_env(), in_.empty_store(), in_.empty_ctx()});
}

AddrId AbstractMachine::aalloc(Var v, Label site, CtxId ctx, bool let_bound_call) {
  switch (policy_.kind) {
    case PolicyKind::Mono: return in_.addr({v, kNoLabel, in_.empty_ctx()});
    case PolicyKind::OneCFA: return in_.addr({v, site, in_.empty_ctx()});
    case PolicyKind::KCFA: return in_.addr({v, kNoLabel, ctx});
    case PolicyKind::PolySplit:
      return in_.addr({v, let_bound_call ? site : kNoLabel, in_.empty_ctx()});
  }
  return in_.addr({v, kNoLabel, in_.empty_ctx()});
}

CtxId AbstractMachine::push_ctx(CtxId ctx, Label call) {
  if (policy_.kind != PolicyKind::KCFA || policy_.k == 0) return ctx;
  Ctx c;
  c.push_back(call);
  for (Label l : in_.ctx(ctx)) {
    if (c.size() >= policy_.k) break;
    c.push_back(l);
  }
  return in_.ctx(c);
}

namespace {

AVal scalar_val(AScalar s) {
  AVal v{AVal::Kind::Scalar};
  v.scalar = s;
  return v;
}

AScalar lit_scalar(const Literal& l) {
  if (auto* b = std::get_if<bool>(&l)) return *b ? AScalar::True : AScalar::False;
  return AScalar::IntTop;
}

std::optional<AVal> abstract_prim(PrimOp op, std::vector<AScalar> args) {
  if (static_cast<int>(args.size()) < prim_arity(op)) {
    AVal v{AVal::Kind::Prim};
    v.op = op;
    v.args = std::move(args);
    return v;
  }
  switch (op) {
    case PrimOp::Print: return scalar_val(args[0]);
    case PrimOp::Not:
      switch (args[0]) {
        case AScalar::True: return scalar_val(AScalar::False);
        case AScalar::False: return scalar_val(AScalar::True);
        case AScalar::BoolTop: return scalar_val(AScalar::BoolTop);
        case AScalar::IntTop: return scalar_val(AScalar::False);
      }
      return std::nullopt;
    default: break;
  }
  for (auto a : args)
    if (a != AScalar::IntTop) return std::nullopt;
  switch (op) {
    case PrimOp::Le:
    case PrimOp::Lt:
    case PrimOp::NumEq: return scalar_val(AScalar::BoolTop);
    default: return scalar_val(AScalar::IntTop);
  }
}

}  // namespace

ValSetId AbstractMachine::aeval(const AExp& ae, EnvId env, StoreId store) {
  return std::visit(
      [&](const auto& n) -> ValSetId {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, AExp::Ref>) {
          auto a = in_.lookup(env, n.var);
          if (!a) throw std::logic_error("unbound variable in ANF");
          return in_.store_get(store, *a);
        } else if constexpr (std::is_same_v<N, AExp::Lit>) {
          return in_.singleton(in_.val(scalar_val(lit_scalar(n.value))));
        } else if constexpr (std::is_same_v<N, AExp::PrimRef>) {
          AVal v{AVal::Kind::Prim};
          v.op = n.op;
          return in_.singleton(in_.val(v));
        } else {
          AVal v{AVal::Kind::Clo};
          v.lam = n;
          v.env = in_.restrict(env, n->free);
          return in_.singleton(in_.val(v));
        }
      },
      ae.node);
}

std::vector<ASucc> AbstractMachine::step(StateId q, std::optional<FrameId> top) {
  const ControlState c = in_.state(q);
  std::vector<ASucc> out;
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Exp::Let1>) {
          if (top) return;
          std::vector<Var> keep = prog_.free_of(n.body->label);
          keep.erase(std::remove(keep.begin(), keep.end(), n.var), keep.end());
          FrameId f = in_.frame({n.var, n.body, in_.restrict(c.env, keep)});
          StateId s = in_.state({n.call, in_.restrict(c.env, prog_.free_of(n.call->label)),
                                 c.store, c.ctx});
          out.push_back({s, AAct::push(f)});
        } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
          ValSetId fun = aeval(n.call.fun, c.env, c.store);
          ValSetId arg = aeval(n.call.arg, c.env, c.store);
          apply(c, fun, arg, n.call, c.exp->label, top, out);
        } else if constexpr (std::is_same_v<N, Exp::Ret>) {
          if (!top) return;
          ret(c, c.store, aeval(n.atom, c.env, c.store), c.exp->label, *top, out);
        } else if constexpr (std::is_same_v<N, Exp::If>) {
          if (top) return;
          bool t = false, f = false;
          ValSetId cond = aeval(n.cond, c.env, c.store);
          for (ValId v : in_.valset(cond)) {
            const AVal& av = in_.val(v);
            if (av.kind != AVal::Kind::Scalar) continue;
            t |= av.scalar == AScalar::True || av.scalar == AScalar::BoolTop;
            f |= av.scalar == AScalar::False || av.scalar == AScalar::BoolTop;
          }
          for (auto [take, branch] : {std::pair{t, n.then_branch}, std::pair{f, n.else_branch}}) {
            if (!take) continue;
            StateId s = in_.state(
                {branch, in_.restrict(c.env, prog_.free_of(branch->label)), c.store, c.ctx});
            out.push_back({s, AAct::unch()});
          }
        } else if constexpr (std::is_same_v<N, Exp::LetRec>) {
          if (top) return;
          EnvId env = c.env;
          for (const auto& [v, _] : n.bindings)
            env = in_.extend(env, v, aalloc(v, c.exp->label, c.ctx, false));
          StoreId store = c.store;
          for (const auto& [v, lam] : n.bindings) {
            AVal clo{AVal::Kind::Clo};
            clo.lam = lam;
            clo.env = in_.restrict(env, lam->free);
            AddrId a = *in_.lookup(env, v);
            ValSetId vs = in_.singleton(in_.val(clo));
            if (on_bind) on_bind(a, vs);
            store = in_.store_join(store, a, vs);
          }
          StateId s = in_.state(
              {n.body, in_.restrict(env, prog_.free_of(n.body->label)), store, c.ctx});
          out.push_back({s, AAct::unch()});
        }
      },
      c.exp->node);
  return out;
}

void AbstractMachine::apply(const ControlState& c, ValSetId fun, ValSetId arg, const Call& call,
                            Label label, std::optional<FrameId> top, std::vector<ASucc>& out) {
  if (arg == in_.empty_valset()) return;
  ValSetId prim_results = in_.empty_valset();
  for (ValId fv : in_.valset(fun)) {
    const AVal f = in_.val(fv);
    if (f.kind == AVal::Kind::Clo) {
      if (top) continue;
      CtxId ctx = push_ctx(c.ctx, label);
      AddrId a = aalloc(f.lam->param, label, ctx, call.let_bound_callee);
      EnvId env = in_.restrict(in_.extend(f.env, f.lam->param, a),
                               prog_.free_of(f.lam->body->label));
      if (on_bind) on_bind(a, arg);
      StoreId store = in_.store_join(c.store, a, arg);
      out.push_back({in_.state({f.lam->body, env, store, ctx}), AAct::unch()});
    } else if (f.kind == AVal::Kind::Prim) {
      if (!top) continue;
      for (ValId av : in_.valset(arg)) {
        const AVal& a = in_.val(av);
        if (a.kind != AVal::Kind::Scalar) continue;
        auto args = f.args;
        args.push_back(a.scalar);
        if (auto r = abstract_prim(f.op, std::move(args)))
          prim_results = in_.valset_union(prim_results, in_.singleton(in_.val(*r)));
      }
    }
  }
  if (top && prim_results != in_.empty_valset()) ret(c, c.store, prim_results, label, *top, out);
}

void AbstractMachine::ret(const ControlState& c, StoreId store, ValSetId vals, Label site,
                          FrameId top, std::vector<ASucc>& out) {
  if (vals == in_.empty_valset()) return;
  const AFrame f = in_.frame(top);
  AddrId a = aalloc(f.var, site, c.ctx, false);
  EnvId env = in_.restrict(in_.extend(f.env, f.var, a), prog_.free_of(f.exp->label));
  if (on_bind) on_bind(a, vals);
  StoreId st = in_.store_join(store, a, vals);
  out.push_back({in_.state({f.exp, env, st, c.ctx}), AAct::pop(top)});
}

RootSet AbstractMachine::touches(FrameId f) const {
  RootSet r;
  for (const auto& [_, a] : in_.env(in_.frame(f).env)) r.push_back(a);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

std::string AbstractMachine::show_addr(AddrId id) const {
  const AAddr& a = in_.addr(id);
  std::string s = prog_.vars().unique_name(a.var);
  if (a.site != kNoLabel) s += "@" + std::to_string(a.site);
  const Ctx& ctx = in_.ctx(a.ctx);
  if (!ctx.empty()) {
    s += "<";
    for (std::size_t i = 0; i < ctx.size(); ++i) s += (i ? "," : "") + std::to_string(ctx[i]);
    s += ">";
  }
  return s;
}

namespace {

std::string scalar_name(AScalar s) {
  switch (s) {
    case AScalar::IntTop: return "int";
    case AScalar::True: return "#t";
    case AScalar::False: return "#f";
    case AScalar::BoolTop: return "bool";
  }
  return "?";
}

}  // namespace

std::string AbstractMachine::show_val(ValId id) const {
  const AVal& v = in_.val(id);
  switch (v.kind) {
    case AVal::Kind::Scalar: return scalar_name(v.scalar);
    case AVal::Kind::Prim: {
      std::string s = "prim:" + std::string(prim_name(v.op));
      for (auto a : v.args) s += " " + scalar_name(a);
      return s;
    }
    case AVal::Kind::Clo: {
      std::string s = "clo:" + std::to_string(v.lam->label) + "{";
      bool first = true;
      for (const auto& [_, a] : in_.env(v.env)) {
        s += (first ? "" : ",") + show_addr(a);
        first = false;
      }
      return s + "}";
    }
  }
  return "?";
}

std::string AbstractMachine::show_frame(FrameId id) const {
  const AFrame& f = in_.frame(id);
  std::string s = prog_.vars().unique_name(f.var) + "->" + std::to_string(f.exp->label) + "{";
  bool first = true;
  for (const auto& [_, a] : in_.env(f.env)) {
    s += (first ? "" : ",") + show_addr(a);
    first = false;
  }
  return s + "}";
}

std::string AbstractMachine::show_state(StateId id) const {
  const ControlState& c = in_.state(id);
  std::string s = std::string(exp_kind_name(*c.exp)) + " " + std::to_string(c.exp->label) + " {";
  bool first = true;
  for (const auto& [_, a] : in_.env(c.env)) {
    s += (first ? "" : ",") + show_addr(a);
    first = false;
  }
  s += "}";
  const Ctx& ctx = in_.ctx(c.ctx);
  if (!ctx.empty()) {
    s += " <";
    for (std::size_t i = 0; i < ctx.size(); ++i) s += (i ? "," : "") + std::to_string(ctx[i]);
    s += ">";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Abstraction of concrete configurations

EnvId Abstraction::env(const concrete::Env& e) const {
  AEnv out;
  out.reserve(e.size());
  for (const auto& [v, a] : e) {
    if (a >= addr_map.size()) throw std::out_of_range("unmapped address");
    out.emplace_back(v, addr_map[a]);
  }
  return in.env(out);
}

ValId Abstraction::val(const concrete::Value& v) const {
  return std::visit(
      [&](const auto& x) -> ValId {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, concrete::Closure>) {
          AVal a{AVal::Kind::Clo};
          a.lam = x.lam;
          a.env = env(x.env);
          return in.val(a);
        } else if constexpr (std::is_same_v<T, concrete::PrimPartial>) {
          AVal a{AVal::Kind::Prim};
          a.op = x.op;
          for (const auto& s : x.args) {
            if (auto* b = std::get_if<bool>(&s))
              a.args.push_back(*b ? AScalar::True : AScalar::False);
            else
              a.args.push_back(AScalar::IntTop);
          }
          return in.val(a);
        } else if constexpr (std::is_same_v<T, bool>) {
          return in.val(scalar_val(x ? AScalar::True : AScalar::False));
        } else {
          return in.val(scalar_val(AScalar::IntTop));
        }
      },
      v);
}

StoreId Abstraction::store(const concrete::Store& s) const {
  StoreId out = in.empty_store();
  for (concrete::Addr a = 0; a < s.size(); ++a) {
    if (a >= addr_map.size()) throw std::out_of_range("unmapped address");
    out = in.store_join(out, addr_map[a], in.singleton(val(s.at(a))));
  }
  return out;
}

FrameId Abstraction::frame(const concrete::Frame& f) const {
  return in.frame({f.var, f.exp, env(f.env)});
}

AbstractTrace alpha_trace(AbstractMachine& m, const concrete::RunResult& run) {
  Interner& in = m.interner();
  AbstractTrace t;
  t.stack_nodes.push_back({0, FrameId{}});
  std::vector<AddrId> addr_map;
  Abstraction abs{in, addr_map};
  CtxId ctx = in.empty_ctx();
  StoreId store = in.empty_store();
  std::size_t store_size = 0;
  std::unordered_map<const concrete::KNode*, std::uint32_t> stack_ids;

  std::function<std::uint32_t(const concrete::Kont&)> stack_of = [&](const concrete::Kont& k) {
    if (!k) return std::uint32_t{0};
    auto it = stack_ids.find(k.get());
    if (it != stack_ids.end()) return it->second;
    std::uint32_t parent = stack_of(k->next);
    auto id = static_cast<std::uint32_t>(t.stack_nodes.size());
    t.stack_nodes.push_back({parent, abs.frame(k->frame)});
    stack_ids.emplace(k.get(), id);
    return id;
  };

  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    if (i > 0) {
      const concrete::StepLog& log = run.logs.at(i - 1);
      if (log.closure_call) ctx = m.push_ctx(ctx, *log.closure_call);
      for (const auto& ev : log.allocs) {
        if (addr_map.size() <= ev.addr) addr_map.resize(ev.addr + 1);
        addr_map[ev.addr] = m.aalloc(ev.var, ev.site, ctx, ev.let_bound_call);
      }
    }
    const concrete::Conf& c = run.trace[i];
    for (; store_size < c.store.size(); ++store_size) {
      auto a = static_cast<concrete::Addr>(store_size);
      store = in.store_join(store, addr_map.at(a), in.singleton(abs.val(c.store.at(a))));
    }
    EnvId env = abs.env(c.env);
    t.states.push_back(in.state({c.exp, env, store, ctx}));
    StoreId live = in.empty_store();
    for (concrete::Addr a : concrete::live_addrs(c))
      live = in.store_join(live, addr_map.at(a), in.singleton(abs.val(c.store.at(a))));
    t.collected.push_back(in.state({c.exp, env, live, ctx}));
    t.stacks.push_back(stack_of(c.kont));
  }
  return t;
}

std::vector<FrameId> AbstractTrace::frames(std::uint32_t node) const {
  std::vector<FrameId> out;
  while (node != 0) {
    out.push_back(stack_nodes[node].frame);
    node = stack_nodes[node].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool aconf_leq(const Interner& in, StateId a, const std::vector<FrameId>& ka, StateId b,
               const std::vector<FrameId>& kb) {
  if (ka != kb) return false;
  const ControlState& x = in.state(a);
  const ControlState& y = in.state(b);
  return x.exp == y.exp && x.env == y.env && x.ctx == y.ctx && in.store_leq(x.store, y.store);
}

}  // namespace pdcfa

namespace pdcfa {

std::vector<AConf> astep(AbstractMachine& m, const AConf& c) {
  std::vector<AConf> out;
  for (const auto& s : m.step(c.state, std::nullopt)) {
    AConf n{s.state, c.kont};
    if (s.act.is_push()) n.kont.push_back(s.act.frame);
    out.push_back(std::move(n));
  }
  if (!c.kont.empty()) {
    for (const auto& s : m.step(c.state, c.kont.back())) {
      AConf n{s.state, c.kont};
      n.kont.pop_back();
      out.push_back(std::move(n));
    }
  }
  return out;
}

}  // namespace pdcfa
