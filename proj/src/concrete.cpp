#include "pdcfa/concrete.hpp"

#include <algorithm>
#include <sstream>

namespace pdcfa::concrete {

const Value& Store::at(Addr a) const {
  if (a >= size_) throw std::out_of_range("dangling address " + std::to_string(a));
  return (*data_)[a];
}

Store Store::extend(std::vector<Value> values) const {
  Store s;
  if (size_ == data_->size()) {
    s.data_ = data_;
  } else {
    s.data_ = std::make_shared<std::vector<Value>>(data_->begin(), data_->begin() + size_);
  }
  for (auto& v : values) s.data_->push_back(std::move(v));
  s.size_ = s.data_->size();
  return s;
}

std::size_t kont_depth(const Kont& k) { return k ? k->depth : 0; }

namespace {

std::optional<Addr> lookup(const Env& env, Var v) {
  auto it = std::lower_bound(env.begin(), env.end(), v,
                             [](const auto& p, Var x) { return p.first < x; });
  if (it == env.end() || it->first != v) return std::nullopt;
  return it->second;
}

Env restrict(const Env& env, const std::vector<Var>& keep) {
  Env out;
  out.reserve(keep.size());
  for (Var v : keep)
    if (auto a = lookup(env, v)) out.emplace_back(v, *a);
  return out;
}

Env extend(Env env, Var v, Addr a) {
  auto it = std::lower_bound(env.begin(), env.end(), v,
                             [](const auto& p, Var x) { return p.first < x; });
  if (it != env.end() && it->first == v)
    it->second = a;
  else
    env.insert(it, {v, a});
  return env;
}

std::string show_scalar(const Scalar& s) {
  if (auto* b = std::get_if<bool>(&s)) return *b ? "#t" : "#f";
  return std::to_string(std::get<std::int64_t>(s));
}

std::int64_t wrap(std::uint64_t x) { return static_cast<std::int64_t>(x); }

std::variant<Value, Stuck> apply_prim(PrimOp op, std::vector<Scalar> args) {
  if (static_cast<int>(args.size()) < prim_arity(op)) return Value{PrimPartial{op, std::move(args)}};
  auto num = [&](std::size_t i) -> const std::int64_t* { return std::get_if<std::int64_t>(&args[i]); };
  switch (op) {
    case PrimOp::Not: {
      auto* b = std::get_if<bool>(&args[0]);
      return Value{b && !*b};
    }
    case PrimOp::Print:
      return std::visit([](auto x) { return Value{x}; }, args[0]);
    default:
      break;
  }
  const std::int64_t* a = num(0);
  const std::int64_t* b = num(1);
  if (!a || !b) return Stuck{std::string(prim_name(op)) + " applied to a non-integer"};
  auto ua = static_cast<std::uint64_t>(*a);
  auto ub = static_cast<std::uint64_t>(*b);
  switch (op) {
    case PrimOp::Add: return Value{wrap(ua + ub)};
    case PrimOp::Sub: return Value{wrap(ua - ub)};
    case PrimOp::Mul: return Value{wrap(ua * ub)};
    case PrimOp::Quotient:
    case PrimOp::Remainder:
      if (*b == 0) return Stuck{"division by zero"};
      if (*b == -1) return Value{op == PrimOp::Quotient ? wrap(0 - ua) : std::int64_t{0}};
      return Value{op == PrimOp::Quotient ? *a / *b : *a % *b};
    case PrimOp::Le: return Value{*a <= *b};
    case PrimOp::Lt: return Value{*a < *b};
    case PrimOp::NumEq: return Value{*a == *b};
    default: return Stuck{"bad primitive"};
  }
}

}  // namespace

std::string show(const Value& v, const VarTable& vars) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Closure>) {
          return "#<closure " + vars.unique_name(x.lam->param) + ">";
        } else if constexpr (std::is_same_v<T, PrimPartial>) {
          std::string s = "#<primitive " + std::string(prim_name(x.op));
          for (const auto& a : x.args) s += " " + show_scalar(a);
          return s + ">";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "#t" : "#f";
        } else {
          return std::to_string(x);
        }
      },
      v);
}

Conf inject(const Exp& e) { return Conf{&e, {}, Store{}, nullptr}; }

std::vector<Addr> live_addrs(const Conf& c) {
  std::vector<char> seen(c.store.size(), 0);
  std::vector<Addr> work;
  auto root = [&](const Env& env) {
    for (const auto& [_, a] : env)
      if (!seen[a]) {
        seen[a] = 1;
        work.push_back(a);
      }
  };
  root(c.env);
  for (const KNode* k = c.kont.get(); k; k = k->next.get()) root(k->frame.env);
  while (!work.empty()) {
    Addr a = work.back();
    work.pop_back();
    if (auto* clo = std::get_if<Closure>(&c.store.at(a))) root(clo->env);
  }
  std::vector<Addr> out;
  for (Addr a = 0; a < seen.size(); ++a)
    if (seen[a]) out.push_back(a);
  return out;
}

Addr alloc(const Conf& c) { return c.store.next(); }

std::optional<Value> atomic_eval(const AExp& ae, const Env& env, const Store& store) {
  return std::visit(
      [&](const auto& n) -> std::optional<Value> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, AExp::Ref>) {
          auto a = lookup(env, n.var);
          if (!a) return std::nullopt;
          return store.at(*a);
        } else if constexpr (std::is_same_v<N, AExp::Lit>) {
          return std::visit([](auto x) { return Value{x}; }, n.value);
        } else if constexpr (std::is_same_v<N, AExp::PrimRef>) {
          return Value{PrimPartial{n.op, {}}};
        } else {
          return Value{Closure{n, restrict(env, n->free)}};
        }
      },
      ae.node);
}

namespace {

class Stepper {
 public:
  Stepper(const AnfProgram& prog, const Conf& c, StepLog* log) : prog_(prog), c_(c), log_(log) {}

  StepResult run() {
    return std::visit([&](const auto& n) { return rule(n); }, c_.exp->node);
  }

 private:
  Value eval(const AExp& ae) {
    auto v = atomic_eval(ae, c_.env, c_.store);
    if (!v) throw std::logic_error("unbound variable in ANF");
    return std::move(*v);
  }

  Env at(const Exp& e, const Env& env) { return restrict(env, prog_.free_of(e.label)); }

  void note_alloc(Addr a, Var v, bool let_bound_call) {
    if (log_) log_->allocs.push_back({a, v, c_.exp->label, let_bound_call});
  }

  StepResult rule(const Exp::Let1& n) {
    std::vector<Var> keep = prog_.free_of(n.body->label);
    keep.erase(std::remove(keep.begin(), keep.end(), n.var), keep.end());
    Frame f{n.var, n.body, restrict(c_.env, keep)};
    std::size_t depth = kont_depth(c_.kont) + 1;
    auto k = std::make_shared<const KNode>(KNode{std::move(f), c_.kont, depth});
    return Conf{n.call, at(*n.call, c_.env), c_.store, std::move(k)};
  }

  StepResult rule(const Exp::TailCall& n) {
    Value f = eval(n.call.fun);
    Value a = eval(n.call.arg);
    if (auto* clo = std::get_if<Closure>(&f)) {
      Addr addr = c_.store.next();
      if (log_) log_->closure_call = c_.exp->label;
      note_alloc(addr, clo->lam->param, n.call.let_bound_callee);
      Env env = at(*clo->lam->body, extend(clo->env, clo->lam->param, addr));
      return Conf{clo->lam->body, std::move(env), c_.store.extend({std::move(a)}), c_.kont};
    }
    if (auto* p = std::get_if<PrimPartial>(&f)) {
      Scalar s;
      if (auto* i = std::get_if<std::int64_t>(&a))
        s = *i;
      else if (auto* b = std::get_if<bool>(&a))
        s = *b;
      else
        return Stuck{"primitive applied to a procedure"};
      auto args = p->args;
      args.push_back(s);
      auto r = apply_prim(p->op, std::move(args));
      if (auto* st = std::get_if<Stuck>(&r)) return *st;
      return ret(std::move(std::get<Value>(r)));
    }
    return Stuck{"application of a non-procedure"};
  }

  StepResult rule(const Exp::Ret& n) { return ret(eval(n.atom)); }

  StepResult rule(const Exp::If& n) {
    Value v = eval(n.cond);
    auto* b = std::get_if<bool>(&v);
    if (!b) return Stuck{"branch on a non-boolean"};
    const Exp* next = *b ? n.then_branch : n.else_branch;
    return Conf{next, at(*next, c_.env), c_.store, c_.kont};
  }

  StepResult rule(const Exp::LetRec& n) {
    Env env = c_.env;
    Addr base = c_.store.next();
    for (std::size_t i = 0; i < n.bindings.size(); ++i) {
      Addr a = base + static_cast<Addr>(i);
      env = extend(std::move(env), n.bindings[i].first, a);
      note_alloc(a, n.bindings[i].first, false);
    }
    std::vector<Value> vals;
    for (const auto& [_, lam] : n.bindings) vals.push_back(Closure{lam, restrict(env, lam->free)});
    return Conf{n.body, at(*n.body, env), c_.store.extend(std::move(vals)), c_.kont};
  }

  StepResult ret(Value v) {
    if (!c_.kont) return Halt{std::move(v)};
    const Frame& f = c_.kont->frame;
    Addr addr = c_.store.next();
    note_alloc(addr, f.var, false);
    Env env = at(*f.exp, extend(f.env, f.var, addr));
    return Conf{f.exp, std::move(env), c_.store.extend({std::move(v)}), c_.kont->next};
  }

  const AnfProgram& prog_;
  const Conf& c_;
  StepLog* log_;
};

}  // namespace

StepResult step(const AnfProgram& prog, const Conf& c, StepLog* log) {
  return Stepper(prog, c, log).run();
}

RunResult run(const AnfProgram& prog, std::size_t fuel, bool keep_logs) {
  RunResult r;
  r.trace.push_back(inject(prog.root()));
  for (std::size_t i = 0; i < fuel; ++i) {
    StepLog log;
    StepResult s = step(prog, r.trace.back(), keep_logs ? &log : nullptr);
    if (auto* h = std::get_if<Halt>(&s)) {
      r.outcome = Outcome::Halt;
      r.value = std::move(h->value);
      return r;
    }
    if (auto* st = std::get_if<Stuck>(&s)) {
      r.outcome = Outcome::Stuck;
      r.reason = st->reason;
      return r;
    }
    r.trace.push_back(std::move(std::get<Conf>(s)));
    if (keep_logs) r.logs.push_back(std::move(log));
  }
  r.outcome = Outcome::FuelExhausted;
  return r;
}

}  // namespace pdcfa::concrete
