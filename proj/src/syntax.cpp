#include "pdcfa/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace pdcfa {

namespace {

std::string format_span(Span s, const std::string& msg) {
  std::ostringstream os;
  os << s.line << ":" << s.column << ": " << msg;
  return os.str();
}

}  // namespace

ParseError::ParseError(Span span, const std::string& message)
    : std::runtime_error(format_span(span, message)), span_(span) {}

UnboundVariable::UnboundVariable(std::string name, Span span)
    : std::runtime_error(format_span(span, "unbound variable " + name)),
      name_(std::move(name)),
      span_(span) {}

// ---------------------------------------------------------------------------
// Reader

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  Span here() const { return {line_, col_}; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
           c == '[' || c == ']' || c == ';';
  }

  SExpr read() {
    Span start = here();
    char c = text_[pos_];
    if (c == '(' || c == '[') {
      advance();
      char close = c == '(' ? ')' : ']';
      std::vector<SExpr> items;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(start, "unbalanced parenthesis");
        char d = text_[pos_];
        if (d == ')' || d == ']') {
          if (d != close) throw ParseError(here(), "mismatched closing bracket");
          advance();
          break;
        }
        items.push_back(read());
      }
      return SExpr{std::move(items), start};
    }
    if (c == ')' || c == ']') throw ParseError(start, "unexpected closing bracket");
    if (c == '\'' || c == '"' || c == '`') {
      throw ParseError(start, "quotation and strings are not supported");
    }
    std::string atom;
    while (pos_ < text_.size() && !delimiter(text_[pos_])) atom.push_back(advance());
    return SExpr{std::move(atom), start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

// ---------------------------------------------------------------------------
// Variables and primitives

Var VarTable::fresh(std::string name, bool let_bound) {
  Var v(static_cast<std::uint32_t>(vars_.size()));
  vars_.push_back({std::move(name), let_bound});
  return v;
}

std::string VarTable::unique_name(Var v) const {
  return name(v) + "." + std::to_string(v.value);
}

namespace {

struct PrimInfo {
  PrimOp op;
  std::string_view name;
  int arity;
};

constexpr PrimInfo kPrims[] = {
    {PrimOp::Add, "+", 2},         {PrimOp::Sub, "-", 2},
    {PrimOp::Mul, "*", 2},         {PrimOp::Quotient, "quotient", 2},
    {PrimOp::Remainder, "remainder", 2},
    {PrimOp::Le, "<=", 2},         {PrimOp::Lt, "<", 2},
    {PrimOp::NumEq, "=", 2},       {PrimOp::Not, "not", 1},
    {PrimOp::Print, "print", 1},
};

}  // namespace

std::string_view prim_name(PrimOp op) { return kPrims[static_cast<int>(op)].name; }
int prim_arity(PrimOp op) { return kPrims[static_cast<int>(op)].arity; }

std::optional<PrimOp> prim_from_name(std::string_view name) {
  for (const auto& p : kPrims)
    if (p.name == name) return p.op;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Desugaring and scope resolution

namespace {

bool is_keyword(std::string_view s) {
  static const char* kws[] = {"define", "lambda", "let",  "let*", "letrec", "if",
                              "cond",   "else",   "and",  "or",   "begin"};
  return std::any_of(std::begin(kws), std::end(kws), [&](const char* k) { return s == k; });
}

bool head_is(const SExpr& s, std::string_view kw) {
  return !s.is_atom() && !s.list().empty() && s.list()[0].is_atom() && s.list()[0].atom() == kw;
}

std::optional<Literal> parse_literal(const std::string& a) {
  if (a == "#t" || a == "#true") return Literal{true};
  if (a == "#f" || a == "#false") return Literal{false};
  std::int64_t v = 0;
  const char* first = a.data();
  const char* last = a.data() + a.size();
  if (!a.empty() && a[0] == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec == std::errc() && p == last && first != last) return Literal{v};
  return std::nullopt;
}

class Scope {
 public:
  const Scope* parent = nullptr;
  std::map<std::string, Var, std::less<>> names;

  std::optional<Var> lookup(std::string_view n) const {
    for (const Scope* s = this; s; s = s->parent) {
      auto it = s->names.find(n);
      if (it != s->names.end()) return it->second;
    }
    return std::nullopt;
  }
};

class Desugarer {
 public:
  explicit Desugarer(VarTable& vars) : vars_(vars) {}

  TermPtr expr(const SExpr& s, const Scope& scope) {
    if (s.is_atom()) return atom(s, scope);
    const auto& xs = s.list();
    if (xs.empty()) throw ParseError(s.span, "empty application");
    if (xs[0].is_atom()) {
      const std::string& h = xs[0].atom();
      bool shadowed = scope.lookup(h).has_value();
      if (!shadowed && is_keyword(h)) return special(h, s, scope);
    }
    // Curried application; (f) passes #f to a nullary function.
    TermPtr f = expr(xs[0], scope);
    if (xs.size() == 1) return make(Term::App{f, make(Term::Lit{false}, s.span)}, s.span);
    for (std::size_t i = 1; i < xs.size(); ++i) f = make(Term::App{f, expr(xs[i], scope)}, s.span);
    return f;
  }

  /// Body of a lambda/let: leading internal defines become a letrec group,
  /// the remaining expressions are sequenced.
  TermPtr body(const std::vector<SExpr>& forms, std::size_t from, Span span,
               const Scope& scope) {
    if (from >= forms.size()) throw ParseError(span, "empty body");
    std::size_t i = from;
    std::vector<const SExpr*> defs;
    while (i < forms.size() && head_is(forms[i], "define")) defs.push_back(&forms[i++]);
    if (i >= forms.size()) throw ParseError(span, "body has no expression");
    if (defs.empty()) return sequence(forms, i, scope);
    Scope inner{&scope, {}};
    auto bindings = define_group(defs, inner);
    return make(Term::LetRec{std::move(bindings), sequence(forms, i, inner)}, span);
  }

  /// Binds every define name in `scope`, then desugars the right-hand sides.
  std::vector<std::pair<Var, TermPtr>> define_group(const std::vector<const SExpr*>& defs,
                                                    Scope& scope) {
    std::vector<std::pair<Var, const SExpr*>> pending;
    std::vector<std::pair<std::string, SExpr>> lambdas;
    for (const SExpr* d : defs) {
      const auto& xs = d->list();
      if (xs.size() < 3) throw ParseError(d->span, "malformed define");
      std::string name;
      SExpr lam;
      if (xs[1].is_atom()) {
        name = xs[1].atom();
        if (xs.size() != 3 || !head_is(xs[2], "lambda"))
          throw ParseError(d->span, "define must bind a lambda");
        lam = xs[2];
      } else {
        const auto& sig = xs[1].list();
        if (sig.empty() || !sig[0].is_atom()) throw ParseError(xs[1].span, "malformed define");
        name = sig[0].atom();
        std::vector<SExpr> lam_forms;
        lam_forms.push_back(SExpr{std::string("lambda"), d->span});
        lam_forms.push_back(SExpr{std::vector<SExpr>(sig.begin() + 1, sig.end()), xs[1].span});
        for (std::size_t k = 2; k < xs.size(); ++k) lam_forms.push_back(xs[k]);
        lam = SExpr{std::move(lam_forms), d->span};
      }
      if (scope.names.count(name)) throw ParseError(d->span, "duplicate define " + name);
      check_binder_name(name, d->span);
      Var v = vars_.fresh(name, true);
      scope.names.emplace(name, v);
      lambdas.emplace_back(name, std::move(lam));
      pending.emplace_back(v, nullptr);
    }
    std::vector<std::pair<Var, TermPtr>> out;
    for (std::size_t k = 0; k < pending.size(); ++k)
      out.emplace_back(pending[k].first, expr(lambdas[k].second, scope));
    return out;
  }

 private:
  template <class Node>
  TermPtr make(Node n, Span span) {
    return std::make_shared<const Term>(Term{std::move(n), span});
  }

  void check_binder_name(const std::string& name, Span span) {
    if (is_keyword(name)) throw ParseError(span, "cannot bind keyword " + name);
    if (parse_literal(name)) throw ParseError(span, "cannot bind literal " + name);
  }

  TermPtr atom(const SExpr& s, const Scope& scope) {
    const std::string& a = s.atom();
    if (auto v = scope.lookup(a)) return make(Term::Ref{*v}, s.span);
    if (auto lit = parse_literal(a)) return make(Term::Lit{*lit}, s.span);
    if (auto p = prim_from_name(a)) return make(Term::Prim{*p}, s.span);
    if (is_keyword(a)) throw ParseError(s.span, "misplaced keyword " + a);
    throw UnboundVariable(a, s.span);
  }

  TermPtr sequence(const std::vector<SExpr>& forms, std::size_t from, const Scope& scope) {
    TermPtr last = expr(forms.back(), scope);
    for (std::size_t i = forms.size() - 1; i-- > from;) {
      last = make(Term::Seq{expr(forms[i], scope), last}, forms[i].span);
    }
    return last;
  }

  TermPtr lambda(const SExpr& s, const Scope& scope) {
    const auto& xs = s.list();
    if (xs.size() < 3 || xs[1].is_atom()) throw ParseError(s.span, "malformed lambda");
    std::vector<std::string> params;
    for (const auto& p : xs[1].list()) {
      if (!p.is_atom()) throw ParseError(p.span, "parameter must be an identifier");
      check_binder_name(p.atom(), p.span);
      params.push_back(p.atom());
    }
    // Curried: (lambda (a b) e) = (lambda (a) (lambda (b) e)); nullary
    // lambdas take an ignored parameter.
    if (params.empty()) params.push_back("_");
    std::vector<Scope> scopes(params.size());
    std::vector<Var> vars;
    const Scope* parent = &scope;
    for (std::size_t i = 0; i < params.size(); ++i) {
      scopes[i].parent = parent;
      Var v = vars_.fresh(params[i], false);
      scopes[i].names.emplace(params[i], v);
      vars.push_back(v);
      parent = &scopes[i];
    }
    TermPtr b = body(xs, 2, s.span, scopes.back());
    for (std::size_t i = vars.size(); i-- > 0;) b = make(Term::Lambda{vars[i], b}, s.span);
    return b;
  }

  std::vector<std::pair<std::string, const SExpr*>> let_bindings(const SExpr& s) {
    const auto& xs = s.list();
    if (xs.size() < 3 || xs[1].is_atom()) throw ParseError(s.span, "malformed let");
    std::vector<std::pair<std::string, const SExpr*>> out;
    for (const auto& b : xs[1].list()) {
      if (b.is_atom() || b.list().size() != 2 || !b.list()[0].is_atom())
        throw ParseError(b.span, "malformed binding");
      check_binder_name(b.list()[0].atom(), b.span);
      out.emplace_back(b.list()[0].atom(), &b.list()[1]);
    }
    return out;
  }

  TermPtr special(const std::string& h, const SExpr& s, const Scope& scope) {
    const auto& xs = s.list();
    if (h == "lambda") return lambda(s, scope);
    if (h == "if") {
      if (xs.size() != 4) throw ParseError(s.span, "if takes three operands");
      return make(Term::If{expr(xs[1], scope), expr(xs[2], scope), expr(xs[3], scope)}, s.span);
    }
    if (h == "cond") return cond(xs, 1, s.span, scope);
    if (h == "and") {
      if (xs.size() == 1) return make(Term::Lit{true}, s.span);
      return conj(xs, 1, scope);
    }
    if (h == "or") {
      if (xs.size() == 1) return make(Term::Lit{false}, s.span);
      return disj(xs, 1, scope);
    }
    if (h == "begin") {
      if (xs.size() < 2) throw ParseError(s.span, "empty begin");
      return sequence(xs, 1, scope);
    }
    if (h == "let") {
      auto bs = let_bindings(s);
      Scope inner{&scope, {}};
      std::vector<std::pair<Var, TermPtr>> inits;
      for (const auto& [name, init] : bs) {
        if (inner.names.count(name)) throw ParseError(s.span, "duplicate let binder " + name);
        Var v = vars_.fresh(name, true);
        inits.emplace_back(v, expr(*init, scope));
        inner.names.emplace(name, v);
      }
      TermPtr b = body(xs, 2, s.span, inner);
      for (std::size_t i = inits.size(); i-- > 0;)
        b = make(Term::Let{inits[i].first, inits[i].second, b}, s.span);
      return b;
    }
    if (h == "let*") {
      auto bs = let_bindings(s);
      std::vector<Scope> scopes(bs.size());
      std::vector<std::pair<Var, TermPtr>> inits;
      const Scope* parent = &scope;
      for (std::size_t i = 0; i < bs.size(); ++i) {
        Var v = vars_.fresh(bs[i].first, true);
        inits.emplace_back(v, expr(*bs[i].second, *parent));
        scopes[i].parent = parent;
        scopes[i].names.emplace(bs[i].first, v);
        parent = &scopes[i];
      }
      TermPtr b = body(xs, 2, s.span, *parent);
      for (std::size_t i = inits.size(); i-- > 0;)
        b = make(Term::Let{inits[i].first, inits[i].second, b}, s.span);
      return b;
    }
    if (h == "letrec" || h == "letrec*") {
      auto bs = let_bindings(s);
      std::vector<SExpr> defs_storage;
      for (const auto& [name, init] : bs) {
        if (!head_is(*init, "lambda")) throw ParseError(init->span, "letrec must bind lambdas");
        defs_storage.push_back(SExpr{std::vector<SExpr>{SExpr{std::string("define"), s.span},
                                                        SExpr{name, s.span}, *init},
                                     s.span});
      }
      std::vector<const SExpr*> defs;
      for (const auto& d : defs_storage) defs.push_back(&d);
      Scope inner{&scope, {}};
      auto bindings = define_group(defs, inner);
      return make(Term::LetRec{std::move(bindings), body(xs, 2, s.span, inner)}, s.span);
    }
    throw ParseError(s.span, "unexpected form " + h);
  }

  TermPtr cond(const std::vector<SExpr>& xs, std::size_t i, Span span, const Scope& scope) {
    if (i >= xs.size()) throw ParseError(span, "cond without else clause");
    const SExpr& clause = xs[i];
    if (clause.is_atom() || clause.list().size() < 2)
      throw ParseError(clause.span, "malformed cond clause");
    const auto& cl = clause.list();
    if (cl[0].is_atom() && cl[0].atom() == "else" && !scope.lookup("else")) {
      if (i + 1 != xs.size()) throw ParseError(clause.span, "else must be the last clause");
      return sequence(cl, 1, scope);
    }
    TermPtr test = expr(cl[0], scope);
    TermPtr then = sequence(cl, 1, scope);
    return make(Term::If{test, then, cond(xs, i + 1, span, scope)}, clause.span);
  }

  TermPtr conj(const std::vector<SExpr>& xs, std::size_t i, const Scope& scope) {
    TermPtr first = expr(xs[i], scope);
    if (i + 1 == xs.size()) return first;
    return make(Term::If{first, conj(xs, i + 1, scope), make(Term::Lit{false}, xs[i].span)},
                xs[i].span);
  }

  TermPtr disj(const std::vector<SExpr>& xs, std::size_t i, const Scope& scope) {
    TermPtr first = expr(xs[i], scope);
    if (i + 1 == xs.size()) return first;
    Var t = vars_.fresh("or", true);
    TermPtr ref = make(Term::Ref{t}, xs[i].span);
    return make(Term::Let{t, first, make(Term::If{ref, ref, disj(xs, i + 1, scope)}, xs[i].span)},
                xs[i].span);
  }

  VarTable& vars_;
};

void collect_free(const Program& p, const TermPtr& t, std::set<Var>& bound,
                  std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Term::Ref>) {
          if (!bound.count(n.var)) out.insert(p.vars.name(n.var));
        } else if constexpr (std::is_same_v<N, Term::Prim>) {
          out.insert(std::string(prim_name(n.op)));
        } else if constexpr (std::is_same_v<N, Term::Lambda>) {
          bool added = bound.insert(n.param).second;
          collect_free(p, n.body, bound, out);
          if (added) bound.erase(n.param);
        } else if constexpr (std::is_same_v<N, Term::App>) {
          collect_free(p, n.fun, bound, out);
          collect_free(p, n.arg, bound, out);
        } else if constexpr (std::is_same_v<N, Term::If>) {
          collect_free(p, n.cond, bound, out);
          collect_free(p, n.then_branch, bound, out);
          collect_free(p, n.else_branch, bound, out);
        } else if constexpr (std::is_same_v<N, Term::Let>) {
          collect_free(p, n.init, bound, out);
          bool added = bound.insert(n.var).second;
          collect_free(p, n.body, bound, out);
          if (added) bound.erase(n.var);
        } else if constexpr (std::is_same_v<N, Term::LetRec>) {
          std::vector<Var> added;
          for (const auto& [v, _] : n.bindings)
            if (bound.insert(v).second) added.push_back(v);
          for (const auto& [_, l] : n.bindings) collect_free(p, l, bound, out);
          collect_free(p, n.body, bound, out);
          for (Var v : added) bound.erase(v);
        } else if constexpr (std::is_same_v<N, Term::Seq>) {
          collect_free(p, n.first, bound, out);
          collect_free(p, n.rest, bound, out);
        }
      },
      t->node);
}

}  // namespace

Program parse_program(std::string_view text) {
  std::vector<SExpr> forms = read_sexprs(text);
  Program p;
  Desugarer d(p.vars);
  Scope top;
  std::vector<const SExpr*> defs;
  std::vector<SExpr> exprs;
  for (const auto& f : forms) {
    if (head_is(f, "define")) {
      if (!exprs.empty()) throw ParseError(f.span, "define after top-level expression");
      defs.push_back(&f);
    } else {
      exprs.push_back(f);
    }
  }
  if (exprs.empty()) throw ParseError(Span{}, "program has no top-level expression");
  for (auto& [v, lam] : d.define_group(defs, top)) p.defines.push_back({v, lam});
  p.top = d.body(exprs, 0, exprs.front().span, top);
  return p;
}

std::set<std::string> free_identifiers(const Program& p, const TermPtr& t) {
  std::set<Var> bound;
  std::set<std::string> out;
  collect_free(p, t, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// A-normalization

std::string_view exp_kind_name(const Exp& e) {
  static constexpr std::string_view names[] = {"let", "call", "ret", "if", "letrec"};
  return names[e.node.index()];
}

class Normalizer {
 public:
  using Cont = std::function<const Exp*(AExp)>;
  using Rest = std::function<const Exp*()>;

  explicit Normalizer(const Program& p) { out_.vars_ = p.vars; }

  AnfProgram run(const Program& p) {
    const Exp* root;
    if (p.defines.empty()) {
      root = tail(p.top);
    } else {
      std::vector<std::pair<Var, const Lambda*>> bs;
      for (const auto& d : p.defines) bs.emplace_back(d.name, lambda(d.lambda));
      root = make(Exp::LetRec{std::move(bs), tail(p.top)});
    }
    out_.root_ = root;
    for (const auto& e : out_.exps_) out_.free_.push_back(free_vars(*e));
    return std::move(out_);
  }

 private:
  const Exp* make(decltype(Exp::node) node) {
    auto e = std::make_unique<Exp>(Exp{static_cast<Label>(out_.exps_.size()), std::move(node)});
    const Exp* raw = e.get();
    out_.exps_.push_back(std::move(e));
    return raw;
  }

  const Lambda* lambda(const TermPtr& t) {
    const auto& l = std::get<Term::Lambda>(t->node);
    const Exp* body = tail(l.body);
    std::vector<Var> fv = free_vars(*body);
    fv.erase(std::remove(fv.begin(), fv.end(), l.param), fv.end());
    auto lam = std::make_unique<Lambda>(
        Lambda{static_cast<Label>(out_.lambdas_.size()), l.param, body, std::move(fv)});
    const Lambda* raw = lam.get();
    out_.lambdas_.push_back(std::move(lam));
    return raw;
  }

  Call call(AExp f, AExp a) {
    bool let_bound = false;
    if (auto* r = std::get_if<AExp::Ref>(&f.node)) let_bound = out_.vars_.let_bound(r->var);
    return Call{f, a, let_bound};
  }

  static bool is_atomic(const TermPtr& t) {
    return std::holds_alternative<Term::Ref>(t->node) ||
           std::holds_alternative<Term::Lit>(t->node) ||
           std::holds_alternative<Term::Prim>(t->node) ||
           std::holds_alternative<Term::Lambda>(t->node);
  }

  AExp atomic(const TermPtr& t) {
    if (auto* r = std::get_if<Term::Ref>(&t->node)) return AExp{AExp::Ref{r->var}};
    if (auto* l = std::get_if<Term::Lit>(&t->node)) return AExp{AExp::Lit{l->value}};
    if (auto* p = std::get_if<Term::Prim>(&t->node)) return AExp{AExp::PrimRef{p->op}};
    return AExp{lambda(t)};
  }

  const Exp* as_atom(const TermPtr& t, const Cont& k) {
    if (is_atomic(t)) return k(atomic(t));
    Var tmp = out_.vars_.fresh("t", true);
    return bind(tmp, t, [&] { return k(AExp{AExp::Ref{tmp}}); });
  }

  const Exp* bind(Var v, const TermPtr& t, const Rest& rest) {
    return std::visit(
        [&](const auto& n) -> const Exp* {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Term::App>) {
            return as_atom(n.fun, [&](AExp f) {
              return as_atom(n.arg, [&](AExp a) {
                const Exp* c = make(Exp::TailCall{call(f, a)});
                const Exp* body = rest();
                return make(Exp::Let1{v, c, body});
              });
            });
          } else if constexpr (std::is_same_v<N, Term::Let>) {
            return bind(n.var, n.init, [&] { return bind(v, n.body, rest); });
          } else if constexpr (std::is_same_v<N, Term::Seq>) {
            Var ignored = out_.vars_.fresh("_", true);
            return bind(ignored, n.first, [&] { return bind(v, n.rest, rest); });
          } else if constexpr (std::is_same_v<N, Term::LetRec>) {
            std::vector<std::pair<Var, const Lambda*>> bs;
            for (const auto& [bv, l] : n.bindings) bs.emplace_back(bv, lambda(l));
            const Exp* body = bind(v, n.body, rest);
            return make(Exp::LetRec{std::move(bs), body});
          } else if constexpr (std::is_same_v<N, Term::If>) {
            // Join point: ((lambda (_) (if ...)) #f) evaluated as a non-tail call.
            Var dummy = out_.vars_.fresh("_", false);
            const Exp* inner = tail(t);
            std::vector<Var> fv = free_vars(*inner);
            auto lam = std::make_unique<Lambda>(
                Lambda{static_cast<Label>(out_.lambdas_.size()), dummy, inner, std::move(fv)});
            const Lambda* raw = lam.get();
            out_.lambdas_.push_back(std::move(lam));
            const Exp* c = make(Exp::TailCall{call(AExp{raw}, AExp{AExp::Lit{false}})});
            const Exp* body = rest();
            return make(Exp::Let1{v, c, body});
          } else {
            // Atomic right-hand side: ((lambda (v) rest) atom) in tail position.
            AExp a = atomic(t);
            const Exp* body = rest();
            std::vector<Var> fv = free_vars(*body);
            fv.erase(std::remove(fv.begin(), fv.end(), v), fv.end());
            auto lam = std::make_unique<Lambda>(
                Lambda{static_cast<Label>(out_.lambdas_.size()), v, body, std::move(fv)});
            const Lambda* raw = lam.get();
            out_.lambdas_.push_back(std::move(lam));
            return make(Exp::TailCall{call(AExp{raw}, a)});
          }
        },
        t->node);
  }

  const Exp* tail(const TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> const Exp* {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Term::App>) {
            return as_atom(n.fun, [&](AExp f) {
              return as_atom(n.arg, [&](AExp a) { return make(Exp::TailCall{call(f, a)}); });
            });
          } else if constexpr (std::is_same_v<N, Term::If>) {
            return as_atom(n.cond, [&](AExp c) {
              const Exp* th = tail(n.then_branch);
              const Exp* el = tail(n.else_branch);
              return make(Exp::If{c, th, el});
            });
          } else if constexpr (std::is_same_v<N, Term::Let>) {
            return bind(n.var, n.init, [&] { return tail(n.body); });
          } else if constexpr (std::is_same_v<N, Term::Seq>) {
            Var ignored = out_.vars_.fresh("_", true);
            return bind(ignored, n.first, [&] { return tail(n.rest); });
          } else if constexpr (std::is_same_v<N, Term::LetRec>) {
            std::vector<std::pair<Var, const Lambda*>> bs;
            for (const auto& [bv, l] : n.bindings) bs.emplace_back(bv, lambda(l));
            const Exp* body = tail(n.body);
            return make(Exp::LetRec{std::move(bs), body});
          } else {
            return make(Exp::Ret{atomic(t)});
          }
        },
        t->node);
  }

  AnfProgram out_;
};

AnfProgram normalize(const Program& p) { return Normalizer(p).run(p); }

AnfProgram parse_anf(std::string_view text) { return normalize(parse_program(text)); }

std::vector<Var> AnfProgram::binders() const {
  std::vector<Var> out;
  std::function<void(const Exp&)> walk = [&](const Exp& e) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          auto walk_atom = [&](const AExp& a) {
            if (auto* l = std::get_if<const Lambda*>(&a.node)) {
              out.push_back((*l)->param);
              walk(*(*l)->body);
            }
          };
          if constexpr (std::is_same_v<N, Exp::Let1>) {
            out.push_back(n.var);
            walk(*n.call);
            walk(*n.body);
          } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
            walk_atom(n.call.fun);
            walk_atom(n.call.arg);
          } else if constexpr (std::is_same_v<N, Exp::Ret>) {
            walk_atom(n.atom);
          } else if constexpr (std::is_same_v<N, Exp::If>) {
            walk_atom(n.cond);
            walk(*n.then_branch);
            walk(*n.else_branch);
          } else if constexpr (std::is_same_v<N, Exp::LetRec>) {
            for (const auto& [v, l] : n.bindings) {
              out.push_back(v);
              out.push_back(l->param);
              walk(*l->body);
            }
            walk(*n.body);
          }
        },
        e.node);
  };
  walk(root());
  return out;
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void insert_sorted(std::vector<Var>& xs, Var v) {
  auto it = std::lower_bound(xs.begin(), xs.end(), v);
  if (it == xs.end() || *it != v) xs.insert(it, v);
}

void merge_into(std::vector<Var>& acc, const std::vector<Var>& more) {
  for (Var v : more) insert_sorted(acc, v);
}

void erase_var(std::vector<Var>& xs, Var v) {
  auto it = std::lower_bound(xs.begin(), xs.end(), v);
  if (it != xs.end() && *it == v) xs.erase(it);
}

}  // namespace

std::vector<Var> free_vars(const AExp& a) {
  if (auto* r = std::get_if<AExp::Ref>(&a.node)) return {r->var};
  if (auto* l = std::get_if<const Lambda*>(&a.node)) return (*l)->free;
  return {};
}

std::vector<Var> free_vars(const Exp& e) {
  return std::visit(
      [&](const auto& n) -> std::vector<Var> {
        using N = std::decay_t<decltype(n)>;
        std::vector<Var> out;
        if constexpr (std::is_same_v<N, Exp::Let1>) {
          out = free_vars(*n.body);
          erase_var(out, n.var);
          merge_into(out, free_vars(*n.call));
        } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
          out = free_vars(n.call.fun);
          merge_into(out, free_vars(n.call.arg));
        } else if constexpr (std::is_same_v<N, Exp::Ret>) {
          out = free_vars(n.atom);
        } else if constexpr (std::is_same_v<N, Exp::If>) {
          out = free_vars(n.cond);
          merge_into(out, free_vars(*n.then_branch));
          merge_into(out, free_vars(*n.else_branch));
        } else if constexpr (std::is_same_v<N, Exp::LetRec>) {
          out = free_vars(*n.body);
          for (const auto& [_, l] : n.bindings) merge_into(out, l->free);
          for (const auto& [v, _] : n.bindings) erase_var(out, v);
        }
        return out;
      },
      e.node);
}

std::size_t count_let1(const Exp& e) {
  std::size_t n = 0;
  std::function<void(const Exp&)> walk;
  auto walk_atom = [&](const AExp& a) {
    if (auto* l = std::get_if<const Lambda*>(&a.node)) walk(*(*l)->body);
  };
  walk = [&](const Exp& x) {
    std::visit(
        [&](const auto& node) {
          using N = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<N, Exp::Let1>) {
            ++n;
            walk(*node.call);
            walk(*node.body);
          } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
            walk_atom(node.call.fun);
            walk_atom(node.call.arg);
          } else if constexpr (std::is_same_v<N, Exp::Ret>) {
            walk_atom(node.atom);
          } else if constexpr (std::is_same_v<N, Exp::If>) {
            walk_atom(node.cond);
            walk(*node.then_branch);
            walk(*node.else_branch);
          } else if constexpr (std::is_same_v<N, Exp::LetRec>) {
            for (const auto& [_, l] : node.bindings) walk(*l->body);
            walk(*node.body);
          }
        },
        x.node);
  };
  walk(e);
  return n;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

class Printer {
 public:
  explicit Printer(const VarTable& vars) : vars_(vars) {}

  void exp(const Exp& e, int indent) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Exp::Let1>) {
            os_ << "(let ((" << vars_.unique_name(n.var) << " ";
            call(std::get<Exp::TailCall>(n.call->node).call, indent + 4);
            os_ << "))";
            newline(indent + 2);
            exp(*n.body, indent + 2);
            os_ << ")";
          } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
            call(n.call, indent);
          } else if constexpr (std::is_same_v<N, Exp::Ret>) {
            atom(n.atom, indent);
          } else if constexpr (std::is_same_v<N, Exp::If>) {
            os_ << "(if ";
            atom(n.cond, indent + 4);
            newline(indent + 4);
            exp(*n.then_branch, indent + 4);
            newline(indent + 4);
            exp(*n.else_branch, indent + 4);
            os_ << ")";
          } else if constexpr (std::is_same_v<N, Exp::LetRec>) {
            os_ << "(letrec (";
            bool first = true;
            for (const auto& [v, l] : n.bindings) {
              if (!first) newline(indent + 9);
              first = false;
              os_ << "(" << vars_.unique_name(v) << " ";
              lambda(*l, indent + 10);
              os_ << ")";
            }
            os_ << ")";
            newline(indent + 2);
            exp(*n.body, indent + 2);
            os_ << ")";
          }
        },
        e.node);
  }

  std::string str() const { return os_.str(); }

 private:
  void newline(int indent) { os_ << "\n" << std::string(static_cast<std::size_t>(indent), ' '); }

  void call(const Call& c, int indent) {
    os_ << "(";
    atom(c.fun, indent + 1);
    os_ << " ";
    atom(c.arg, indent + 2);
    os_ << ")";
  }

  void lambda(const Lambda& l, int indent) {
    os_ << "(lambda (" << vars_.unique_name(l.param) << ")";
    newline(indent + 2);
    exp(*l.body, indent + 2);
    os_ << ")";
  }

  void atom(const AExp& a, int indent) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, AExp::Ref>) {
            os_ << vars_.unique_name(n.var);
          } else if constexpr (std::is_same_v<N, AExp::Lit>) {
            if (auto* b = std::get_if<bool>(&n.value))
              os_ << (*b ? "#t" : "#f");
            else
              os_ << std::get<std::int64_t>(n.value);
          } else if constexpr (std::is_same_v<N, AExp::PrimRef>) {
            os_ << prim_name(n.op);
          } else {
            lambda(*n, indent);
          }
        },
        a.node);
  }

  const VarTable& vars_;
  std::ostringstream os_;
};

class AlphaEq {
 public:
  AlphaEq(const AnfProgram& a, const AnfProgram& b) : a_(a), b_(b) {}

  bool exp(const Exp& x, const Exp& y) {
    if (x.node.index() != y.node.index()) return false;
    return std::visit(
        [&](const auto& n) -> bool {
          using N = std::decay_t<decltype(n)>;
          const auto& m = std::get<N>(y.node);
          if constexpr (std::is_same_v<N, Exp::Let1>) {
            return exp(*n.call, *m.call) && bind(n.var, m.var) && exp(*n.body, *m.body);
          } else if constexpr (std::is_same_v<N, Exp::TailCall>) {
            return atom(n.call.fun, m.call.fun) && atom(n.call.arg, m.call.arg);
          } else if constexpr (std::is_same_v<N, Exp::Ret>) {
            return atom(n.atom, m.atom);
          } else if constexpr (std::is_same_v<N, Exp::If>) {
            return atom(n.cond, m.cond) && exp(*n.then_branch, *m.then_branch) &&
                   exp(*n.else_branch, *m.else_branch);
          } else {
            if (n.bindings.size() != m.bindings.size()) return false;
            for (std::size_t i = 0; i < n.bindings.size(); ++i)
              if (!bind(n.bindings[i].first, m.bindings[i].first)) return false;
            for (std::size_t i = 0; i < n.bindings.size(); ++i)
              if (!lambda(*n.bindings[i].second, *m.bindings[i].second)) return false;
            return exp(*n.body, *m.body);
          }
        },
        x.node);
  }

 private:
  bool bind(Var x, Var y) {
    auto [it, inserted] = map_.emplace(x.value, y.value);
    return inserted ? true : it->second == y.value;
  }

  bool lambda(const Lambda& x, const Lambda& y) {
    return bind(x.param, y.param) && exp(*x.body, *y.body);
  }

  bool atom(const AExp& x, const AExp& y) {
    if (x.node.index() != y.node.index()) return false;
    if (auto* r = std::get_if<AExp::Ref>(&x.node)) {
      auto it = map_.find(r->var.value);
      return it != map_.end() && it->second == std::get<AExp::Ref>(y.node).var.value;
    }
    if (auto* l = std::get_if<AExp::Lit>(&x.node)) return l->value == std::get<AExp::Lit>(y.node).value;
    if (auto* p = std::get_if<AExp::PrimRef>(&x.node)) return p->op == std::get<AExp::PrimRef>(y.node).op;
    return lambda(*std::get<const Lambda*>(x.node), *std::get<const Lambda*>(y.node));
  }

  const AnfProgram& a_;
  const AnfProgram& b_;
  std::unordered_map<std::uint32_t, std::uint32_t> map_;
};

}  // namespace

std::string print_anf(const AnfProgram& p) {
  Printer pr(p.vars());
  pr.exp(p.root(), 0);
  return pr.str() + "\n";
}

bool alpha_equivalent(const AnfProgram& a, const AnfProgram& b) {
  return AlphaEq(a, b).exp(a.root(), b.root());
}

}  // namespace pdcfa
