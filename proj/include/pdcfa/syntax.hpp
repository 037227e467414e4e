#pragma once

// Front end: s-expression reader, direct-style terms, and the labeled
// A-normal form consumed by the machines.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pdcfa/id.hpp"

namespace pdcfa {

struct Span {
  int line = 1;
  int column = 1;
  friend bool operator==(const Span&, const Span&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(Span span, const std::string& message);
  Span span() const { return span_; }

 private:
  Span span_;
};

class UnboundVariable : public std::runtime_error {
 public:
  UnboundVariable(std::string name, Span span);
  const std::string& name() const { return name_; }
  Span span() const { return span_; }

 private:
  std::string name_;
  Span span_;
};

struct SExpr {
  std::variant<std::string, std::vector<SExpr>> node;
  Span span;

  bool is_atom() const { return std::holds_alternative<std::string>(node); }
  const std::string& atom() const { return std::get<std::string>(node); }
  const std::vector<SExpr>& list() const { return std::get<std::vector<SExpr>>(node); }
};

std::vector<SExpr> read_sexprs(std::string_view text);

using Var = Id<struct VarTag>;

class VarTable {
 public:
  Var fresh(std::string name, bool let_bound);
  const std::string& name(Var v) const { return vars_[v.value].name; }
  bool let_bound(Var v) const { return vars_[v.value].let_bound; }
  std::size_t size() const { return vars_.size(); }
  /// Printable unique spelling, e.g. "x.3".
  std::string unique_name(Var v) const;

 private:
  struct Info {
    std::string name;
    bool let_bound;
  };
  std::vector<Info> vars_;
};

enum class PrimOp : std::uint8_t {
  Add,
  Sub,
  Mul,
  Quotient,
  Remainder,
  Le,
  Lt,
  NumEq,
  Not,
  Print,
};

std::string_view prim_name(PrimOp op);
int prim_arity(PrimOp op);
std::optional<PrimOp> prim_from_name(std::string_view name);

using Literal = std::variant<std::int64_t, bool>;

// ---------------------------------------------------------------------------
// Direct-style terms (scope-resolved, every binder a fresh Var)

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  struct Ref { Var var; };
  struct Lit { Literal value; };
  struct Prim { PrimOp op; };
  struct Lambda { Var param; TermPtr body; };
  struct App { TermPtr fun, arg; };
  struct If { TermPtr cond, then_branch, else_branch; };
  struct Let { Var var; TermPtr init, body; };
  struct LetRec {
    std::vector<std::pair<Var, TermPtr>> bindings;  // each bound to a Lambda
    TermPtr body;
  };
  struct Seq { TermPtr first, rest; };

  std::variant<Ref, Lit, Prim, Lambda, App, If, Let, LetRec, Seq> node;
  Span span;
};

struct Define {
  Var name;
  TermPtr lambda;
};

struct Program {
  VarTable vars;
  std::vector<Define> defines;
  TermPtr top;
};

Program parse_program(std::string_view text);

/// Identifiers occurring free in a direct-style term, spelled by source
/// name; primitive references count as free identifiers.
std::set<std::string> free_identifiers(const Program& p, const TermPtr& t);

// ---------------------------------------------------------------------------
// A-normal form

using Label = std::uint32_t;

struct Exp;
struct Lambda;

struct AExp {
  struct Ref { Var var; };
  struct Lit { Literal value; };
  struct PrimRef { PrimOp op; };
  std::variant<Ref, const Lambda*, Lit, PrimRef> node;
};

struct Call {
  AExp fun, arg;
  bool let_bound_callee = false;
};

struct Lambda {
  Label label;
  Var param;
  const Exp* body;
  std::vector<Var> free;  // sorted
};

struct Exp {
  struct Let1 {
    Var var;
    const Exp* call;  // a TailCall node, evaluated with the frame pushed
    const Exp* body;
  };
  struct TailCall { Call call; };
  struct Ret { AExp atom; };
  struct If { AExp cond; const Exp* then_branch; const Exp* else_branch; };
  struct LetRec {
    std::vector<std::pair<Var, const Lambda*>> bindings;
    const Exp* body;
  };

  Label label;
  std::variant<Let1, TailCall, Ret, If, LetRec> node;
};

std::string_view exp_kind_name(const Exp& e);

class AnfProgram {
 public:
  AnfProgram() = default;
  AnfProgram(AnfProgram&&) = default;
  AnfProgram& operator=(AnfProgram&&) = default;
  AnfProgram(const AnfProgram&) = delete;
  AnfProgram& operator=(const AnfProgram&) = delete;

  const Exp& root() const { return *root_; }
  const VarTable& vars() const { return vars_; }
  const Exp& exp(Label l) const { return *exps_[l]; }
  std::size_t exp_count() const { return exps_.size(); }
  const std::vector<std::unique_ptr<Lambda>>& lambdas() const { return lambdas_; }
  /// free_vars of exp(l), precomputed.
  const std::vector<Var>& free_of(Label l) const { return free_[l]; }

  /// Variables bound somewhere in the program (lambda params, let and
  /// letrec binders), in binder order.
  std::vector<Var> binders() const;

 private:
  friend class Normalizer;

  VarTable vars_;
  std::vector<std::unique_ptr<Exp>> exps_;
  std::vector<std::unique_ptr<Lambda>> lambdas_;
  std::vector<std::vector<Var>> free_;
  const Exp* root_ = nullptr;
};

AnfProgram normalize(const Program& p);

/// parse_program followed by normalize.
AnfProgram parse_anf(std::string_view text);

std::vector<Var> free_vars(const Exp& e);
std::vector<Var> free_vars(const AExp& a);

/// Deterministic, re-readable rendering of an ANF program.
std::string print_anf(const AnfProgram& p);

bool alpha_equivalent(const AnfProgram& a, const AnfProgram& b);

std::size_t count_let1(const Exp& e);

}  // namespace pdcfa
