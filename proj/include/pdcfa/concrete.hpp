#pragma once

// Concrete CESK machine. Deterministic; used as the ground truth that the
// abstract analyses are checked against.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pdcfa/syntax.hpp"

namespace pdcfa::concrete {

using Addr = std::uint32_t;

/// Sorted by variable.
using Env = std::vector<std::pair<Var, Addr>>;

struct Closure {
  const Lambda* lam;
  Env env;
};

using Scalar = std::variant<std::int64_t, bool>;

struct PrimPartial {
  PrimOp op;
  std::vector<Scalar> args;
};

using Value = std::variant<Closure, std::int64_t, bool, PrimPartial>;

std::string show(const Value& v, const VarTable& vars);

/// Append-only store. Every configuration of one run shares the same
/// backing vector and sees the prefix [0, size).
class Store {
 public:
  Store() : data_(std::make_shared<std::vector<Value>>()) {}

  std::size_t size() const { return size_; }
  const Value& at(Addr a) const;
  /// 1 + max(dom), or 0 on the empty store.
  Addr next() const { return static_cast<Addr>(size_); }
  Store extend(std::vector<Value> values) const;

 private:
  std::shared_ptr<std::vector<Value>> data_;
  std::size_t size_ = 0;
};

struct Frame {
  Var var;
  const Exp* exp;
  Env env;
};

struct KNode;
using Kont = std::shared_ptr<const KNode>;
struct KNode {
  Frame frame;
  Kont next;
  std::size_t depth;
};

std::size_t kont_depth(const Kont& k);

struct Conf {
  const Exp* exp;
  Env env;
  Store store;
  Kont kont;
};

Conf inject(const Exp& e);

/// Addresses reachable from the environment and the continuation, sorted.
std::vector<Addr> live_addrs(const Conf& c);

Addr alloc(const Conf& c);

std::optional<Value> atomic_eval(const AExp& ae, const Env& env, const Store& store);

struct AllocEvent {
  Addr addr;
  Var var;
  Label site;           // label of the expression performing the binding
  bool let_bound_call;  // binding a parameter at a call whose callee was let-bound
};

/// What a step did, for harnesses that replay the allocation history.
struct StepLog {
  std::vector<AllocEvent> allocs;
  std::optional<Label> closure_call;  // label of a call that entered a closure
};

struct Halt {
  Value value;
};
struct Stuck {
  std::string reason;
};
using StepResult = std::variant<Conf, Halt, Stuck>;

StepResult step(const AnfProgram& prog, const Conf& c, StepLog* log = nullptr);

enum class Outcome { Halt, Stuck, FuelExhausted };

struct RunResult {
  std::vector<Conf> trace;
  std::vector<StepLog> logs;  // logs[i] describes trace[i] -> trace[i+1]
  Outcome outcome;
  std::optional<Value> value;
  std::string reason;
  std::size_t steps() const { return trace.size() - 1; }
};

inline constexpr std::size_t kDefaultFuel = 100000;

RunResult run(const AnfProgram& prog, std::size_t fuel = kDefaultFuel, bool keep_logs = false);

}  // namespace pdcfa::concrete
