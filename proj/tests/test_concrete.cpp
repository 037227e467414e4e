#include <algorithm>
#include <limits>

#include "doctest.h"
#include "pdcfa/concrete.hpp"
#include "util.hpp"

using namespace pdcfa;
using namespace pdcfa::concrete;

namespace {

std::int64_t int_result(const std::string& src) {
  AnfProgram p = parse_anf(src);
  RunResult r = run(p);
  REQUIRE(r.outcome == Outcome::Halt);
  REQUIRE(std::holds_alternative<std::int64_t>(*r.value));
  return std::get<std::int64_t>(*r.value);
}

}  // namespace

TEST_SUITE("concrete") {
  TEST_CASE("inject") {
    AnfProgram p = parse_anf(bench("fig1"));
    Conf c = inject(p.root());
    CHECK(c.exp == &p.root());
    CHECK(c.env.empty());
    CHECK(c.store.size() == 0);
    CHECK(c.kont == nullptr);
    CHECK(alloc(c) == 0);
  }

  TEST_CASE("identity applied to identity") {
    AnfProgram p = parse_anf("((lambda (x) x) (lambda (y) y))");
    Conf c0 = inject(p.root());
    StepResult s1 = step(p, c0);
    REQUIRE(std::holds_alternative<Conf>(s1));
    const Conf& c1 = std::get<Conf>(s1);
    CHECK(std::holds_alternative<Exp::Ret>(c1.exp->node));
    REQUIRE(c1.env.size() == 1);
    CHECK(c1.env[0].second == 0);
    CHECK(c1.store.size() == 1);
    CHECK(alloc(c1) == 1);
    StepResult s2 = step(p, c1);
    REQUIRE(std::holds_alternative<Halt>(s2));
    auto* clo = std::get_if<Closure>(&std::get<Halt>(s2).value);
    REQUIRE(clo);
    CHECK(p.vars().name(clo->lam->param) == "y");
    CHECK(run(p, 10).steps() <= 3);
  }

  TEST_CASE("fig1 evaluates to 36") {
    // (f 3) = 3! = 6; (g 4) = 16 + 9 + 4 + 1 = 30.
    CHECK(int_result(bench("fig1")) == 36);
  }

  TEST_CASE("arithmetic and recursion") {
    CHECK(int_result("(define (fact n) (if (<= n 1) 1 (* n (fact (- n 1))))) (fact 10)") == 3628800);
    CHECK(int_result("(quotient 17 5)") == 3);
    CHECK(int_result("(remainder 17 5)") == 2);
    CHECK(int_result("(let ((big 9223372036854775807)) (+ big 1))") ==
          std::numeric_limits<std::int64_t>::min());
  }

  TEST_CASE("booleans and derived forms") {
    AnfProgram p = parse_anf("(and (< 1 2) (or #f (= 3 3)))");
    RunResult r = run(p);
    REQUIRE(r.outcome == Outcome::Halt);
    CHECK(std::get<bool>(*r.value));
  }

  TEST_CASE("stuck configurations") {
    CHECK(run(parse_anf("(quotient 1 0)")).outcome == Outcome::Stuck);
    CHECK(run(parse_anf("(if 1 2 3)")).outcome == Outcome::Stuck);
    CHECK(run(parse_anf("(1 2)")).outcome == Outcome::Stuck);
    CHECK(run(parse_anf("(+ (lambda (x) x) 1)")).outcome == Outcome::Stuck);
  }

  TEST_CASE("divergence exhausts fuel") {
    AnfProgram p = parse_anf("((lambda (x) (x x)) (lambda (x) (x x)))");
    RunResult r = run(p, 100);
    CHECK(r.outcome == Outcome::FuelExhausted);
    CHECK(r.trace.size() == 101);
  }

  TEST_CASE("trace invariants") {
    for (const char* name : {"fig1", "mj09", "eta", "kcfa2", "kcfa3", "blur", "loop2", "sat"}) {
      CAPTURE(name);
      AnfProgram p = parse_anf(bench(name));
      RunResult r = run(p, kDefaultFuel, true);
      CHECK(r.outcome == Outcome::Halt);
      for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
        const Conf& a = r.trace[i];
        const Conf& b = r.trace[i + 1];
        long da = static_cast<long>(kont_depth(a.kont));
        long db = static_cast<long>(kont_depth(b.kont));
        CHECK(std::abs(da - db) <= 1);
        CHECK(b.store.size() >= a.store.size());
        for (const auto& ev : r.logs[i].allocs) CHECK(ev.addr >= a.store.size());
        for (const auto& [_, addr] : b.env) CHECK(addr < b.store.size());
      }
    }
  }

  TEST_CASE("collected addresses are closed under closure environments") {
    AnfProgram p = parse_anf(bench("fig1"));
    RunResult r = run(p);
    for (const Conf& c : r.trace) {
      std::vector<Addr> live = live_addrs(c);
      CHECK(std::is_sorted(live.begin(), live.end()));
      for (Addr a : live)
        if (auto* clo = std::get_if<Closure>(&c.store.at(a)))
          for (const auto& [_, b] : clo->env)
            CHECK(std::binary_search(live.begin(), live.end(), b));
    }
  }
}
