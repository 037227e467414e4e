#include "doctest.h"
#include "pdcfa/abstract.hpp"
#include "util.hpp"

using namespace pdcfa;

namespace {

const char* const kBench[] = {"fig1", "mj09", "eta", "kcfa2", "kcfa3", "blur", "loop2", "sat"};

AVal int_top() {
  AVal v{AVal::Kind::Scalar};
  v.scalar = AScalar::IntTop;
  return v;
}

}  // namespace

TEST_SUITE("abstract") {
  TEST_CASE("k maps to a policy") {
    CHECK(AllocPolicy::from_k(0) == AllocPolicy::mono());
    CHECK(AllocPolicy::from_k(1) == AllocPolicy::one_cfa());
    CHECK(AllocPolicy::from_k(2) == AllocPolicy::kcfa(2));
    CHECK(AllocPolicy::from_k(0).name() == "0cfa");
    CHECK(AllocPolicy::from_k(1).name() == "1cfa");
  }

  TEST_CASE("allocation by policy") {
    AnfProgram p = parse_anf("((lambda (x) x) 1)");
    Var x = p.binders().front();
    Interner in;
    AbstractMachine mono(p, AllocPolicy::mono(), in);
    CHECK(mono.aalloc(x, 3, in.empty_ctx(), false) == mono.aalloc(x, 7, in.empty_ctx(), false));
    AbstractMachine one(p, AllocPolicy::one_cfa(), in);
    CHECK(one.aalloc(x, 3, in.empty_ctx(), false) != one.aalloc(x, 7, in.empty_ctx(), false));
    CHECK(in.addr(one.aalloc(x, 3, in.empty_ctx(), false)).site == 3);
    AbstractMachine two(p, AllocPolicy::kcfa(2), in);
    CtxId c = two.push_ctx(two.push_ctx(two.push_ctx(in.empty_ctx(), 1), 2), 3);
    CHECK(in.ctx(c) == Ctx{3, 2});
    CHECK(mono.push_ctx(in.empty_ctx(), 5) == in.empty_ctx());
  }

  TEST_CASE("interned lattice operations") {
    AnfProgram p = parse_anf("((lambda (x) x) 1)");
    Var x = p.binders().front();
    Interner in;
    AddrId a = in.addr({x, kNoLabel, in.empty_ctx()});
    ValSetId top = in.singleton(in.val(int_top()));
    AVal t{AVal::Kind::Scalar};
    t.scalar = AScalar::True;
    ValSetId tru = in.singleton(in.val(t));
    StoreId s1 = in.store_join(in.empty_store(), a, top);
    StoreId s2 = in.store_join(s1, a, tru);
    CHECK(in.store_leq(in.empty_store(), s1));
    CHECK(in.store_leq(s1, s2));
    CHECK_FALSE(in.store_leq(s2, s1));
    CHECK(in.store_join(s2, s1) == s2);
    CHECK(in.valset(in.store_get(s2, a)).size() == 2);
    CHECK(in.valset_union(top, tru) == in.valset_union(tru, top));
    CHECK(scalar_leq(AScalar::True, AScalar::BoolTop));
    CHECK_FALSE(scalar_leq(AScalar::IntTop, AScalar::BoolTop));

    EnvId e = in.extend(in.empty_env(), x, a);
    CHECK(in.lookup(e, x) == a);
    CHECK(in.restrict(e, {}) == in.empty_env());
    CHECK(in.store_restrict(s2, {}) == in.empty_store());
    CHECK(in.store_restrict(s2, {a}) == s2);
  }

  TEST_CASE("abstract steps simulate concrete steps") {
    for (unsigned k : {0u, 1u, 2u}) {
      for (const char* name : kBench) {
        CAPTURE(name);
        CAPTURE(k);
        AnfProgram p = parse_anf(bench(name));
        concrete::RunResult run = concrete::run(p, concrete::kDefaultFuel, true);
        REQUIRE(run.outcome == concrete::Outcome::Halt);
        Interner in;
        AbstractMachine m(p, AllocPolicy::from_k(k), in);
        AbstractTrace t = alpha_trace(m, run);
        REQUIRE(t.states.size() == run.trace.size());
        CHECK(t.states.front() == m.inject());
        std::size_t misses = 0;
        for (std::size_t i = 0; i + 1 < t.states.size(); ++i) {
          std::vector<FrameId> next = t.frames(t.stacks[i + 1]);
          bool covered = false;
          for (const AConf& c : astep(m, {t.states[i], t.frames(t.stacks[i])}))
            covered |= aconf_leq(in, t.states[i + 1], next, c.state, c.kont);
          if (!covered) ++misses;
        }
        CHECK(misses == 0);
      }
    }
  }

  TEST_CASE("stack depth follows the concrete continuation") {
    AnfProgram p = parse_anf(bench("fig1"));
    concrete::RunResult run = concrete::run(p, concrete::kDefaultFuel, true);
    Interner in;
    AbstractMachine m(p, AllocPolicy::mono(), in);
    AbstractTrace t = alpha_trace(m, run);
    for (std::size_t i = 0; i < run.trace.size(); ++i)
      CHECK(t.frames(t.stacks[i]).size() == concrete::kont_depth(run.trace[i].kont));
  }

  TEST_CASE("environments are trimmed to free variables") {
    AnfProgram p = parse_anf(bench("mj09"));
    Interner in;
    AbstractMachine m(p, AllocPolicy::mono(), in);
    std::vector<StateId> todo{m.inject()};
    std::size_t seen = 0;
    while (!todo.empty() && seen < 200) {
      StateId q = todo.back();
      todo.pop_back();
      ++seen;
      const ControlState& c = in.state(q);
      std::vector<Var> fv = free_vars(*c.exp);
      for (const auto& [v, _] : in.env(c.env))
        CHECK(std::find(fv.begin(), fv.end(), v) != fv.end());
      for (const ASucc& s : m.step(q, std::nullopt)) todo.push_back(s.state);
    }
  }

  TEST_CASE("bindings are observed") {
    AnfProgram p = parse_anf("((lambda (x) x) 1)");
    Interner in;
    AbstractMachine m(p, AllocPolicy::mono(), in);
    std::vector<AddrId> bound;
    m.on_bind = [&](AddrId a, ValSetId) { bound.push_back(a); };
    m.step(m.inject(), std::nullopt);
    REQUIRE(bound.size() == 1);
    CHECK(in.addr(bound[0]).var == p.binders().front());
  }
}
