#include "doctest.h"
#include "pdcfa/gc.hpp"
#include "util.hpp"

using namespace pdcfa;

namespace {

struct Fixture {
  AnfProgram p = parse_anf("(lambda (a) (lambda (b) a))");
  Interner in;
  const Lambda* outer = nullptr;
  const Lambda* inner = nullptr;
  AddrId A, B, C;
  StoreId store;

  Fixture() {
    outer = std::get<const Lambda*>(std::get<Exp::Ret>(p.root().node).atom.node);
    inner = std::get<const Lambda*>(std::get<Exp::Ret>(outer->body->node).atom.node);
    A = in.addr({outer->param, kNoLabel, in.empty_ctx()});
    B = in.addr({inner->param, kNoLabel, in.empty_ctx()});
    C = in.addr({outer->param, 99, in.empty_ctx()});
    AVal top{AVal::Kind::Scalar};
    AVal clo{AVal::Kind::Clo};
    clo.lam = inner;
    clo.env = in.extend(in.empty_env(), outer->param, A);
    store = in.store_join(in.empty_store(), A, in.singleton(in.val(top)));
    store = in.store_join(store, B, in.singleton(in.val(clo)));
    store = in.store_join(store, C, in.singleton(in.val(top)));
  }
};

}  // namespace

TEST_SUITE("gc") {
  TEST_CASE("reachability follows closure environments") {
    Fixture f;
    CHECK(reachable_addrs(f.in, {f.B}, f.store) == RootSet{f.A, f.B});
    CHECK(reachable_addrs(f.in, {f.A}, f.store) == RootSet{f.A});
    CHECK(reachable_addrs(f.in, {}, f.store).empty());
  }

  TEST_CASE("collection drops unreachable bindings") {
    Fixture f;
    EnvId env = f.in.extend(f.in.empty_env(), f.inner->param, f.B);
    StateId q = f.in.state({f.inner->body, env, f.store, f.in.empty_ctx()});
    StateId g = gc(f.in, q, {});
    const AStore& kept = f.in.store(f.in.state(g).store);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].first == f.A);
    CHECK(kept[1].first == f.B);
    CHECK(f.in.store_leq(f.in.state(g).store, f.store));
    CHECK(gc(f.in, g, {}) == g);
    CHECK(f.in.state(gc(f.in, q, {f.C})).store == f.store);
  }

  TEST_CASE("root set helpers") {
    Fixture f;
    CHECK(roots_union({f.A}, {f.A, f.B}) == RootSet{f.A, f.B});
    CHECK(roots_union({f.B}, {f.A}) == RootSet{f.A, f.B});
    CHECK(roots_subset({f.A}, {f.A, f.B}));
    CHECK_FALSE(roots_subset({f.C}, {f.A, f.B}));
    FrameId fr = f.in.frame({f.outer->param, f.outer->body, f.in.extend(f.in.empty_env(), f.inner->param, f.B)});
    CHECK(touches(f.in, fr) == RootSet{f.B});
    CHECK(stack_root(f.in, {fr, fr}) == RootSet{f.B});
  }

  TEST_CASE("collected steps cover concrete runs") {
    for (const char* name : {"fig1", "mj09", "loop2"}) {
      CAPTURE(name);
      AnfProgram p = parse_anf(bench(name));
      concrete::RunResult run = concrete::run(p, concrete::kDefaultFuel, true);
      Interner in;
      AbstractMachine m(p, AllocPolicy::mono(), in);
      AbstractTrace t = alpha_trace(m, run);
      std::size_t misses = 0;
      for (std::size_t i = 0; i + 1 < t.states.size(); ++i) {
        AConf c{t.collected[i], t.frames(t.stacks[i])};
        AConf g = gc(in, c);
        CHECK(in.store_leq(in.state(g.state).store, in.state(c.state).store));
        std::vector<FrameId> next = t.frames(t.stacks[i + 1]);
        StateId want = gc(in, t.collected[i + 1], stack_root(in, next));
        bool covered = false;
        for (const AConf& s : gc_step(m, c)) {
          AConf sg = gc(in, s);
          covered |= aconf_leq(in, want, next, sg.state, sg.kont);
        }
        if (!covered) ++misses;
      }
      CHECK(misses == 0);
    }
  }
}
