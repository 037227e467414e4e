#include "doctest.h"
#include "oracle.hpp"

using namespace pdcfa;
using A = StackAct<int>;

TEST_SUITE("pushdown") {
  TEST_CASE("net cancels matched pairs") {
    CHECK(net<int>({A::push(1), A::pop(1)}).empty());
    CHECK(net<int>({A::push(1), A::unch(), A::pop(1)}).empty());
    CHECK(net<int>({A::push(1), A::pop(2)}) == std::vector<A>{A::push(1), A::pop(2)});
    CHECK(net<int>({A::pop(1), A::push(1)}) == std::vector<A>{A::pop(1), A::push(1)});
    CHECK(net<int>({A::push(1), A::push(2), A::pop(2), A::push(3)}) ==
          std::vector<A>{A::push(1), A::push(3)});
  }

  TEST_CASE("stackify") {
    CHECK(stackify<int>({}) == std::vector<int>{});
    CHECK(stackify<int>({A::push(1), A::push(2)}) == std::vector<int>{2, 1});
    CHECK(stackify<int>({A::push(1), A::push(2), A::pop(2)}) == std::vector<int>{1});
    CHECK_FALSE(stackify<int>({A::pop(1)}).has_value());
    CHECK_FALSE(stackify<int>({A::push(1), A::pop(2)}).has_value());
  }

  TEST_CASE("unbounded recursion saturates") {
    // 0 calls 1; 1 recurses or bottoms out at 2; 2 returns to 2 or, once
    // the stack is empty, finishes at 3.
    RuleSystem s;
    s.rules = {{0, A::push(7), 1}, {1, A::push(8), 1}, {1, A::unch(), 2},
               {2, A::pop(8), 2},  {2, A::pop(7), 3}};
    auto o = s.oracle();
    auto r = compact_worklist(o);
    CHECK(r.saturated);
    CHECK(node_set(r.graph) == std::set<int>{0, 1, 2, 3});
    CHECK(r.ecg.contains(0, 3));
    CHECK(r.ecg.contains(1, 2));
    CHECK_FALSE(r.ecg.contains(0, 2));
    CHECK(r.graph.has_edge({2, A::pop(7), 3}));

    auto naive = compact_naive(o, 6, 10000);
    CHECK_FALSE(naive.saturated);
    CHECK(node_set(naive.graph) == node_set(r.graph));
  }

  TEST_CASE("unmatched pops are never taken") {
    RuleSystem s;
    s.rules = {{0, A::push(1), 1}, {1, A::pop(2), 2}, {1, A::pop(1), 3}, {0, A::pop(1), 4}};
    auto r = compact_worklist(s.oracle());
    CHECK(node_set(r.graph) == std::set<int>{0, 1, 3});
    CHECK(r.ecg.contains(0, 3));
  }

  TEST_CASE("worklist agrees with bounded search") {
    std::mt19937 rng(7);
    int compared = 0;
    for (int i = 0; i < 60; ++i) {
      RuleSystem s = random_system(rng, 5, 2, 8);
      auto o = s.oracle();
      auto naive = compact_naive(o, 8, 10000);
      if (!naive.saturated) continue;
      ++compared;
      auto w = compact_worklist(o);
      CHECK(w.saturated);
      CHECK(node_set(w.graph) == node_set(naive.graph));
      CHECK(edge_set(w.graph) == edge_set(naive.graph));
      CHECK(pair_set(w.ecg) == pair_set(naive.ecg));
    }
    CHECK(compared > 20);
  }

  TEST_CASE("closure graph is transitive and reflexive on nodes") {
    std::mt19937 rng(11);
    for (int i = 0; i < 30; ++i) {
      RuleSystem s = random_system(rng, 6, 3, 10);
      auto w = compact_worklist(s.oracle());
      for (int q : w.graph.nodes()) CHECK(w.ecg.contains(q, q));
      for (const auto& [a, b] : w.ecg.pairs())
        for (int c : w.ecg.succ(b)) CHECK(w.ecg.contains(a, c));
    }
  }

  TEST_CASE("hooks see every edge and pair once") {
    std::mt19937 rng(3);
    RuleSystem s = random_system(rng, 6, 2, 10);
    EcgEngine<int, int> e(s.oracle());
    std::size_t edges = 0, pairs = 0;
    e.on_edge = [&](const Edge<int, int>&) { ++edges; };
    e.on_pair = [&](const int&, const int&) { ++pairs; };
    CHECK(e.run());
    CHECK(edges == e.graph().edges().size());
    CHECK(pairs == e.ecg().size());
  }

  TEST_CASE("limits stop the engine") {
    // A counter that never repeats.
    RpdsOracle<int, int> o;
    o.root = 0;
    o.nop_delta = [](const int& q) {
      return std::vector<std::pair<int, A>>{{q + 1, A::unch()}};
    };
    o.top_delta = [](const int&, const int&) { return std::vector<std::pair<int, A>>{}; };
    auto r = compact_worklist(o, EngineLimits{50});
    CHECK_FALSE(r.saturated);
    CHECK(r.graph.nodes().size() == 50);
    EngineLimits by_steps;
    by_steps.max_steps = 10;
    EcgEngine<int, int> e(o, by_steps);
    CHECK_FALSE(e.run());
    CHECK(e.steps() == 10);
  }

  TEST_CASE("single-step operations") {
    RuleSystem s;
    s.rules = {{0, A::push(1), 1}, {1, A::unch(), 2}, {2, A::pop(1), 3}};
    auto o = s.oracle();
    auto w = sprout(o, 1);
    REQUIRE(w.edges.size() == 1);
    CHECK(w.pairs == std::vector<std::pair<int, int>>{{1, 2}});

    Crpds<int, int> g(0);
    Ecg<int> h;
    for (int q : {0, 1, 2}) h.add(q, q);
    h.add(1, 2);
    g.add_edge({0, A::push(1), 1});
    auto push = add_push(g, h, o, Edge<int, int>{0, A::push(1), 1});
    CHECK(push.pairs == std::vector<std::pair<int, int>>{{0, 3}});
    g.add_edge({2, A::pop(1), 3});
    auto pop = add_pop(g, h, o, Edge<int, int>{2, A::pop(1), 3});
    CHECK(pop.pairs == std::vector<std::pair<int, int>>{{0, 3}});
    auto empty = add_empty(g, h, o, 1, 2);
    CHECK(std::find(empty.pairs.begin(), empty.pairs.end(), std::pair<int, int>{0, 3}) !=
          empty.pairs.end());
  }
}
