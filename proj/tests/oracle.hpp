#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "pdcfa/pushdown.hpp"

// Small explicit pushdown systems over int states and frames.
struct RuleSystem {
  struct Rule {
    int src;
    pdcfa::StackAct<int> act;
    int dst;
  };
  std::vector<Rule> rules;

  pdcfa::RpdsOracle<int, int> oracle(int root = 0) const {
    pdcfa::RpdsOracle<int, int> o;
    o.root = root;
    o.nop_delta = [this](const int& q) {
      std::vector<std::pair<int, pdcfa::StackAct<int>>> out;
      for (const auto& r : rules)
        if (r.src == q && !r.act.is_pop()) out.emplace_back(r.dst, r.act);
      return out;
    };
    o.top_delta = [this](const int& q, const int& f) {
      std::vector<std::pair<int, pdcfa::StackAct<int>>> out;
      for (const auto& r : rules)
        if (r.src == q && r.act.is_pop() && r.act.frame == f) out.emplace_back(r.dst, r.act);
      return out;
    };
    return o;
  }
};

inline RuleSystem random_system(std::mt19937& rng, int states, int frames, int rules) {
  RuleSystem s;
  std::uniform_int_distribution<int> q(0, states - 1), f(0, frames - 1), kind(0, 2);
  for (int i = 0; i < rules; ++i) {
    int k = kind(rng);
    auto act = k == 0 ? pdcfa::StackAct<int>::push(f(rng))
                      : k == 1 ? pdcfa::StackAct<int>::pop(f(rng)) : pdcfa::StackAct<int>::unch();
    s.rules.push_back({q(rng), act, q(rng)});
  }
  return s;
}

template <class Q, class F>
std::set<Q> node_set(const pdcfa::Crpds<Q, F>& g) {
  return {g.nodes().begin(), g.nodes().end()};
}

template <class Q, class F>
std::set<std::tuple<Q, int, F, Q>> edge_set(const pdcfa::Crpds<Q, F>& g) {
  std::set<std::tuple<Q, int, F, Q>> s;
  for (const auto& e : g.edges())
    s.emplace(e.src, static_cast<int>(e.act.kind), e.act.frame, e.dst);
  return s;
}

template <class Q>
std::set<std::pair<Q, Q>> pair_set(const pdcfa::Ecg<Q>& h) {
  return {h.pairs().begin(), h.pairs().end()};
}
