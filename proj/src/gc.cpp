#include "pdcfa/gc.hpp"

#include <algorithm>
#include <set>

namespace pdcfa {

namespace {

void normalize(RootSet& r) {
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
}

}  // namespace

RootSet touches(const Interner& in, FrameId f) {
  RootSet r;
  for (const auto& [_, a] : in.env(in.frame(f).env)) r.push_back(a);
  normalize(r);
  return r;
}

RootSet stack_root(const Interner& in, const std::vector<FrameId>& kont) {
  RootSet r;
  for (FrameId f : kont)
    for (const auto& [_, a] : in.env(in.frame(f).env)) r.push_back(a);
  normalize(r);
  return r;
}

RootSet env_roots(const Interner& in, StateId q) {
  RootSet r;
  for (const auto& [_, a] : in.env(in.state(q).env)) r.push_back(a);
  normalize(r);
  return r;
}

RootSet reachable_addrs(const Interner& in, const RootSet& roots, StoreId store) {
  std::set<AddrId> seen(roots.begin(), roots.end());
  std::vector<AddrId> work(seen.begin(), seen.end());
  while (!work.empty()) {
    AddrId a = work.back();
    work.pop_back();
    for (ValId v : in.valset(in.store_get(store, a))) {
      const AVal& val = in.val(v);
      if (val.kind != AVal::Kind::Clo) continue;
      for (const auto& [_, b] : in.env(val.env))
        if (seen.insert(b).second) work.push_back(b);
    }
  }
  return RootSet(seen.begin(), seen.end());
}

StateId gc(Interner& in, StateId q, const RootSet& stack_roots) {
  RootSet roots = roots_union(env_roots(in, q), stack_roots);
  StoreId store = in.state(q).store;
  RootSet live = reachable_addrs(in, roots, store);
  return in.with_store(q, in.store_restrict(store, live));
}

AConf gc(Interner& in, const AConf& c) {
  return {gc(in, c.state, stack_root(in, c.kont)), c.kont};
}

std::vector<AConf> gc_step(AbstractMachine& m, const AConf& c) {
  return astep(m, gc(m.interner(), c));
}

RootSet roots_union(const RootSet& a, const RootSet& b) {
  RootSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool roots_subset(const RootSet& a, const RootSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace pdcfa
