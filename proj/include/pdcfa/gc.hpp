#pragma once

// Abstract garbage collection.

#include <vector>

#include "pdcfa/abstract.hpp"

namespace pdcfa {

RootSet touches(const Interner& in, FrameId f);
RootSet stack_root(const Interner& in, const std::vector<FrameId>& kont);
/// Range of a control state's environment.
RootSet env_roots(const Interner& in, StateId q);

/// Addresses reachable from roots through closure environments in store.
RootSet reachable_addrs(const Interner& in, const RootSet& roots, StoreId store);

/// Restricts q's store to what is reachable from its environment and the
/// extra roots (typically the stack root).
StateId gc(Interner& in, StateId q, const RootSet& stack_roots);
AConf gc(Interner& in, const AConf& c);

std::vector<AConf> gc_step(AbstractMachine& m, const AConf& c);

RootSet roots_union(const RootSet& a, const RootSet& b);
bool roots_subset(const RootSet& a, const RootSet& b);

}  // namespace pdcfa
