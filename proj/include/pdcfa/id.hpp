#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

namespace pdcfa {

/// Strongly typed dense index. Distinct tags do not convert into each other.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  friend constexpr bool operator==(Id, Id) = default;
  friend constexpr auto operator<=>(Id, Id) = default;
};

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

template <class It, class Fn>
std::size_t hash_range(It first, It last, Fn&& fn) {
  std::size_t seed = static_cast<std::size_t>(std::distance(first, last));
  for (; first != last; ++first) hash_combine(seed, fn(*first));
  return seed;
}

/// Hash-consing table: each distinct value is stored once and named by a
/// dense id. References returned by get() stay valid for the table's life.
template <class T, class IdT, class Hash = std::hash<T>>
class InternTable {
 public:
  IdT intern(const T& v) {
    auto it = index_.find(v);
    if (it != index_.end()) return it->second;
    IdT id(static_cast<std::uint32_t>(items_.size()));
    items_.push_back(v);
    index_.emplace(items_.back(), id);
    return id;
  }

  const T& get(IdT id) const { return items_[id.value]; }
  std::size_t size() const { return items_.size(); }

 private:
  std::deque<T> items_;
  std::unordered_map<T, IdT, Hash> index_;
};

}  // namespace pdcfa

template <class Tag>
struct std::hash<pdcfa::Id<Tag>> {
  std::size_t operator()(pdcfa::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
