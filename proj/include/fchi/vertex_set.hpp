#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "fchi/error.hpp"

namespace fchi {

inline constexpr int kMaxVertices = 64;

using Mask = std::uint64_t;

inline constexpr Mask bit(int v) { return Mask{1} << v; }

inline constexpr Mask low_mask(int n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

inline int popcount(Mask m) { return std::popcount(m); }

inline int lowest(Mask m) { return std::countr_zero(m); }

/// Calls f(v) for every set bit, ascending.
template <typename F>
inline void for_each_bit(Mask m, F&& f) {
  while (m) {
    int v = std::countr_zero(m);
    m &= m - 1;
    f(v);
  }
}

inline std::vector<int> bits_of(Mask m) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::popcount(m)));
  for_each_bit(m, [&](int v) { out.push_back(v); });
  return out;
}

/// A subset of [0, universe_size).
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe_size, Mask members = 0)
      : universe_(universe_size), members_(members) {
    if (universe_size < 0 || universe_size > kMaxVertices)
      throw Error(ErrorCode::TooLarge, "vertex universe above 64");
    if (members & ~low_mask(universe_size))
      throw Error(ErrorCode::InvalidArgument, "vertex outside universe");
  }
  VertexSet(int universe_size, std::initializer_list<int> vs) : VertexSet(universe_size) {
    for (int v : vs) insert(v);
  }

  static VertexSet full(int universe_size) { return VertexSet(universe_size, low_mask(universe_size)); }

  static VertexSet from_vector(int universe_size, const std::vector<int>& vs) {
    VertexSet s(universe_size);
    for (int v : vs) s.insert(v);
    return s;
  }

  int universe_size() const { return universe_; }
  Mask mask() const { return members_; }
  int size() const { return std::popcount(members_); }
  bool empty() const { return members_ == 0; }
  bool contains(int v) const { return v >= 0 && v < universe_ && ((members_ >> v) & 1U); }

  void insert(int v) {
    if (v < 0 || v >= universe_) throw Error(ErrorCode::InvalidArgument, "vertex outside universe");
    members_ |= bit(v);
  }
  void erase(int v) {
    if (v >= 0 && v < universe_) members_ &= ~bit(v);
  }

  bool is_subset_of(const VertexSet& o) const { return (members_ & ~o.members_) == 0; }
  bool disjoint_from(const VertexSet& o) const { return (members_ & o.members_) == 0; }

  VertexSet operator&(const VertexSet& o) const { return VertexSet(universe_, members_ & o.members_); }
  VertexSet operator|(const VertexSet& o) const { return VertexSet(universe_, members_ | o.members_); }
  VertexSet minus(const VertexSet& o) const { return VertexSet(universe_, members_ & ~o.members_); }

  std::vector<int> to_vector() const { return bits_of(members_); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  int universe_ = 0;
  Mask members_ = 0;
};

}  // namespace fchi
