#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/error.hpp"
#include "fchi/graph.hpp"

namespace fchi {

enum class BoundKind { product_upper, recurrence, exact_value, binary_union };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::product_upper: return "product_upper";
    case BoundKind::recurrence: return "recurrence";
    case BoundKind::exact_value: return "exact_value";
    case BoundKind::binary_union: return "binary_union";
  }
  return "?";
}

using Triple = std::tuple<int, int, int>;  // (r, p, q)

struct VerifiedEntry {
  std::vector<int> parameters;  // tuple or color subset the value belongs to
  std::int64_t value = 0;
  std::int64_t bound = 0;       // right-hand side it was compared against
  bool ok = true;
};

struct BoundReport {
  BoundKind kind = BoundKind::exact_value;
  Triple parameters{0, 0, 0};
  std::string claimed_value;
  std::vector<VerifiedEntry> verified_at;
  std::vector<Triple> skipped;

  bool passed() const {
    for (const auto& e : verified_at)
      if (!e.ok) return false;
    return true;
  }
};

/// Edge {v,w} gets the position (1 = most significant) of the first differing digit.
inline ColoredCompleteGraph binary_coloring(int r) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "binary_coloring needs r >= 1");
  if (r > 6) throw Error(ErrorCode::TooLarge, "binary_coloring supports r <= 6 (n = 2^r <= 64)");
  return ColoredCompleteGraph::from_function(1 << r, r, [r](int v, int w) {
    return r - (31 - std::countl_zero(static_cast<std::uint32_t>(v ^ w)));
  });
}

/// For every q-subset of [r], chi of the union in binary_coloring(r) must equal 2^q.
inline BoundReport verify_binary_union_chromatic(int r, int q) {
  if (q < 1 || q > r) throw Error(ErrorCode::InvalidArgument, "need 1 <= q <= r");
  auto c = binary_coloring(r);
  BoundReport rep;
  rep.kind = BoundKind::binary_union;
  rep.parameters = {r, 0, q};
  rep.claimed_value = "2^" + std::to_string(q);
  std::vector<int> all(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) all[i] = i + 1;
  detail::for_each_k_subset(all, q, [&](const std::vector<int>& pick) {
    int chi = chromatic_number(union_color_classes(c, ColorSet(pick.begin(), pick.end())));
    rep.verified_at.push_back({pick, chi, std::int64_t{1} << q, chi == (1 << q)});
    return true;
  });
  return rep;
}

/// (p-1)^ceil(r/(q-1)) + 1, exact.
inline std::int64_t product_upper_bound(int r, int p, int q) {
  if (p < 3 || q < 2 || r < 1) throw Error(ErrorCode::InvalidArgument, "need p >= 3, q >= 2, r >= 1");
  int e = (r + q - 2) / (q - 1);
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i)
    if (__builtin_mul_overflow(v, static_cast<std::int64_t>(p - 1), &v))
      throw Error(ErrorCode::Overflow, "product bound exceeds 64-bit range");
  if (__builtin_add_overflow(v, std::int64_t{1}, &v)) throw Error(ErrorCode::Overflow, "product bound exceeds 64-bit range");
  return v;
}

/// F(r,p,q) <= r F(r,p-1,q-1) on every triple whose predecessor is present.
/// One color never satisfies the inequality (F(1,p,q) = p), so r = 1 triples are reported as skipped.
inline BoundReport check_recurrence(const std::map<Triple, std::int64_t>& f_values) {
  BoundReport rep;
  rep.kind = BoundKind::recurrence;
  rep.claimed_value = "F(r,p,q) <= r*F(r,p-1,q-1)";
  for (const auto& [key, value] : f_values) {
    auto [r, p, q] = key;
    auto it = f_values.find({r, p - 1, q - 1});
    if (it == f_values.end()) continue;
    if (r < 2) {
      rep.skipped.push_back(key);
      continue;
    }
    std::int64_t rhs = static_cast<std::int64_t>(r) * it->second;
    rep.verified_at.push_back({{r, p, q}, value, rhs, value <= rhs});
  }
  return rep;
}

}  // namespace fchi
