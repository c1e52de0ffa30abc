#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/dense_pairs.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/graph.hpp"

namespace fchi {

struct EngineConfig {
  DenseConfig dense;
  IntersectConfig intersect{1, 2'000'000};
  ChromaticConfig chi;
  std::int64_t gamma_search_nodes = 200'000;
  int max_steps = 64;
};

namespace detail {

/// Dense-pair config for engine use: eps0 is lifted since engine eps values are already clamped.
inline DenseConfig engine_dense(const EngineConfig& cfg) {
  DenseConfig d = cfg.dense;
  d.eps0 = Rational(1);
  return d;
}

/// Color class with only the edges inside `within`, original vertex ids.
inline SimpleGraph class_within(const ColoredCompleteGraph& c, ColorId col, Mask within) {
  return c.color_class(col).restricted(within);
}

/// Ties go to the lowest id; 0 when no color has an edge inside `within`.
inline ColorId densest_color(const ColoredCompleteGraph& c, Mask within, const ColorSet& among) {
  ColorId best = 0;
  std::int64_t best_edges = 0;
  for (ColorId col : among) {
    std::int64_t e = c.color_class(col).edges_within(within);
    if (e > best_edges) {
      best = col;
      best_edges = e;
    }
  }
  return best;
}

/// Maps a mask over 0..k-1 back through the sorted members of `within`.
inline Mask lift(Mask local, Mask within) {
  auto ids = bits_of(within);
  Mask out = 0;
  for_each_bit(local, [&](int i) { out |= bit(ids[static_cast<std::size_t>(i)]); });
  return out;
}

/// find_dense_pair on the subgraph induced by `within`, returned in original ids.
inline std::pair<Mask, Mask> dense_pair_within(const SimpleGraph& g, Mask within, const Rational& eps,
                                               const DenseConfig& cfg) {
  auto local = find_dense_pair(g.induced(within), eps, cfg);
  return {lift(local.v1.mask(), within), lift(local.v2.mask(), within)};
}

/// Extracted family of disjoint dense pairs inside one set.
struct Family {
  std::vector<std::pair<Mask, Mask>> pairs;
  std::int64_t raw_volume = 0;  // before trimming
  CheckMode mode = CheckMode::exact;

  std::int64_t volume() const {
    std::int64_t v = 0;
    for (auto& [a, b] : pairs) v += popcount(a) + popcount(b);
    return v;
  }
  Mask cover() const {
    Mask m = 0;
    for (auto& [a, b] : pairs) m |= a | b;
    return m;
  }
};

/// Greedy maximal family: extract window-sized eps-dense pairs from the uncovered part until none is found.
/// hi <= 0 means no upper cap beyond half the uncovered part.
inline Family extract_family(const SimpleGraph& g, Mask set, const Rational& eps, int lo, int hi,
                             const DenseConfig& cfg) {
  Family fam;
  Mask rest = set;
  lo = std::max(1, lo);
  while (true) {
    int cap = popcount(rest) / 2;
    int h = hi > 0 ? std::min(hi, cap) : cap;
    if (lo > h || g.edges_within(rest) == 0) break;
    SizedResult got;
    if (h >= 2) got = find_dense_pair_sized(g, rest, eps, std::max(lo, 2), h, cfg);
    if (!got.pair && lo == 1) got = find_dense_pair_sized(g, rest, eps, 1, 1, cfg);
    if (!got.pair) {
      if (got.mode != CheckMode::exact) fam.mode = got.mode;
      break;
    }
    Mask a = got.pair->v1.mask(), b = got.pair->v2.mask();
    fam.pairs.emplace_back(a, b);
    rest &= ~(a | b);
  }
  fam.raw_volume = fam.volume();
  return fam;
}

/// vol <= 2^e * eps * m, exactly.
inline bool volume_at_most(std::int64_t vol, int e, const Rational& eps, std::int64_t m) {
  return Rational(vol) <= Rational(std::int64_t{1} << e) * eps * m;
}

inline bool volume_at_least(std::int64_t vol, int e, const Rational& eps, std::int64_t m) {
  return Rational(vol) >= Rational(std::int64_t{1} << e) * eps * m;
}

/// Drops pairs from the end until Vol <= 2^{q+3} eps |set|.
inline void trim_family(Family& fam, int q, const Rational& eps, std::int64_t set_size) {
  while (!fam.pairs.empty() && !volume_at_most(fam.volume(), q + 3, eps, set_size)) fam.pairs.pop_back();
}

/// max(1, ceil(alpha m)) for alpha = e^{log_alpha}.
inline int alpha_floor(double log_alpha, int m) {
  double a = std::exp(log_alpha);
  return static_cast<int>(std::max<std::int64_t>(1, ceil_real(a, m)));
}

}  // namespace detail
}  // namespace fchi
