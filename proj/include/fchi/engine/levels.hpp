#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fchi/engine/common.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/engine/profile.hpp"

namespace fchi {

/// One dense pair (a, b) of a level; `parent` indexes the sets of the level above (-1 on level 1).
struct LevelPair {
  Mask a = 0, b = 0;
  int parent = -1;
  friend bool operator==(const LevelPair&, const LevelPair&) = default;
};

struct Level {
  ColorId color = 0;
  std::vector<LevelPair> pairs;
  std::vector<std::int64_t> raw_volume;  // per parent set: family volume before trimming
  CheckMode mode = CheckMode::exact;     // exact if every "no more pairs" claim was exhaustive
  friend bool operator==(const Level&, const Level&) = default;
};

/// Levels L_1..L_k.  The sets of a level are the pair sides, pair i giving sets 2i and 2i+1.
struct LevelStructure {
  int q = 3;
  Rational eps{1, 32};
  Mask root = 0;
  std::vector<ColorId> colors;
  std::vector<Level> levels;

  int depth() const { return static_cast<int>(levels.size()); }

  std::vector<Mask> sets(int m) const {
    std::vector<Mask> out;
    for (const auto& p : levels.at(static_cast<std::size_t>(m)).pairs) {
      out.push_back(p.a);
      out.push_back(p.b);
    }
    return out;
  }

  std::int64_t volume(int m) const {
    std::int64_t v = 0;
    for (Mask s : sets(m)) v += popcount(s);
    return v;
  }

  /// Children of set j of level m as masks (both sides of every child pair).
  std::vector<Mask> children(int m, int j) const {
    std::vector<Mask> out;
    if (m + 1 >= depth()) return out;
    for (const auto& p : levels[static_cast<std::size_t>(m) + 1].pairs)
      if (p.parent == j) {
        out.push_back(p.a);
        out.push_back(p.b);
      }
    return out;
  }

  friend bool operator==(const LevelStructure&, const LevelStructure&) = default;
};

/// 2^{q+2} eps |V| <= Vol(children) <= 2^{q+3} eps |V|.
inline bool is_properly_shattered(const VertexSet& v, const std::vector<VertexSet>& children, const Rational& eps,
                                  int q) {
  Mask seen = 0;
  std::int64_t vol = 0;
  for (const auto& ch : children) {
    if (!ch.is_subset_of(v)) throw Error(ErrorCode::NotNested, "child escapes its parent");
    if (ch.mask() & seen) throw Error(ErrorCode::NotDisjoint, "children overlap");
    seen |= ch.mask();
    vol += ch.size();
  }
  return detail::volume_at_least(vol, q + 2, eps, v.size()) && detail::volume_at_most(vol, q + 3, eps, v.size());
}

inline bool is_properly_shattered(Mask v, const std::vector<Mask>& children, const Rational& eps, int q) {
  std::vector<VertexSet> ch;
  for (Mask m : children) ch.emplace_back(kMaxVertices, m);
  return is_properly_shattered(VertexSet(kMaxVertices, v), ch, eps, q);
}

namespace detail {

/// Child family of `set` (a level-m set, 0-based m) in color `col`, trimmed to the volume cap.
inline Family child_family(const ColoredCompleteGraph& c, ColorId col, Mask set, int m, const EngineParams& params,
                           const DenseConfig& cfg) {
  const int sz = popcount(set);
  const Rational ed = params.eps_dense();
  int lo = alpha_floor(params.log_alpha_at(m + 1), sz);
  int hi = static_cast<int>(floor_mul(ed, sz));
  Family fam;
  if (hi >= 1 && lo <= hi) fam = extract_family(class_within(c, col, set), set, ed, lo, hi, cfg);
  fam.raw_volume = fam.volume();
  trim_family(fam, params.q, params.eps, sz);
  return fam;
}

inline void append_level(const ColoredCompleteGraph& c, LevelStructure& ls, ColorId col, const EngineParams& params,
                         const DenseConfig& cfg) {
  const int m = ls.depth() - 1;
  Level lvl;
  lvl.color = col;
  auto parents = ls.sets(m);
  for (std::size_t j = 0; j < parents.size(); ++j) {
    auto fam = child_family(c, col, parents[j], m, params, cfg);
    if (fam.mode != CheckMode::exact) lvl.mode = fam.mode;
    lvl.raw_volume.push_back(fam.raw_volume);
    for (auto& [a, b] : fam.pairs) lvl.pairs.push_back({a, b, static_cast<int>(j)});
  }
  ls.levels.push_back(std::move(lvl));
  ls.colors.push_back(col);
}

}  // namespace detail

/// L_1 from a dense pair of colors[0] inside `within`, then per-parent maximal families for the rest.
inline LevelStructure build_level_sets(const ColoredCompleteGraph& c, Mask within, const std::vector<ColorId>& colors,
                                       const EngineParams& params, const EngineConfig& cfg = {}) {
  if (colors.empty()) throw Error(ErrorCode::NoDensePair, "empty color sequence");
  for (ColorId col : colors) c.check_color(col);
  const auto dcfg = detail::engine_dense(cfg);
  LevelStructure ls;
  ls.q = params.q;
  ls.eps = params.eps;
  ls.root = within;
  auto g = detail::class_within(c, colors[0], within);
  if (g.edge_count() == 0) throw Error(ErrorCode::NoDensePair, "first color has no edge in the set");
  auto [a, b] = detail::dense_pair_within(g, within, params.eps_dense(), dcfg);
  Level first;
  first.color = colors[0];
  first.pairs.push_back({a, b, -1});
  ls.levels.push_back(first);
  ls.colors.push_back(colors[0]);
  for (std::size_t i = 1; i < colors.size(); ++i) detail::append_level(c, ls, colors[i], params, dcfg);
  return ls;
}

inline LevelStructure build_level_sets(const ColoredCompleteGraph& c, const std::vector<ColorId>& colors,
                                       const EngineParams& params, const EngineConfig& cfg = {}) {
  return build_level_sets(c, low_mask(c.n()), colors, params, cfg);
}

/// Volume of the level-m sets that are not properly shattered by their level-(m+1) children.
inline std::int64_t nonshattered_volume(const LevelStructure& ls, int m) {
  std::int64_t vol = 0;
  auto sets = ls.sets(m);
  for (std::size_t j = 0; j < sets.size(); ++j)
    if (!is_properly_shattered(sets[j], ls.children(m, static_cast<int>(j)), ls.eps, ls.q)) vol += popcount(sets[j]);
  return vol;
}

/// Vol(N_m) <= 2^{-4(q-1)} Vol(L_m), exactly.
inline bool level_is_balanced(const LevelStructure& ls, int m) {
  return nonshattered_volume(ls, m) * (std::int64_t{1} << (4 * (ls.q - 1))) <= ls.volume(m);
}

/// Well-balanced through all built levels.
inline bool is_well_balanced(const LevelStructure& ls) {
  for (int m = 0; m + 1 < ls.depth(); ++m)
    if (!level_is_balanced(ls, m)) return false;
  return true;
}

/// Depth-first search for the longest well-balanced sequence (at most q-1 levels), colors in id order.
/// Level k+1 draws its color from C_1..C_k of the profile.
inline LevelStructure maximal_well_balanced(const ColoredCompleteGraph& c, Mask within, const RestrictionProfile& prof,
                                            const EngineParams& params, const EngineConfig& cfg = {}) {
  ColorId first = detail::densest_color(c, within, prof.all_colors());
  if (first == 0) throw Error(ErrorCode::NoDensePair, "no color has an edge in the set");
  LevelStructure best = build_level_sets(c, within, {first}, params, cfg);
  const auto dcfg = detail::engine_dense(cfg);
  const int target = params.q - 1;
  auto dfs = [&](auto&& self, const LevelStructure& cur) -> bool {
    if (cur.depth() > best.depth()) best = cur;
    if (cur.depth() >= target) return true;
    for (ColorId col : prof.first_classes(cur.depth())) {
      LevelStructure next = cur;
      detail::append_level(c, next, col, params, dcfg);
      if (!level_is_balanced(next, next.depth() - 2)) continue;
      if (self(self, next)) return true;
    }
    return false;
  };
  dfs(dfs, best);
  return best;
}

/// V' = V minus the maximal family of `color` pairs in V, when that family is below the shattering threshold.
struct NonShattered {
  Mask subset = 0;
  std::int64_t removed_volume = 0;
  CheckMode mode = CheckMode::exact;
  int lo = 1, hi = 0;
};

inline NonShattered nonshattered_subset(const ColoredCompleteGraph& c, Mask v, ColorId color,
                                        const EngineParams& params, int level, const EngineConfig& cfg = {}) {
  c.check_color(color);
  const int sz = popcount(v);
  const Rational ed = params.eps_dense();
  NonShattered out;
  out.lo = detail::alpha_floor(params.log_alpha_at(level), sz);
  out.hi = static_cast<int>(floor_mul(ed, sz));
  detail::Family fam;
  if (out.hi >= 1 && out.lo <= out.hi)
    fam = detail::extract_family(detail::class_within(c, color, v), v, ed, out.lo, out.hi, detail::engine_dense(cfg));
  out.removed_volume = fam.volume();
  out.mode = fam.mode;
  if (detail::volume_at_least(out.removed_volume, params.q + 2, params.eps, sz))
    throw Error(ErrorCode::ActuallyShattered, "maximal family reaches the shattering threshold");
  out.subset = v & ~fam.cover();
  return out;
}

}  // namespace fchi
