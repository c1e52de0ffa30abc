#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fchi/dense_pairs.hpp"
#include "fchi/error.hpp"
#include "fchi/graph.hpp"

namespace fchi {

/// Colors split into classes C_1..C_{q-1}; class i is (x_i, eps^{q-1})-sparse.
struct RestrictionProfile {
  int q = 3;
  std::vector<int> r_vec;     // cumulative class sizes
  std::vector<double> x_vec;  // x_1 = 1
  Rational eps{1, 32};
  std::vector<ColorSet> classes;
  SparsityVariant variant = SparsityVariant::interval;

  Rational eps_dense() const {
    if ((q - 1) * std::log2(static_cast<double>(eps.denominator())) > 62.0)
      throw Error(ErrorCode::Overflow, "eps^{q-1} leaves the 64-bit rational range");
    Rational out(1);
    for (int i = 0; i < q - 1; ++i) out *= eps;
    return out;
  }

  int r1() const { return r_vec.empty() ? 0 : r_vec.front(); }

  ColorSet all_colors() const {
    ColorSet out;
    for (const auto& cl : classes) out.insert(cl.begin(), cl.end());
    return out;
  }

  /// Union of C_1..C_k.
  ColorSet first_classes(int k) const {
    ColorSet out;
    for (int i = 0; i < k && i < static_cast<int>(classes.size()); ++i) out.insert(classes[i].begin(), classes[i].end());
    return out;
  }

  /// 0-based class index, -1 when absent.
  int class_of(ColorId col) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i].count(col)) return static_cast<int>(i);
    return -1;
  }

  void rebuild_r_vec() {
    r_vec.clear();
    int acc = 0;
    for (const auto& cl : classes) {
      acc += static_cast<int>(cl.size());
      r_vec.push_back(acc);
    }
  }

  friend bool operator==(const RestrictionProfile&, const RestrictionProfile&) = default;
};

/// Thrown when a color claimed sparse has a dense pair inside its window.
class SparsityViolatedError : public Error {
 public:
  SparsityViolatedError(const std::string& what, SparsityWitness w)
      : Error(ErrorCode::SparsityViolated, what), witness_(std::move(w)) {}
  const SparsityWitness& witness() const { return witness_; }

 private:
  SparsityWitness witness_;
};

inline void validate_profile(const RestrictionProfile& p) {
  const auto k = static_cast<std::size_t>(p.q - 1);
  if (p.q < 2) throw Error(ErrorCode::InvalidProfile, "q must be >= 2");
  if (p.classes.size() != k || p.r_vec.size() != k || p.x_vec.size() != k)
    throw Error(ErrorCode::InvalidProfile, "profile needs q-1 classes, r entries and x entries");
  int prev = 0;
  ColorSet seen;
  for (std::size_t i = 0; i < k; ++i) {
    if (p.r_vec[i] < prev) throw Error(ErrorCode::InvalidProfile, "r_vec must be non-decreasing");
    if (p.r_vec[i] - prev != static_cast<int>(p.classes[i].size()))
      throw Error(ErrorCode::InvalidProfile, "class " + std::to_string(i + 1) + " size disagrees with r_vec");
    prev = p.r_vec[i];
    for (ColorId col : p.classes[i])
      if (!seen.insert(col).second) throw Error(ErrorCode::InvalidProfile, "color in two classes");
    if (!(p.x_vec[i] >= 0.0)) throw Error(ErrorCode::InvalidProfile, "x entries must be >= 0");
  }
  if (p.eps <= 0 || p.eps >= 1) throw Error(ErrorCode::InvalidProfile, "eps must lie in (0,1)");
}

/// Everything unrestricted: C_1 = colors used inside `within`.
inline RestrictionProfile initial_profile(const ColoredCompleteGraph& c, Mask within, int q, const Rational& eps,
                                          SparsityVariant variant) {
  RestrictionProfile p;
  p.q = q;
  p.eps = eps;
  p.variant = variant;
  p.classes.assign(static_cast<std::size_t>(q - 1), {});
  p.classes[0] = c.used_colors_within(within);
  p.x_vec.assign(static_cast<std::size_t>(q - 1), 0.0);
  p.x_vec[0] = 1.0;
  p.rebuild_r_vec();
  return p;
}

/// Drops colors with no edge inside `within`.
inline RestrictionProfile normalize_profile(RestrictionProfile p, const ColoredCompleteGraph& c, Mask within) {
  ColorSet used = c.used_colors_within(within);
  for (auto& cl : p.classes)
    for (auto it = cl.begin(); it != cl.end();) it = used.count(*it) ? std::next(it) : cl.erase(it);
  p.rebuild_r_vec();
  return p;
}

/// Integer part-size window of class i (0-based) on a set of m vertices.
inline std::pair<int, int> sparsity_window(const RestrictionProfile& p, int i, int m) {
  double x = p.x_vec.at(static_cast<std::size_t>(i));
  std::int64_t lo = std::max<std::int64_t>(1, ceil_real(x, m));
  std::int64_t hi = p.variant == SparsityVariant::lower_only ? m / 2 : floor_mul(p.eps_dense(), m);
  hi = std::min<std::int64_t>(hi, m / 2);
  if (lo > hi) return {1, 0};
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

struct ClassifiedProfile {
  RestrictionProfile profile;
  std::vector<SparsityWitness> witnesses;  // one per restricted color

  bool all_exact() const {
    return std::all_of(witnesses.begin(), witnesses.end(), [](const auto& w) { return w.mode == CheckMode::exact; });
  }
};

/// Re-verifies every sparsity claim on the coloring restricted to `within`.
inline ClassifiedProfile classify_colors(const ColoredCompleteGraph& c, Mask within, const RestrictionProfile& p,
                                         const DenseConfig& cfg = {}) {
  validate_profile(p);
  ColorSet used = c.used_colors_within(within);
  ColorSet covered = p.all_colors();
  for (ColorId col : used)
    if (!covered.count(col))
      throw Error(ErrorCode::InvalidProfile, "color " + std::to_string(col) + " is used but in no class");
  const int m = popcount(within);
  ClassifiedProfile out{p, {}};
  for (int i = 1; i < p.q - 1; ++i) {
    auto [lo, hi] = sparsity_window(p, i, m);
    for (ColorId col : p.classes[static_cast<std::size_t>(i)]) {
      c.check_color(col);
      auto w = sparse_in_window(c, col, within, p.eps_dense(), lo, hi, cfg);
      w.upper = p.variant == SparsityVariant::lower_only ? Rational(1) : p.eps_dense();
      if (w.verdict == SparsityVerdict::not_sparse)
        throw SparsityViolatedError("color " + std::to_string(col) + " has a dense pair of part size " +
                                        std::to_string(w.counterexample->part_size()),
                                    w);
      out.witnesses.push_back(w);
    }
  }
  return out;
}

inline ClassifiedProfile classify_colors(const ColoredCompleteGraph& c, const RestrictionProfile& p,
                                         const DenseConfig& cfg = {}) {
  return classify_colors(c, low_mask(c.n()), p, cfg);
}

}  // namespace fchi
