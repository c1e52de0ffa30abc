#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "fchi/error.hpp"
#include "fchi/graph.hpp"
#include "fchi/random.hpp"
#include "fchi/rational.hpp"
#include "fchi/vertex_set.hpp"

namespace fchi {

enum class CheckMode { exact, sampled, informational };

inline const char* to_string(CheckMode m) {
  switch (m) {
    case CheckMode::exact: return "exact";
    case CheckMode::sampled: return "sampled";
    case CheckMode::informational: return "informational";
  }
  return "?";
}

struct DenseConfig {
  Rational eps0{1, 12};
  int exact_limit = 32;          // is_eps_dense runs the exact search up to this part size
  int samples = 4000;            // random subset pairs in sampled mode
  int starts = 32;               // random balanced bipartitions
  int descents = 8;              // best starts that get a full descent
  int restarts = 24;             // sized search restarts when not exhaustive
  std::int64_t exhaustive_budget = 4'000'000;
  std::uint64_t seed = 1;
};

struct DensePair {
  VertexSet v1, v2;
  Rational epsilon{1, 2};
  CheckMode mode = CheckMode::exact;
  int host_size = 0;

  int part_size() const { return v1.size(); }
  friend bool operator==(const DensePair&, const DensePair&) = default;
};

struct DensityVerdict {
  bool dense = true;
  CheckMode mode = CheckMode::exact;
  Mask witness1 = 0, witness2 = 0;  // an edgeless pair of size >= threshold when !dense
  int threshold = 0;
};

/// ceil(eps * m), the subset size the density definition quantifies over.
inline int density_threshold(const Rational& eps, int m) { return static_cast<int>(ceil_mul(eps, m)); }

namespace detail {

inline void check_pair_shape(Mask a, Mask b) {
  if (a & b) throw Error(ErrorCode::NotDisjoint, "pair parts intersect");
  if (popcount(a) != popcount(b)) throw Error(ErrorCode::NotBalanced, "pair parts differ in size");
  if (a == 0) throw Error(ErrorCode::NotBalanced, "pair parts are empty");
}

inline void check_eps(const Rational& eps) {
  if (eps <= 0 || eps >= 1) throw Error(ErrorCode::EpsilonOutOfRange, "eps must lie in (0,1)");
}

/// Branch and bound for t vertices of side1 sharing >= t non-neighbours in side2.
class EmptyBicliqueSearch {
 public:
  EmptyBicliqueSearch(const SimpleGraph& g, Mask side1, Mask side2, int t) : g_(g), side2_(side2), t_(t) {
    order_ = bits_of(side1);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return popcount(g.neighbors(a) & side2) < popcount(g.neighbors(b) & side2);
    });
  }

  bool run() { return go(0, 0, 0, side2_); }
  Mask u1() const { return found1_; }
  Mask u2() const { return found2_; }

 private:
  bool go(std::size_t pos, int chosen, Mask picked, Mask common) {
    if (chosen == t_) {
      found1_ = picked;
      found2_ = common;
      return true;
    }
    for (std::size_t i = pos; i < order_.size(); ++i) {
      if (static_cast<int>(order_.size() - i) < t_ - chosen) return false;
      int v = order_[i];
      Mask next = common & ~g_.neighbors(v);
      if (popcount(next) < t_) continue;
      if (go(i + 1, chosen + 1, picked | bit(v), next)) return true;
    }
    return false;
  }

  const SimpleGraph& g_;
  Mask side2_;
  int t_;
  std::vector<int> order_;
  Mask found1_ = 0, found2_ = 0;
};

inline Mask common_non_neighbors(const SimpleGraph& g, Mask from, Mask within) {
  Mask out = within;
  for_each_bit(from, [&](int v) { out &= ~g.neighbors(v); });
  return out;
}

/// Grows an edgeless pair (u1 in side1, u2 in side2) until neither side can be extended.
inline std::pair<Mask, Mask> maximal_empty_pair(const SimpleGraph& g, Mask side1, Mask side2, Mask u1) {
  Mask u2 = common_non_neighbors(g, u1, side2);
  Mask grown = common_non_neighbors(g, u2, side1);
  return {grown, u2};
}

}  // namespace detail

/// Every U1 in v1, U2 in v2 with |Ui| >= ceil(eps |vi|) spans an edge?
inline DensityVerdict is_eps_dense(const SimpleGraph& g, const VertexSet& v1, const VertexSet& v2, const Rational& eps,
                                   const DenseConfig& cfg = {}) {
  detail::check_pair_shape(v1.mask(), v2.mask());
  detail::check_eps(eps);
  const int m = v1.size();
  DensityVerdict out;
  out.threshold = density_threshold(eps, m);
  if (m <= cfg.exact_limit) {
    detail::EmptyBicliqueSearch search(g, v1.mask(), v2.mask(), out.threshold);
    if (search.run()) {
      out.dense = false;
      std::tie(out.witness1, out.witness2) = detail::maximal_empty_pair(g, v1.mask(), v2.mask(), search.u1());
    }
    return out;
  }
  out.mode = CheckMode::sampled;
  Rng rng(cfg.seed);
  auto side1 = v1.to_vector();
  for (int s = 0; s < cfg.samples; ++s) {
    shuffle(side1, rng);
    Mask u1 = 0;
    for (int i = 0; i < out.threshold; ++i) u1 |= bit(side1[i]);
    if (popcount(detail::common_non_neighbors(g, u1, v2.mask())) >= out.threshold) {
      out.dense = false;
      std::tie(out.witness1, out.witness2) = detail::maximal_empty_pair(g, v1.mask(), v2.mask(), u1);
      return out;
    }
  }
  return out;
}

/// max(1, ceil(n d^{log(1/eps)/eps})).
inline std::int64_t dense_pair_size_bound(int n, const Rational& d, const Rational& eps) {
  double e = to_double(eps);
  double exponent = std::log(1.0 / e) / e;
  double f = std::exp(exponent * std::log(to_double(d)));
  return std::max<std::int64_t>(1, ceil_real(f, n));
}

namespace detail {

struct Candidate {
  Mask a = 0, b = 0;
};

/// Drops lowest cross-degree vertices (ties: lowest index) from the larger side.
inline Candidate balance(const SimpleGraph& g, Mask a, Mask b) {
  auto trim = [&](Mask& big, Mask other, int target) {
    while (popcount(big) > target) {
      int worst = -1, worst_deg = 1 << 20;
      for_each_bit(big, [&](int v) {
        int d = popcount(g.neighbors(v) & other);
        if (d < worst_deg) {
          worst = v;
          worst_deg = d;
        }
      });
      big &= ~bit(worst);
    }
  };
  if (popcount(a) > popcount(b)) trim(a, b, popcount(b));
  if (popcount(b) > popcount(a)) trim(b, a, popcount(a));
  return {a, b};
}

/// Swaps across a balanced bipartition (or with unused vertices of pool) while the crossing count grows.
inline void improve_bipartition(const SimpleGraph& g, Mask pool, Mask& a, Mask& b) {
  for (int iter = 0; iter < 4 * g.n(); ++iter) {
    int best_gain = 0, best_x = -1, best_y = -1;
    for_each_bit(a, [&](int x) {
      const int ix = popcount(g.neighbors(x) & a), ex = popcount(g.neighbors(x) & b);
      for_each_bit(pool & ~a, [&](int y) {
        int gain;
        if (b & bit(y))
          gain = ix - ex + popcount(g.neighbors(y) & b) - popcount(g.neighbors(y) & a) + 2 * (g.has_edge(x, y) ? 1 : 0);
        else
          gain = popcount(g.neighbors(y) & b) - ex;
        if (gain > best_gain) {
          best_gain = gain;
          best_x = x;
          best_y = y;
        }
      });
    });
    if (best_x < 0) return;
    if (b & bit(best_y)) b = (b & ~bit(best_y)) | bit(best_x);
    a = (a & ~bit(best_x)) | bit(best_y);
  }
}

struct Start {
  Mask a = 0, b = 0;
  std::int64_t crossing = 0;
};

inline std::vector<Start> seeded_bipartitions(const SimpleGraph& g, int half, const DenseConfig& cfg, Rng& rng) {
  std::vector<Start> starts;
  std::vector<int> verts(static_cast<std::size_t>(g.n()));
  std::iota(verts.begin(), verts.end(), 0);
  for (int s = 0; s < cfg.starts; ++s) {
    shuffle(verts, rng);
    Start st;
    for (int i = 0; i < half; ++i) st.a |= bit(verts[i]);
    for (int i = half; i < 2 * half; ++i) st.b |= bit(verts[i]);
    improve_bipartition(g, g.all(), st.a, st.b);
    st.crossing = g.edges_between(st.a, st.b);
    starts.push_back(st);
  }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& x, const Start& y) { return x.crossing > y.crossing; });
  return starts;
}

/// The density-increment descent.  Returns the final dense pair (a, b).
inline Candidate descend(const SimpleGraph& g, Mask a, Mask b, const Rational& eps, int lo, const DenseConfig& cfg) {
  const double e = to_double(eps);
  const double power = e / std::log(1.0 / e);
  const double base = popcount(a);
  while (true) {
    VertexSet v1(g.n(), a), v2(g.n(), b);
    auto verdict = is_eps_dense(g, v1, v2, eps, cfg);
    if (verdict.dense) return {a, b};
    int t = verdict.threshold;
    // trim the witness to exactly t per side, lowest indices kept
    Mask u1 = 0, u2 = 0;
    auto w1 = bits_of(verdict.witness1), w2 = bits_of(verdict.witness2);
    for (int i = 0; i < t; ++i) {
      u1 |= bit(w1[i]);
      u2 |= bit(w2[i]);
    }
    Candidate options[3] = {{u1, b & ~u2}, {a & ~u1, u2}, {a & ~u1, b & ~u2}};
    double best_score = -1e300;
    Candidate best{};
    for (auto& opt : options) {
      auto c = balance(g, opt.a, opt.b);
      int s = popcount(c.a);
      if (s == 0 || s < lo) continue;
      std::int64_t edges = g.edges_between(c.a, c.b);
      if (edges == 0) continue;
      double rho = s / base;
      double score = -power * std::log(rho) + std::log(static_cast<double>(edges) / (static_cast<double>(s) * s));
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best.a == 0) return {0, 0};
    a = best.a;
    b = best.b;
  }
}

}  // namespace detail

struct SizedResult {
  std::optional<DensePair> pair;
  CheckMode mode = CheckMode::exact;  // how the absence claim was reached
};

inline SizedResult find_dense_pair_sized(const SimpleGraph& g, Mask within, const Rational& eps, int lo, int hi,
                                         const DenseConfig& cfg);

/// Balanced eps-dense pair by density increment from the best seeded bipartitions.
inline DensePair find_dense_pair(const SimpleGraph& g, const Rational& eps, const DenseConfig& cfg = {}) {
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "graph has no edges");
  if (eps <= 0 || eps >= cfg.eps0) throw Error(ErrorCode::EpsilonOutOfRange, "eps must lie in (0, eps0)");
  const int n = g.n();
  Rng rng(cfg.seed);
  auto starts = detail::seeded_bipartitions(g, n / 2, cfg, rng);
  detail::Candidate best{};
  int runs = 0;
  for (const auto& st : starts) {
    if (runs >= cfg.descents) break;
    if (st.crossing == 0) continue;
    ++runs;
    auto got = detail::descend(g, st.a, st.b, eps, 1, cfg);
    if (popcount(got.a) > popcount(best.a)) best = got;
  }
  if (best.a == 0) {
    auto [u, v] = g.edges().front();
    best = {bit(u), bit(v)};
  }
  const int target = static_cast<int>(dense_pair_size_bound(n, density(g), eps));
  if (popcount(best.a) < target && target <= n / 2) {
    auto more = find_dense_pair_sized(g, g.all(), eps, target, n / 2, cfg);
    if (more.pair) return *more.pair;
  }
  return DensePair{VertexSet(n, best.a), VertexSet(n, best.b), eps, CheckMode::exact, n};
}

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Number of unordered balanced disjoint pairs with part size in [lo, hi].
inline double balanced_pair_count(int n, int lo, int hi) {
  double total = 0;
  for (int s = lo; s <= hi; ++s) total += binomial(n, s) * binomial(n - s, s) / 2;
  return total;
}

/// Calls f(mask) for every k-subset of the given vertices in lexicographic order; stops when f returns true.
template <typename F>
inline bool for_each_subset_mask(const std::vector<int>& verts, int k, F&& f) {
  const int m = static_cast<int>(verts.size());
  if (k > m) return false;
  if (k == 0) return f(Mask{0});
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Mask s = 0;
    for (int i : idx) s |= bit(verts[i]);
    if (f(s)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::optional<Candidate> exhaustive_sized(const SimpleGraph& g, Mask within, const Rational& eps, int lo, int hi,
                                                 const DenseConfig& cfg) {
  auto verts = bits_of(within);
  std::optional<Candidate> found;
  for (int s = hi; s >= lo && !found; --s) {
    for_each_subset_mask(verts, s, [&](Mask a) {
      // b ranges over subsets of the rest whose lowest vertex exceeds a's lowest, so each pair is seen once
      Mask rest = within & ~a & ~low_mask(lowest(a) + 1);
      // fewer than t vertices of b may miss a entirely
      Mask blind = 0;
      for_each_bit(rest, [&](int v) {
        if (!(g.neighbors(v) & a)) blind |= bit(v);
      });
      const int t = density_threshold(eps, s);
      return for_each_subset_mask(bits_of(rest), s, [&](Mask b) {
        if (popcount(b & blind) >= t) return false;
        if (g.edges_between(a, b) == 0) return false;
        VertexSet v1(g.n(), a), v2(g.n(), b);
        if (is_eps_dense(g, v1, v2, eps, cfg).dense) {
          found = Candidate{a, b};
          return true;
        }
        return false;
      });
    });
  }
  return found;
}

}  // namespace detail

/// An eps-dense pair inside `within` whose part size lies in [lo, hi], if one can be found.
inline SizedResult find_dense_pair_sized(const SimpleGraph& g, Mask within, const Rational& eps, int lo, int hi,
                                         const DenseConfig& cfg = {}) {
  detail::check_eps(eps);
  const int n = popcount(within);
  if (lo < 1 || lo > hi || hi > n / 2) throw Error(ErrorCode::BadRange, "need 1 <= lo <= hi <= n/2");
  SizedResult out;
  auto make = [&](Mask a, Mask b) {
    return DensePair{VertexSet(g.n(), a), VertexSet(g.n(), b), eps, CheckMode::exact, n};
  };
  if (g.edges_within(within) == 0) return out;
  if (lo == 1) {
    // a single edge is a 1x1 dense pair
    for (int u : bits_of(within)) {
      Mask nb = g.neighbors(u) & within;
      if (nb) {
        out.pair = make(bit(u), bit(lowest(nb)));
        return out;
      }
    }
  }
  if (n <= 16 || detail::balanced_pair_count(n, lo, hi) <= static_cast<double>(cfg.exhaustive_budget)) {
    if (auto c = detail::exhaustive_sized(g, within, eps, lo, hi, cfg)) out.pair = make(c->a, c->b);
    return out;
  }
  out.mode = CheckMode::sampled;
  Rng rng(cfg.seed);
  auto verts = bits_of(within);
  for (int s = 0; s < cfg.restarts; ++s) {
    shuffle(verts, rng);
    Mask a = 0, b = 0;
    for (int i = 0; i < hi; ++i) a |= bit(verts[i]);
    for (int i = hi; i < 2 * hi; ++i) b |= bit(verts[i]);
    detail::improve_bipartition(g, within, a, b);
    if (g.edges_between(a, b) == 0) continue;
    auto got = detail::descend(g, a, b, eps, lo, cfg);
    int sz = popcount(got.a);
    if (sz >= lo && sz <= hi) {
      out.pair = make(got.a, got.b);
      return out;
    }
  }
  return out;
}

inline SizedResult find_dense_pair_sized(const SimpleGraph& g, const Rational& eps, int lo, int hi,
                                         const DenseConfig& cfg = {}) {
  return find_dense_pair_sized(g, g.all(), eps, lo, hi, cfg);
}

enum class SparsityVariant { lower_only, interval };
enum class SparsityVerdict { sparse, not_sparse };

inline const char* to_string(SparsityVariant v) { return v == SparsityVariant::lower_only ? "lower_only" : "interval"; }
inline const char* to_string(SparsityVerdict v) { return v == SparsityVerdict::sparse ? "sparse" : "not_sparse"; }

struct SparsityWitness {
  ColorId color = 0;
  Rational x{0};
  Rational upper{1};
  int lo = 1, hi = 0;  // integer part-size window searched
  SparsityVerdict verdict = SparsityVerdict::sparse;
  CheckMode mode = CheckMode::exact;
  std::optional<DensePair> counterexample;
};

/// Searches one color class for a dense pair with part size in [lo, hi].
inline SparsityWitness sparse_in_window(const ColoredCompleteGraph& c, ColorId color, Mask within, const Rational& eps,
                                        int lo, int hi, const DenseConfig& cfg = {}) {
  c.check_color(color);
  SparsityWitness w;
  w.color = color;
  w.lo = std::max(1, lo);
  w.hi = std::min(hi, popcount(within) / 2);
  if (w.lo > w.hi) return w;
  auto res = find_dense_pair_sized(c.color_class(color), within, eps, w.lo, w.hi, cfg);
  w.mode = res.mode;
  if (res.pair) {
    w.verdict = SparsityVerdict::not_sparse;
    w.mode = CheckMode::exact;
    w.counterexample = res.pair;
  }
  return w;
}

/// Window [max(1, ceil(x n)), floor(n/2)] for lower_only, [.., floor(eps n)] for interval.
inline SparsityWitness is_sparse_color(const ColoredCompleteGraph& c, ColorId color, const Rational& x,
                                       const Rational& eps, SparsityVariant variant, const DenseConfig& cfg = {}) {
  c.check_color(color);
  if (x < 0 || x > 1) throw Error(ErrorCode::InvalidArgument, "x must lie in [0,1]");
  const int n = c.n();
  int lo = std::max<int>(1, static_cast<int>(ceil_mul(x, n)));
  int hi = variant == SparsityVariant::lower_only ? n / 2 : static_cast<int>(floor_mul(eps, n));
  auto w = sparse_in_window(c, color, c.color_class(color).all(), eps, lo, hi, cfg);
  w.x = x;
  w.upper = variant == SparsityVariant::lower_only ? Rational(1) : eps;
  return w;
}

enum class IntersectPath { greedy, exhaustive, unresolved };

inline const char* to_string(IntersectPath p) {
  switch (p) {
    case IntersectPath::greedy: return "greedy";
    case IntersectPath::exhaustive: return "exhaustive";
    case IntersectPath::unresolved: return "unresolved";
  }
  return "?";
}

struct IntersectResult {
  std::vector<int> indices;  // ascending
  VertexSet intersection;
  bool meets_bound = false;
  IntersectPath path = IntersectPath::greedy;
};

struct IntersectConfig {
  int min_sets = 8;
  std::int64_t exhaustive_budget = 2'000'000;
};

/// size >= (1 - 2 eps)^k * n, exactly.
inline bool meets_power_bound(int size, const Rational& eps, int k, int n) {
  using boost::multiprecision::cpp_int;
  Rational base = 1 - 2 * eps;
  if (base <= 0) return size >= 0;
  cpp_int lhs = size, rhs = n;
  for (int i = 0; i < k; ++i) {
    lhs *= base.denominator();
    rhs *= base.numerator();
  }
  return lhs >= rhs;
}

/// Chooses ceil(r/4) of the subsets with a large common intersection.
inline IntersectResult intersect_select(const VertexSet& universe, const std::vector<VertexSet>& subsets,
                                        const Rational& eps, const IntersectConfig& cfg = {}) {
  const int r = static_cast<int>(subsets.size());
  const int n = universe.size();
  if (eps < 0 || eps > Rational(1, 2)) throw Error(ErrorCode::InvalidArgument, "eps must lie in [0, 1/2]");
  if (r < cfg.min_sets || r == 0) throw Error(ErrorCode::TooFewSets, "fewer subsets than the configured minimum");
  const std::int64_t need = ceil_mul(1 - eps, n);
  for (const auto& s : subsets) {
    if (!s.is_subset_of(universe)) throw Error(ErrorCode::NotNested, "subset escapes the universe");
    if (s.size() < need) throw Error(ErrorCode::SubsetTooSmall, "subset below (1-eps)|universe|");
  }
  const int k = (r + 3) / 4;
  IntersectResult out;
  Mask cur = universe.mask();
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  for (int step = 0; step < k; ++step) {
    int pick = -1, pick_size = -1;
    for (int i = 0; i < r; ++i) {
      if (used[i]) continue;
      int sz = popcount(cur & subsets[i].mask());
      if (sz > pick_size) {
        pick = i;
        pick_size = sz;
      }
    }
    used[pick] = true;
    cur &= subsets[pick].mask();
    out.indices.push_back(pick);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.intersection = VertexSet(universe.universe_size(), cur);
  out.meets_bound = meets_power_bound(popcount(cur), eps, k, n);
  if (out.meets_bound) return out;

  if (detail::binomial(r, k) > static_cast<double>(cfg.exhaustive_budget)) {
    out.path = IntersectPath::unresolved;
    return out;
  }
  std::vector<int> ids(static_cast<std::size_t>(r));
  std::iota(ids.begin(), ids.end(), 0);
  int best = popcount(cur);
  std::vector<int> best_ids = out.indices;
  Mask best_mask = cur;
  detail::for_each_subset_mask(ids, k, [&](Mask pick) {
    Mask m = universe.mask();
    for_each_bit(pick, [&](int i) { m &= subsets[i].mask(); });
    if (popcount(m) > best) {
      best = popcount(m);
      best_ids = bits_of(pick);
      best_mask = m;
    }
    return false;
  });
  out.indices = best_ids;
  out.intersection = VertexSet(universe.universe_size(), best_mask);
  out.meets_bound = meets_power_bound(best, eps, k, n);
  out.path = IntersectPath::exhaustive;
  return out;
}

}  // namespace fchi
