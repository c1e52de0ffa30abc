#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "fchi/error.hpp"
#include "fchi/graph.hpp"

namespace fchi {

struct ChromaticConfig {
  int dp_limit = 20;      // subset DP up to this many vertices
  int max_vertices = 64;  // branch-and-bound beyond dp_limit
};

/// A proper coloring: colors[v] in [0, num_colors).
struct GraphColoring {
  int num_colors = 0;
  std::vector<int> colors;

  /// Vertex classes as masks, one per color.
  std::vector<Mask> classes() const {
    std::vector<Mask> out(static_cast<std::size_t>(num_colors), 0);
    for (std::size_t v = 0; v < colors.size(); ++v) out[colors[v]] |= bit(static_cast<int>(v));
    return out;
  }
};

inline bool is_proper_coloring(const SimpleGraph& g, const std::vector<int>& colors) {
  if (static_cast<int>(colors.size()) != g.n()) return false;
  for (auto [u, v] : g.edges())
    if (colors[u] == colors[v]) return false;
  return true;
}

namespace detail {

using u128 = unsigned __int128;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1U) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (n % p == 0) return n == p;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s && composite; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

/// Distinct primes just below 2^61, each contributing 60 bits to a CRT product.
inline const std::vector<std::uint64_t>& crt_primes() {
  static const std::vector<std::uint64_t> primes = [] {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = (std::uint64_t{1} << 61) - 1; out.size() < 24; p -= 2)
      if (is_prime_u64(p)) out.push_back(p);
    return out;
  }();
  return primes;
}

/// Number of independent sets (including the empty set) inside every subset.
inline std::vector<std::uint32_t> independent_set_counts(const SimpleGraph& g) {
  const int n = g.n();
  const std::size_t total = std::size_t{1} << n;
  std::vector<std::uint32_t> ind(total);
  ind[0] = 1;
  for (std::size_t s = 1; s < total; ++s) {
    int v = std::countr_zero(static_cast<Mask>(s));
    Mask without_v = static_cast<Mask>(s) & ~bit(v);
    Mask without_closed = without_v & ~g.neighbors(v);
    ind[s] = ind[without_v] + ind[without_closed];
  }
  return ind;
}

/// Signed sum over subsets of (-1)^{n-|S|} ind[S]^k, reduced mod p.
inline std::uint64_t cover_count_mod(const std::vector<std::uint32_t>& ind, int n, int k, std::uint64_t p) {
  std::uint64_t pos = 0, neg = 0;
  for (std::size_t s = 0; s < ind.size(); ++s) {
    std::uint64_t term = powmod(ind[s], static_cast<std::uint64_t>(k), p);
    if (((n - std::popcount(static_cast<Mask>(s))) & 1) == 0)
      pos = (pos + term) % p;
    else
      neg = (neg + term) % p;
  }
  return (pos + p - neg) % p;
}

/// True iff the number of ordered k-covers by independent sets is exactly zero.
/// The count is below 2^{nk}, so vanishing modulo enough 60-bit primes is a proof.
inline bool no_k_cover(const std::vector<std::uint32_t>& ind, int n, int k) {
  const auto& primes = crt_primes();
  std::size_t needed = static_cast<std::size_t>((n * k) / 60 + 1);
  for (std::size_t i = 0; i < needed; ++i)
    if (cover_count_mod(ind, n, k, primes[i]) != 0) return false;
  return true;
}

inline int chromatic_number_dp(const SimpleGraph& g) {
  const int n = g.n();
  if (n == 0) return 0;
  if (g.edge_count() == 0) return 1;
  auto ind = independent_set_counts(g);
  const std::uint64_t p = crt_primes()[0];
  int k = 1;
  while (cover_count_mod(ind, n, k, p) == 0) ++k;  // first k with a certain cover
  // A zero residue below k may hide a multiple of p; confirm the lower bound exactly.
  while (k > 1 && !no_k_cover(ind, n, k - 1)) --k;
  return k;
}

/// DSATUR branch and bound.  Vertex order ties: higher degree, then lower index.
class DsaturSearch {
 public:
  DsaturSearch(const SimpleGraph& g, int upper_limit) : g_(g), n_(g.n()) {
    best_ = upper_limit;
    color_.assign(n_, -1);
    adj_color_.assign(n_, 0);
    rank_.resize(n_);
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });
    for (int i = 0; i < n_; ++i) rank_[order[i]] = i;
  }

  /// Searches for a coloring with fewer than the current bound colors; lower_bound stops early.
  void run(int lower_bound) {
    lower_bound_ = lower_bound;
    recurse(0, 0);
  }

  bool found() const { return !best_colors_.empty(); }
  int best() const { return best_; }
  const std::vector<int>& best_colors() const { return best_colors_; }

 private:
  int pick_vertex() const {
    int best_v = -1, best_sat = -1, best_deg = -1;
    for (int v = 0; v < n_; ++v) {
      if (color_[v] >= 0) continue;
      int sat = popcount(adj_color_[v]);
      int deg = 0;
      for_each_bit(g_.neighbors(v), [&](int w) { deg += color_[w] < 0 ? 1 : 0; });
      if (sat > best_sat || (sat == best_sat && (deg > best_deg || (deg == best_deg && rank_[v] < rank_[best_v])))) {
        best_v = v;
        best_sat = sat;
        best_deg = deg;
      }
    }
    return best_v;
  }

  bool recurse(int colored, int used) {
    if (colored == n_) {
      if (used < best_) {
        best_ = used;
        best_colors_ = color_;
      }
      return best_ <= lower_bound_;
    }
    int v = pick_vertex();
    for (int c = 0; c < std::min(used + 1, best_ - 1); ++c) {
      if ((adj_color_[v] >> c) & 1U) continue;
      std::vector<int> touched;
      color_[v] = c;
      for_each_bit(g_.neighbors(v), [&](int w) {
        if (color_[w] < 0 && !((adj_color_[w] >> c) & 1U)) {
          touched.push_back(w);
          adj_color_[w] |= Mask{1} << c;
        }
      });
      bool done = recurse(colored + 1, std::max(used, c + 1));
      for (int w : touched) adj_color_[w] &= ~(Mask{1} << c);
      color_[v] = -1;
      if (done) return true;
    }
    return false;
  }

  const SimpleGraph& g_;
  int n_;
  int best_;
  int lower_bound_ = 0;
  std::vector<int> color_;
  std::vector<Mask> adj_color_;
  std::vector<int> rank_;
  std::vector<int> best_colors_;
};

}  // namespace detail

/// Greedy clique grown from each vertex in degree order; a lower bound on chi.
inline int greedy_clique_bound(const SimpleGraph& g) {
  int best = g.n() > 0 ? 1 : 0;
  for (int start = 0; start < g.n(); ++start) {
    Mask cand = g.neighbors(start);
    int size = 1;
    while (cand) {
      int pick = -1, pick_deg = -1;
      for_each_bit(cand, [&](int v) {
        int d = popcount(g.neighbors(v) & cand);
        if (d > pick_deg) {
          pick = v;
          pick_deg = d;
        }
      });
      ++size;
      cand &= g.neighbors(pick);
    }
    best = std::max(best, size);
  }
  return best;
}

/// A proper coloring with at most k colors, if one exists.
inline std::optional<GraphColoring> find_k_coloring(const SimpleGraph& g, int k) {
  if (g.n() == 0) return GraphColoring{0, {}};
  detail::DsaturSearch search(g, k + 1);
  search.run(0);
  if (!search.found()) return std::nullopt;
  return GraphColoring{search.best(), search.best_colors()};
}

/// Exact chi.  Returns at once when a greedy clique meets the greedy DSATUR count; otherwise
/// subset DP for n <= dp_limit, DSATUR branch and bound up to 64.
inline int chromatic_number(const SimpleGraph& g, const ChromaticConfig& cfg = {}) {
  if (g.n() < 1) throw Error(ErrorCode::InvalidArgument, "chromatic_number needs n >= 1");
  if (g.n() > cfg.max_vertices) throw Error(ErrorCode::TooLarge, "exact chi kernel limited to 64 vertices");
  if (g.edge_count() == 0) return 1;
  int lb = greedy_clique_bound(g);
  detail::DsaturSearch greedy(g, g.n() + 1);
  greedy.run(g.n());  // first leaf only
  if (greedy.best() == lb) return lb;
  if (g.n() <= cfg.dp_limit) return detail::chromatic_number_dp(g);
  detail::DsaturSearch search(g, g.n() + 1);
  search.run(lb);
  return search.best();
}

/// Exact chi together with an optimal proper coloring.
inline GraphColoring optimal_coloring(const SimpleGraph& g, const ChromaticConfig& cfg = {}) {
  int chi = chromatic_number(g, cfg);
  if (g.edge_count() == 0) return GraphColoring{1, std::vector<int>(static_cast<std::size_t>(g.n()), 0)};
  auto col = find_k_coloring(g, chi);
  if (!col) throw Error(ErrorCode::GuaranteeFailed, "coloring extractor disagrees with chi");
  return *col;
}

struct PqVerdict {
  bool holds = true;
  ColorSet witness_colors;  // the offending (q-1)-union when !holds
  int witness_chi = 0;
  int unions_checked = 0;
};

namespace detail {
template <typename F>
inline bool for_each_k_subset(const std::vector<int>& items, int k, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  const int m = static_cast<int>(items.size());
  if (k > m) return true;
  while (true) {
    std::vector<int> pick;
    pick.reserve(idx.size());
    for (int i : idx) pick.push_back(items[i]);
    if (!f(pick)) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}
}  // namespace detail

/// Does every union of q-1 used color classes have chi <= p-1?
inline PqVerdict is_chromatic_pq_coloring(const ColoredCompleteGraph& c, int p, int q,
                                          const ChromaticConfig& cfg = {}) {
  if (p < 3) throw Error(ErrorCode::InvalidArgument, "p must be >= 3");
  if (q < 2 || q > p * (p - 1) / 2) throw Error(ErrorCode::InvalidArgument, "q must lie in [2, C(p,2)]");
  if (c.n() > cfg.max_vertices) throw Error(ErrorCode::TooLarge, "coloring above 64 vertices");
  PqVerdict verdict;
  ColorSet used = c.used_colors();
  std::vector<int> used_vec(used.begin(), used.end());
  const int k = q - 1;
  auto check = [&](const std::vector<int>& pick) {
    ColorSet colors(pick.begin(), pick.end());
    int chi = chromatic_number(union_color_classes(c, colors), cfg);
    ++verdict.unions_checked;
    if (chi > p - 1) {
      verdict.holds = false;
      verdict.witness_chi = chi;
      // pad with the lowest unused ids so the witness names q-1 colors when possible
      for (int col = 1; col <= c.r() && static_cast<int>(colors.size()) < k; ++col) colors.insert(col);
      verdict.witness_colors = colors;
      return false;
    }
    return true;
  };
  if (static_cast<int>(used_vec.size()) <= k)
    check(used_vec);
  else
    detail::for_each_k_subset(used_vec, k, check);
  return verdict;
}

}  // namespace fchi
