#pragma once
// Brute-force reference implementations used only by the tests.

#include <bit>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "fchi/graph.hpp"
#include "fchi/random.hpp"

namespace oracle {

inline bool colorable(const fchi::SimpleGraph& g, int k) {
  std::vector<int> col(static_cast<std::size_t>(g.n()), -1);
  std::function<bool(int)> go = [&](int v) {
    if (v == g.n()) return true;
    for (int c = 0; c < k; ++c) {
      bool ok = true;
      for (int w = 0; w < v && ok; ++w)
        if (g.has_edge(v, w) && col[w] == c) ok = false;
      if (!ok) continue;
      col[v] = c;
      if (go(v + 1)) return true;
    }
    col[v] = -1;
    return false;
  };
  return go(0);
}

inline int chi(const fchi::SimpleGraph& g) {
  for (int k = 1;; ++k)
    if (colorable(g, k)) return k;
}

inline fchi::SimpleGraph petersen() {
  fchi::SimpleGraph g(10);
  for (int i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

inline fchi::SimpleGraph cycle(int n) {
  fchi::SimpleGraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

// edge {v,w} gets 1 + number of leading equal bits in the r-bit strings
inline int digit_color(int r, int v, int w) {
  for (int i = 1; i <= r; ++i) {
    int b = r - i;
    if (((v >> b) & 1) != ((w >> b) & 1)) return i;
  }
  return 0;
}

inline fchi::SimpleGraph random_graph(int n, double p, std::uint64_t seed) {
  fchi::Rng rng(seed);
  fchi::SimpleGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (fchi::coin(rng, p)) g.add_edge(u, v);
  return g;
}

// Every pair U1 of v1, U2 of v2 with sizes >= t spans an edge.
inline bool dense_by_enumeration(const fchi::SimpleGraph& g, const std::vector<int>& v1, const std::vector<int>& v2,
                                 int t) {
  const int a = static_cast<int>(v1.size()), b = static_cast<int>(v2.size());
  for (std::uint32_t s1 = 0; s1 < (1U << a); ++s1) {
    if (std::popcount(s1) < t) continue;
    for (std::uint32_t s2 = 0; s2 < (1U << b); ++s2) {
      if (std::popcount(s2) < t) continue;
      bool edge = false;
      for (int i = 0; i < a && !edge; ++i)
        if ((s1 >> i) & 1U)
          for (int j = 0; j < b && !edge; ++j)
            if (((s2 >> j) & 1U) && g.has_edge(v1[i], v2[j])) edge = true;
      if (!edge) return false;
    }
  }
  return true;
}

}  // namespace oracle

namespace oracle {

// Does some r-coloring of K_n pass the predicate?  Full enumeration, no pruning.
template <typename Pred>
inline bool some_coloring(int n, int r, Pred&& pred) {
  std::vector<std::pair<int, int>> es;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) es.push_back({u, v});
  std::vector<int> col(es.size(), 1);
  while (true) {
    auto c = fchi::ColoredCompleteGraph::from_function(n, r, [&](int u, int v) {
      for (std::size_t i = 0; i < es.size(); ++i)
        if (es[i] == std::pair<int, int>{u, v}) return col[i];
      return 1;
    });
    if (pred(c)) return true;
    std::size_t i = 0;
    while (i < col.size() && col[i] == r) col[i++] = 1;
    if (i == col.size()) return false;
    ++col[i];
  }
}

inline bool f_predicate(const fchi::ColoredCompleteGraph& c, int p, int q) {
  const int n = c.n();
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    if (std::popcount(s) != p) continue;
    std::set<int> colors;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (((s >> u) & 1U) && ((s >> v) & 1U)) colors.insert(c.color_of(u, v));
    if (static_cast<int>(colors.size()) < q) return false;
  }
  return true;
}

inline bool fchi_predicate(const fchi::ColoredCompleteGraph& c, int p, int q) {
  std::vector<int> all;
  for (int i = 1; i <= c.r(); ++i) all.push_back(i);
  int k = std::min(q - 1, c.r());
  bool ok = true;
  std::function<void(int, fchi::ColorSet&)> rec = [&](int start, fchi::ColorSet& pick) {
    if (!ok) return;
    if (static_cast<int>(pick.size()) == k) {
      if (chi(fchi::union_color_classes(c, pick)) > p - 1) ok = false;
      return;
    }
    for (int i = start; i <= c.r(); ++i) {
      pick.insert(i);
      rec(i + 1, pick);
      pick.erase(i);
    }
  };
  fchi::ColorSet pick;
  rec(1, pick);
  return ok;
}

// Least n <= n_max with no valid coloring, or 0.
template <typename Pred>
inline int least_n(int r, int n_max, Pred&& pred) {
  for (int n = 1; n <= n_max; ++n)
    if (n == 1 ? false : !some_coloring(n, r, pred)) return n;
  return 0;
}

}  // namespace oracle
