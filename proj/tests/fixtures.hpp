#pragma once

// Coloring generators shared by the engine, io and acceptance tests.

#include <array>
#include <numeric>
#include <vector>

#include "fchi/fchi.hpp"

namespace fixtures {

using namespace fchi;

/// 1-factorization of K_n (n even): every class is a perfect matching, r = n - 1.
/// Odd n drops the last vertex of the K_{n+1} factorization.
inline ColoredCompleteGraph round_robin(int n) {
  const int m = n % 2 == 0 ? n : n + 1;
  return ColoredCompleteGraph::from_function(n, m - 1, [m](int u, int v) {
    if (v == m - 1) return u + 1;
    if (u == m - 1) return v + 1;
    return (u + v) * (m / 2) % (m - 1) + 1;
  });
}

/// Circulant classes: color of {u, v} is the cyclic distance, so each class has max degree 2; r = n / 2.
inline ColoredCompleteGraph circulant_distance(int n) {
  return ColoredCompleteGraph::from_function(n, n / 2, [n](int u, int v) {
    int d = v - u;
    return d > n / 2 ? n - d : d;
  });
}

/// A 5-coloring of K_20 on Z_20 by cyclic distance whose 3-unions all have chromatic number <= 7.
inline ColoredCompleteGraph k20_five_colors() {
  static constexpr std::array<int, 11> col{0, 2, 1, 5, 5, 4, 3, 1, 4, 3, 2};
  return ColoredCompleteGraph::from_function(20, 5, [](int u, int v) {
    int d = v - u;
    return col[static_cast<std::size_t>(d > 10 ? 20 - d : d)];
  });
}

/// Uniformly random coloring with r colors.
inline ColoredCompleteGraph random_coloring(int n, int r, Rng& rng) {
  return ColoredCompleteGraph::from_function(
      n, r, [&](int, int) { return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(r))) + 1; });
}

/// Same coloring with vertices and colors renamed by seeded permutations.
inline ColoredCompleteGraph relabel(const ColoredCompleteGraph& c, Rng& rng) {
  std::vector<int> pv(static_cast<std::size_t>(c.n())), pc(static_cast<std::size_t>(c.r()));
  std::iota(pv.begin(), pv.end(), 0);
  std::iota(pc.begin(), pc.end(), 1);
  shuffle(pv, rng);
  shuffle(pc, rng);
  std::vector<std::vector<int>> inv(static_cast<std::size_t>(c.n()), std::vector<int>(static_cast<std::size_t>(c.n())));
  for (int u = 0; u < c.n(); ++u)
    for (int v = u + 1; v < c.n(); ++v) {
      int col = pc[static_cast<std::size_t>(c.color_of(u, v) - 1)];
      inv[static_cast<std::size_t>(pv[static_cast<std::size_t>(u)])][static_cast<std::size_t>(pv[static_cast<std::size_t>(v)])] = col;
      inv[static_cast<std::size_t>(pv[static_cast<std::size_t>(v)])][static_cast<std::size_t>(pv[static_cast<std::size_t>(u)])] = col;
    }
  return ColoredCompleteGraph::from_function(
      c.n(), c.r(), [&](int u, int v) { return inv[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]; });
}

/// Manual parameters with every alpha equal to `alpha` and beta = 1.
inline EngineParams manual_params(int q, int r, int n, Rational eps, double alpha, int R = 2, int gamma_base = 0) {
  EngineParams p;
  p.q = q;
  p.r = r;
  p.n = n;
  p.eps = eps;
  p.log_alpha.assign(static_cast<std::size_t>(q - 1), std::log(alpha));
  p.log_beta = 0.0;
  p.z = Rational(1);
  p.source = ParamSource::manual;
  p.path = EnginePath::general;
  p.R = R;
  p.gamma_base = gamma_base;
  return validate_manual(p);
}

}  // namespace fixtures
