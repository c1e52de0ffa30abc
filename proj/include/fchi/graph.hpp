#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fchi/error.hpp"
#include "fchi/rational.hpp"
#include "fchi/vertex_set.hpp"

namespace fchi {

using ColorId = int;                 // 1-indexed
using ColorSet = std::set<ColorId>;  // ordered for deterministic iteration

/// Undirected simple graph on at most 64 vertices, one adjacency word per vertex.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n), 0) {
    if (n < 0 || n > kMaxVertices) throw Error(ErrorCode::TooLarge, "graph above 64 vertices");
  }

  static SimpleGraph complete(int n) {
    SimpleGraph g(n);
    for (int v = 0; v < n; ++v) g.adj_[v] = low_mask(n) & ~bit(v);
    return g;
  }

  static SimpleGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    SimpleGraph g(n);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
  }

  int n() const { return n_; }

  void add_edge(int u, int v) {
    if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_)
      throw Error(ErrorCode::InvalidArgument, "bad edge " + std::to_string(u) + "-" + std::to_string(v));
    adj_[u] |= bit(v);
    adj_[v] |= bit(u);
  }

  void remove_edge(int u, int v) {
    adj_[u] &= ~bit(v);
    adj_[v] &= ~bit(u);
  }

  bool has_edge(int u, int v) const { return (adj_[u] >> v) & 1U; }
  Mask neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return popcount(adj_[v]); }
  Mask all() const { return low_mask(n_); }

  std::int64_t edge_count() const {
    std::int64_t twice = 0;
    for (Mask m : adj_) twice += popcount(m);
    return twice / 2;
  }

  /// Number of edges with both ends in `within`.
  std::int64_t edges_within(Mask within) const {
    std::int64_t twice = 0;
    for_each_bit(within, [&](int v) { twice += popcount(adj_[v] & within); });
    return twice / 2;
  }

  /// e(A, B) for disjoint A, B.
  std::int64_t edges_between(Mask a, Mask b) const {
    std::int64_t e = 0;
    for_each_bit(a, [&](int v) { e += popcount(adj_[v] & b); });
    return e;
  }

  SimpleGraph complement() const {
    SimpleGraph g(n_);
    for (int v = 0; v < n_; ++v) g.adj_[v] = ~adj_[v] & low_mask(n_) & ~bit(v);
    return g;
  }

  /// Induced subgraph on `keep`, relabelled to 0..|keep|-1 in ascending order.
  SimpleGraph induced(Mask keep) const {
    std::vector<int> ids = bits_of(keep);
    SimpleGraph g(static_cast<int>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (has_edge(ids[i], ids[j])) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
  }

  /// Edges restricted to `keep`, same labels.
  SimpleGraph restricted(Mask keep) const {
    SimpleGraph g(n_);
    for (int v = 0; v < n_; ++v) g.adj_[v] = ((keep >> v) & 1U) ? (adj_[v] & keep) : 0;
    return g;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
      for_each_bit(adj_[u] & ~low_mask(u + 1), [&](int v) { out.emplace_back(u, v); });
    return out;
  }

  friend bool operator==(const SimpleGraph&, const SimpleGraph&) = default;

 private:
  int n_ = 0;
  std::vector<Mask> adj_;
};

/// Exact 2|E| / (n(n-1)).
inline Rational density(const SimpleGraph& g) {
  if (g.n() < 2) throw Error(ErrorCode::DegenerateGraph, "density needs at least 2 vertices");
  std::int64_t n = g.n();
  return Rational(2 * g.edge_count(), n * (n - 1));
}

/// An r-coloring of the edges of K_n, colors in [1, r].
class ColoredCompleteGraph {
 public:
  ColoredCompleteGraph() = default;

  template <typename F>
  static ColoredCompleteGraph from_function(int n, int r, F&& color_of) {
    ColoredCompleteGraph c(n, r);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) c.assign(u, v, color_of(u, v));
    return c;
  }

  /// Every pair u < v must appear exactly once.
  static ColoredCompleteGraph from_edges(int n, int r, const std::vector<std::tuple<int, int, int>>& edges) {
    ColoredCompleteGraph c(n, r);
    std::int64_t expected = static_cast<std::int64_t>(n) * (n - 1) / 2;
    if (static_cast<std::int64_t>(edges.size()) != expected)
      throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(expected) + " edges, got " +
                                                  std::to_string(edges.size()));
    for (auto [u, v, col] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n || u >= v)
        throw Error(ErrorCode::InvalidArgument, "bad edge " + std::to_string(u) + "-" + std::to_string(v));
      if (c.color_of(u, v) != 0)
        throw Error(ErrorCode::InvalidArgument, "duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
      c.assign(u, v, col);
    }
    return c;
  }

  int n() const { return n_; }
  int r() const { return r_; }

  /// 0 only for u == v.
  int color_of(int u, int v) const { return colors_[static_cast<std::size_t>(u) * n_ + v]; }

  /// Adjacency word of vertex v inside color class `col`.
  Mask class_neighbors(ColorId col, int v) const {
    return class_adj_[static_cast<std::size_t>(col - 1) * n_ + v];
  }

  SimpleGraph color_class(ColorId col) const {
    check_color(col);
    SimpleGraph g(n_);
    for (int u = 0; u < n_; ++u)
      for_each_bit(class_neighbors(col, u) & ~low_mask(u + 1), [&](int v) { g.add_edge(u, v); });
    return g;
  }

  std::int64_t class_edge_count(ColorId col) const {
    std::int64_t twice = 0;
    for (int v = 0; v < n_; ++v) twice += popcount(class_neighbors(col, v));
    return twice / 2;
  }

  bool has_edge_within(ColorId col, Mask within) const {
    bool found = false;
    for_each_bit(within, [&](int v) { found = found || (class_neighbors(col, v) & within) != 0; });
    return found;
  }

  ColorSet used_colors() const {
    ColorSet out;
    for (int col = 1; col <= r_; ++col)
      if (class_edge_count(col) > 0) out.insert(col);
    return out;
  }

  ColorSet used_colors_within(Mask within) const {
    ColorSet out;
    for (int col = 1; col <= r_; ++col)
      if (has_edge_within(col, within)) out.insert(col);
    return out;
  }

  void check_color(ColorId col) const {
    if (col < 1 || col > r_)
      throw Error(ErrorCode::UnknownColor, "color " + std::to_string(col) + " outside [1," + std::to_string(r_) + "]");
  }

  /// Induced coloring on `keep`, relabelled ascending; same palette.
  ColoredCompleteGraph induced(Mask keep) const {
    std::vector<int> ids = bits_of(keep);
    int m = static_cast<int>(ids.size());
    return from_function(m, r_, [&](int a, int b) { return color_of(ids[a], ids[b]); });
  }

  friend bool operator==(const ColoredCompleteGraph& a, const ColoredCompleteGraph& b) {
    return a.n_ == b.n_ && a.r_ == b.r_ && a.colors_ == b.colors_;
  }

 private:
  ColoredCompleteGraph(int n, int r) : n_(n), r_(r) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "coloring needs n >= 1");
    if (n > kMaxVertices) throw Error(ErrorCode::TooLarge, "coloring above 64 vertices");
    if (r < 1 || r > 64) throw Error(ErrorCode::InvalidArgument, "palette size must be in [1, 64]");
    colors_.assign(static_cast<std::size_t>(n) * n, 0);
    class_adj_.assign(static_cast<std::size_t>(r) * n, 0);
  }

  void assign(int u, int v, int col) {
    check_color(col);
    colors_[static_cast<std::size_t>(u) * n_ + v] = static_cast<std::uint8_t>(col);
    colors_[static_cast<std::size_t>(v) * n_ + u] = static_cast<std::uint8_t>(col);
    class_adj_[static_cast<std::size_t>(col - 1) * n_ + u] |= bit(v);
    class_adj_[static_cast<std::size_t>(col - 1) * n_ + v] |= bit(u);
  }

  int n_ = 0;
  int r_ = 0;
  std::vector<std::uint8_t> colors_;
  std::vector<Mask> class_adj_;
};

/// Edges of K_n whose color lies in `colors`.
inline SimpleGraph union_color_classes(const ColoredCompleteGraph& c, const ColorSet& colors) {
  for (ColorId col : colors) c.check_color(col);
  SimpleGraph g(c.n());
  for (int u = 0; u < c.n(); ++u) {
    Mask row = 0;
    for (ColorId col : colors) row |= c.class_neighbors(col, u);
    for_each_bit(row & ~low_mask(u + 1), [&](int v) { g.add_edge(u, v); });
  }
  return g;
}

}  // namespace fchi
