#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/constructions.hpp"
#include "fchi/error.hpp"
#include "fchi/graph.hpp"

namespace fchi {

enum class SearchKind { F, F_chi };
enum class EdgeOrder { column, row };

inline const char* to_string(SearchKind k) { return k == SearchKind::F ? "F" : "Fchi"; }

struct SearchConfig {
  std::int64_t node_budget = 100'000'000;
  double time_limit_seconds = 600.0;
  bool symmetry_breaking = true;  // color normalization + canonical-form rejection
  EdgeOrder order = EdgeOrder::column;
  int workers = 1;
  int split_depth = 4;  // edges fixed per prefix when workers > 1
};

struct SearchResult {
  SearchKind kind = SearchKind::F;
  int r = 0, p = 0, q = 0;
  std::optional<int> value;
  int unknown_above = 0;  // meaningful when !value: the answer exceeds this n
  std::optional<ColoredCompleteGraph> extremal_witness;
  std::int64_t nodes_expanded = 0;
  double wall_time = 0.0;
};

class SearchBudgetExceeded : public Error {
 public:
  SearchBudgetExceeded(const std::string& what, SearchResult partial)
      : Error(ErrorCode::BudgetExceeded, what), partial_(std::move(partial)) {}
  const SearchResult& partial() const { return partial_; }

 private:
  SearchResult partial_;
};

namespace detail {

constexpr int kSearchMaxN = 16;
constexpr int kSearchMaxR = 8;

struct BudgetHit {};

/// Backtracking over colorings of K_n edge by edge.
class ColoringSearch {
 public:
  ColoringSearch(SearchKind kind, int n, int r, int p, int q, const SearchConfig& cfg, std::atomic<std::int64_t>& nodes,
                 std::chrono::steady_clock::time_point deadline)
      : kind_(kind), n_(n), r_(r), p_(p), q_(q), cfg_(cfg), nodes_(nodes), deadline_(deadline) {
    for (auto& row : col_) row.fill(0);
    for (auto& c : adj_) c.fill(0);
    if (cfg.order == EdgeOrder::column) {
      for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u) edges_.push_back({u, v});
    } else {
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges_.push_back({u, v});
    }
    int k = std::min(q - 1, r);
    std::vector<int> colors;
    for (int c = 1; c <= r; ++c) colors.push_back(c);
    for_each_k_subset(colors, k, [&](const std::vector<int>& pick) {
      unsigned m = 0;
      for (int c : pick) m |= 1U << c;
      unions_.push_back(m);
      return true;
    });
  }

  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Enumerates assignments of the first `depth` edges that survive pruning, in search order.
  std::vector<std::vector<int>> prefixes(int depth) {
    std::vector<std::vector<int>> out;
    collect(0, depth, out);
    return out;
  }

  /// Tries to complete the given prefix; true when a valid coloring of K_n was found.
  bool solve(const std::vector<int>& prefix) {
    for (std::size_t e = 0; e < prefix.size(); ++e) {
      if (!place(static_cast<int>(e), prefix[e])) return false;
    }
    return dfs(static_cast<int>(prefix.size()));
  }

  ColoredCompleteGraph witness() const {
    return ColoredCompleteGraph::from_function(n_, r_, [&](int u, int v) { return static_cast<int>(col_[u][v]); });
  }

 private:
  // assigns edge e; returns false when the partial coloring is already invalid
  bool place(int e, int c) {
    auto [u, v] = edges_[e];
    set(u, v, c);
    if (!edge_ok(u, v, c)) return false;
    if (cfg_.order == EdgeOrder::column && u == v - 1) {
      if (!vertex_ok(v)) return false;
      if (cfg_.symmetry_breaking && !canonical(v + 1)) return false;
    }
    return true;
  }

  void set(int u, int v, int c) {
    col_[u][v] = col_[v][u] = static_cast<std::int8_t>(c);
    adj_[c][u] |= 1U << v;
    adj_[c][v] |= 1U << u;
    max_color_ = std::max(max_color_, c);
  }

  void unset(int u, int v, int c, int prev_max) {
    col_[u][v] = col_[v][u] = 0;
    adj_[c][u] &= ~(1U << v);
    adj_[c][v] &= ~(1U << u);
    max_color_ = prev_max;
  }

  void tick() {
    std::int64_t k = ++nodes_;
    if (k > cfg_.node_budget) throw BudgetHit{};
    if ((k & 4095) == 0 && std::chrono::steady_clock::now() > deadline_) throw BudgetHit{};
  }

  bool dfs(int e) {
    if (e == edge_count()) return kind_ == SearchKind::F || cfg_.order == EdgeOrder::column || full_check();
    auto [u, v] = edges_[e];
    int limit = cfg_.symmetry_breaking ? std::min(r_, max_color_ + 1) : r_;
    for (int c = 1; c <= limit; ++c) {
      tick();
      int prev = max_color_;
      if (place(e, c) && dfs(e + 1)) return true;
      unset(u, v, c, prev);
    }
    return false;
  }

  void collect(int e, int depth, std::vector<std::vector<int>>& out) {
    if (e == depth || e == edge_count()) {
      std::vector<int> pre;
      for (int i = 0; i < e; ++i) pre.push_back(col_[edges_[i].first][edges_[i].second]);
      out.push_back(pre);
      return;
    }
    auto [u, v] = edges_[e];
    int limit = cfg_.symmetry_breaking ? std::min(r_, max_color_ + 1) : r_;
    for (int c = 1; c <= limit; ++c) {
      int prev = max_color_;
      if (place(e, c)) collect(e + 1, depth, out);
      unset(u, v, c, prev);
    }
  }

  bool assigned(int a, int b) const { return col_[a][b] != 0; }

  bool edge_ok(int u, int v, int c) const {
    if (kind_ == SearchKind::F) return f_edge_ok(u, v);
    for (unsigned m : unions_) {
      if (!((m >> c) & 1U)) continue;
      if (has_clique_through(u, v, m)) return false;
    }
    return true;
  }

  // every p-subset containing u, v with all edges assigned spans >= q colors
  bool f_edge_ok(int u, int v) const {
    std::vector<int> others;
    for (int w = 0; w < n_; ++w)
      if (w != u && w != v && assigned(u, w) && assigned(v, w)) others.push_back(w);
    std::array<int, kSearchMaxN> pick{};
    bool ok = true;
    auto rec = [&](auto&& self, int start, int depth, unsigned colors) -> void {
      if (!ok) return;
      if (depth == p_ - 2) {
        if (std::popcount(colors) < q_) ok = false;
        return;
      }
      for (std::size_t i = start; i < others.size(); ++i) {
        int w = others[i];
        bool full = true;
        unsigned add = (1U << col_[u][w]) | (1U << col_[v][w]);
        for (int j = 0; j < depth && full; ++j) {
          if (!assigned(pick[j], w)) full = false;
          else add |= 1U << col_[pick[j]][w];
        }
        if (!full) continue;
        pick[depth] = w;
        self(self, static_cast<int>(i) + 1, depth + 1, colors | add);
      }
    };
    rec(rec, 0, 0, 1U << col_[u][v]);
    return ok;
  }

  unsigned union_adj(unsigned colors, int x) const {
    unsigned out = 0;
    for (int c = 1; c <= r_; ++c)
      if ((colors >> c) & 1U) out |= adj_[c][x];
    return out;
  }

  bool has_clique_through(int u, int v, unsigned colors) const {
    unsigned cand = union_adj(colors, u) & union_adj(colors, v);
    return clique_at_least(cand, p_ - 2, colors);
  }

  bool clique_at_least(unsigned cand, int need, unsigned colors) const {
    if (need <= 0) return true;
    if (std::popcount(cand) < need) return false;
    while (cand) {
      int x = std::countr_zero(cand);
      cand &= cand - 1;
      if (clique_at_least(cand & union_adj(colors, x), need - 1, colors)) return true;
    }
    return false;
  }

  SimpleGraph union_graph(unsigned colors, int k) const {
    SimpleGraph g(k);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if ((colors >> col_[a][b]) & 1U) g.add_edge(a, b);
    return g;
  }

  // unions touching vertex v's column stay (p-1)-colorable on 0..v
  bool vertex_ok(int v) const {
    if (kind_ == SearchKind::F) return true;
    if (v + 1 <= p_ - 1) return true;
    unsigned column = 0;
    for (int u = 0; u < v; ++u) column |= 1U << col_[u][v];
    for (unsigned m : unions_) {
      if (!(m & column)) continue;
      if (chromatic_number(union_graph(m, v + 1)) > p_ - 1) return false;
    }
    return true;
  }

  bool full_check() const {
    for (unsigned m : unions_)
      if (chromatic_number(union_graph(m, n_)) > p_ - 1) return false;
    return true;
  }

  // Is the column-order code of K_k, colors renamed by first occurrence, minimal over vertex relabelings?
  bool canonical(int k) const {
    std::array<int, kSearchMaxN> perm{};
    std::array<int, kSearchMaxR + 1> cmap{};
    return canon_rec(k, 0, 0U, perm, cmap, 0) != Cmp::less;
  }

  enum class Cmp { less, equal, greater };

  Cmp canon_rec(int k, int pos, unsigned used, std::array<int, kSearchMaxN>& perm, std::array<int, kSearchMaxR + 1> cmap,
                int next_color) const {
    if (pos == k) return Cmp::equal;
    for (int w = 0; w < k; ++w) {
      if ((used >> w) & 1U) continue;
      auto map = cmap;
      int nc = next_color;
      Cmp cmp = Cmp::equal;
      for (int i = 0; i < pos && cmp == Cmp::equal; ++i) {
        int raw = col_[perm[i]][w];
        if (map[raw] == 0) map[raw] = ++nc;
        int mine = col_[i][pos];
        if (map[raw] < mine) cmp = Cmp::less;
        else if (map[raw] > mine) cmp = Cmp::greater;
      }
      if (cmp == Cmp::less) return Cmp::less;
      if (cmp == Cmp::greater) continue;
      perm[pos] = w;
      if (canon_rec(k, pos + 1, used | (1U << w), perm, map, nc) == Cmp::less) return Cmp::less;
    }
    return Cmp::equal;
  }

  SearchKind kind_;
  int n_, r_, p_, q_;
  const SearchConfig& cfg_;
  std::atomic<std::int64_t>& nodes_;
  std::chrono::steady_clock::time_point deadline_;
  std::array<std::array<std::int8_t, kSearchMaxN>, kSearchMaxN> col_{};
  std::array<std::array<unsigned, kSearchMaxN>, kSearchMaxR + 1> adj_{};
  std::vector<std::pair<int, int>> edges_;
  std::vector<unsigned> unions_;
  int max_color_ = 0;
};

/// Is there a valid coloring of K_n?  Returns it if so.
inline std::optional<ColoredCompleteGraph> find_valid_coloring(SearchKind kind, int n, int r, int p, int q,
                                                               const SearchConfig& cfg,
                                                               std::atomic<std::int64_t>& nodes,
                                                               std::chrono::steady_clock::time_point deadline) {
  if (cfg.workers <= 1) {
    ColoringSearch s(kind, n, r, p, q, cfg, nodes, deadline);
    if (s.solve({})) return s.witness();
    return std::nullopt;
  }
  ColoringSearch splitter(kind, n, r, p, q, cfg, nodes, deadline);
  auto prefixes = splitter.prefixes(std::min(cfg.split_depth, splitter.edge_count()));
  const std::size_t none = prefixes.size();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{none};
  std::vector<std::optional<ColoredCompleteGraph>> found(prefixes.size());
  std::atomic<bool> budget_hit{false};
  auto worker = [&] {
    try {
      while (true) {
        std::size_t i = next++;
        if (i >= prefixes.size() || i > best.load()) return;
        ColoringSearch s(kind, n, r, p, q, cfg, nodes, deadline);
        if (s.solve(prefixes[i])) {
          found[i] = s.witness();
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
      }
    } catch (const BudgetHit&) {
      budget_hit = true;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (budget_hit) throw BudgetHit{};
  if (best.load() == none) return std::nullopt;
  return found[best.load()];
}

inline SearchResult run_search(SearchKind kind, int r, int p, int q, int n_max, const SearchConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg.time_limit_seconds));
  SearchResult res;
  res.kind = kind;
  res.r = r;
  res.p = p;
  res.q = q;
  std::atomic<std::int64_t> nodes{0};
  std::optional<ColoredCompleteGraph> last;
  for (int n = 1; n <= n_max; ++n) {
    std::optional<ColoredCompleteGraph> got;
    try {
      got = find_valid_coloring(kind, n, r, p, q, cfg, nodes, deadline);
    } catch (const BudgetHit&) {
      res.unknown_above = n - 1;
      res.extremal_witness = last;
      res.nodes_expanded = nodes.load();
      res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      throw SearchBudgetExceeded("search budget exhausted at n = " + std::to_string(n), res);
    }
    if (!got) {
      res.value = n;
      res.extremal_witness = last;
      break;
    }
    last = std::move(got);
  }
  if (!res.value) {
    res.unknown_above = n_max;
    res.extremal_witness = last;
  }
  res.nodes_expanded = nodes.load();
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline void check_search_args(int r, int n_max) {
  if (r < 1 || r > kSearchMaxR) throw Error(ErrorCode::InvalidArgument, "search supports 1 <= r <= 8");
  if (n_max < 1 || n_max > kSearchMaxN) throw Error(ErrorCode::InvalidArgument, "search supports 1 <= n_max <= 16");
}

}  // namespace detail

/// Least n such that every r-coloring of K_n has a (q-1)-union with chi >= p.
inline SearchResult compute_F_chi(int r, int p, int q, int n_max, const SearchConfig& cfg = {}) {
  if (p < 3) throw Error(ErrorCode::InvalidArgument, "F_chi needs p >= 3");
  if (q < 2 || q > p * (p - 1) / 2) throw Error(ErrorCode::InvalidArgument, "F_chi needs 2 <= q <= C(p,2)");
  detail::check_search_args(r, n_max);
  return detail::run_search(SearchKind::F_chi, r, p, q, n_max, cfg);
}

/// Least n such that every r-coloring of K_n has p vertices spanning at most q-1 colors.
inline SearchResult compute_F(int r, int p, int q, int n_max, const SearchConfig& cfg = {}) {
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "F needs p >= 2");
  // q = C(p,2) + 1 is admitted so that F(r,2,2) is expressible
  if (q < 2 || q > p * (p - 1) / 2 + 1) throw Error(ErrorCode::InvalidArgument, "F needs 2 <= q <= C(p,2) + 1");
  detail::check_search_args(r, n_max);
  return detail::run_search(SearchKind::F, r, p, q, n_max, cfg);
}

struct TableEntry {
  SearchKind kind;
  int r, p, q, n_max;
};

struct OrderingCheck {
  Triple parameters;
  int f_chi = 0, f = 0;
  bool ok = true;
};

struct TableReport {
  std::vector<SearchResult> rows;
  BoundReport recurrence;
  std::vector<OrderingCheck> ordering;
  bool consistent() const {
    if (!recurrence.passed()) return false;
    for (const auto& o : ordering)
      if (!o.ok) return false;
    return true;
  }
};

/// Runs every entry, then checks the recurrence and F_chi <= F on the exact values.
inline TableReport tabulate(const std::vector<TableEntry>& spec, const SearchConfig& cfg = {}) {
  TableReport rep;
  std::map<Triple, std::int64_t> f_values, fchi_values;
  for (const auto& e : spec) {
    SearchResult res;
    try {
      res = e.kind == SearchKind::F ? compute_F(e.r, e.p, e.q, e.n_max, cfg) : compute_F_chi(e.r, e.p, e.q, e.n_max, cfg);
    } catch (const SearchBudgetExceeded& ex) {
      res = ex.partial();
    }
    if (res.value) (e.kind == SearchKind::F ? f_values : fchi_values)[{e.r, e.p, e.q}] = *res.value;
    rep.rows.push_back(std::move(res));
  }
  rep.recurrence = check_recurrence(f_values);
  for (const auto& [key, fc] : fchi_values) {
    auto it = f_values.find(key);
    if (it == f_values.end()) continue;
    rep.ordering.push_back({key, static_cast<int>(fc), static_cast<int>(it->second), fc <= it->second});
  }
  return rep;
}

}  // namespace fchi
