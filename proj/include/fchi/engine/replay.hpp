#pragma once

// Independent re-verification of a certificate trace.  Only graph-core primitives are shared with the
// engine; density, sparsity, volume and chaining verdicts are recomputed here from scratch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/engine/certificate.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/random.hpp"

namespace fchi {

struct ReplayConfig {
  std::int64_t budget = 2'000'000;  // search nodes per exact claim before falling back to sampling
  int samples = 2000;
  std::uint64_t seed = 7;
  bool require_terminal = true;  // false for a prefix of a trace
};

struct ReplayIssue {
  int step = -1;
  std::string check;
  std::string detail;
};

struct ReplayReport {
  std::vector<ReplayIssue> issues;
  int checks = 0;
  int sampled = 0;  // claims only sampled, not decided

  bool ok() const { return issues.empty(); }
};

namespace replay {

struct Ctx {
  const ColoredCompleteGraph& c;
  const EngineParams& params;
  const ReplayConfig& cfg;
  ReplayReport& rep;
  int step = 0;

  void expect(bool ok, const std::string& check, const std::string& detail = {}) {
    ++rep.checks;
    if (!ok) rep.issues.push_back({step, check, detail});
  }
};

inline std::vector<Mask> adjacency(const ColoredCompleteGraph& c, ColorId col, Mask within) {
  std::vector<Mask> adj(static_cast<std::size_t>(c.n()), 0);
  for (int u : bits_of(within))
    for (int v : bits_of(within))
      if (u != v && c.color_of(u, v) == col) adj[static_cast<std::size_t>(u)] |= bit(v);
  return adj;
}

inline ColorSet used_in(const ColoredCompleteGraph& c, Mask within) {
  ColorSet out;
  auto ids = bits_of(within);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) out.insert(c.color_of(ids[i], ids[j]));
  return out;
}

inline std::int64_t ceil_frac(const Rational& x, std::int64_t m) {
  Rational v = x * m;
  std::int64_t f = v.numerator() / v.denominator();
  return f * v.denominator() == v.numerator() ? f : f + 1;
}

inline std::int64_t floor_frac(const Rational& x, std::int64_t m) {
  Rational v = x * m;
  return v.numerator() / v.denominator();
}

inline Rational eps_power(const Rational& eps, int e) {
  Rational out(1);
  for (int i = 0; i < e; ++i) out *= eps;
  return out;
}

enum class Found { yes, no, unknown };

/// Is (a, b) eps-dense: does every t-subset of a and t-subset of b span an edge, t = ceil(eps s)?
inline Found pair_dense(const std::vector<Mask>& adj, Mask a, Mask b, const Rational& eps, std::int64_t budget) {
  const int s = popcount(a);
  const int t = static_cast<int>(std::max<std::int64_t>(1, ceil_frac(eps, s)));
  auto av = bits_of(a);
  std::int64_t nodes = 0;
  bool blind = false, out_of_budget = false;
  // pick t vertices of a whose common non-neighborhood in b keeps >= t vertices
  auto rec = [&](auto&& self, std::size_t from, int picked, Mask avail) -> void {
    if (blind || out_of_budget) return;
    if (++nodes > budget) {
      out_of_budget = true;
      return;
    }
    if (popcount(avail) < t) return;
    if (picked == t) {
      blind = true;
      return;
    }
    for (std::size_t i = from; i < av.size(); ++i) {
      if (static_cast<int>(av.size() - i) < t - picked) break;
      self(self, i + 1, picked + 1, avail & ~adj[static_cast<std::size_t>(av[i])]);
    }
  };
  rec(rec, 0, 0, b);
  if (blind) return Found::no;
  return out_of_budget ? Found::unknown : Found::yes;
}

/// Any eps-dense pair of color `adj` inside `within` with part size in [lo, hi]?
inline Found has_window_pair(const std::vector<Mask>& adj, Mask within, const Rational& eps, int lo, int hi,
                             const ReplayConfig& cfg) {
  if (lo > hi) return Found::no;
  bool any_edge = false;
  for_each_bit(within, [&](int v) { any_edge = any_edge || (adj[static_cast<std::size_t>(v)] & within); });
  if (!any_edge) return Found::no;
  if (lo <= 1) return Found::yes;
  auto verts = bits_of(within);
  std::int64_t nodes = 0;
  bool found = false, out_of_budget = false;
  for (int s = hi; s >= lo && !found && !out_of_budget; --s) {
    const int t = static_cast<int>(std::max<std::int64_t>(1, ceil_frac(eps, s)));
    // choose a in increasing order; b is then searched among the rest
    auto rec = [&](auto&& self, std::size_t from, Mask a, Mask common) -> void {
      if (found || out_of_budget) return;
      if (++nodes > cfg.budget) {
        out_of_budget = true;
        return;
      }
      if (t == 1 && popcount(common) < s) return;
      if (popcount(a) == s) {
        if (t == 1) {
          found = true;
          return;
        }
        auto rest = bits_of(within & ~a);
        // every b of size s: exhaustive over s-subsets of the rest
        std::vector<int> idx(static_cast<std::size_t>(s));
        if (static_cast<int>(rest.size()) < s) return;
        for (int i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (!found && !out_of_budget) {
          Mask b = 0;
          for (int i : idx) b |= bit(rest[static_cast<std::size_t>(i)]);
          auto d = pair_dense(adj, a, b, eps, cfg.budget);
          if (d == Found::yes) found = true;
          if (d == Found::unknown || ++nodes > cfg.budget) out_of_budget = true;
          int i = s - 1;
          const int m = static_cast<int>(rest.size());
          while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - s + i) --i;
          if (i < 0) break;
          ++idx[static_cast<std::size_t>(i)];
          for (int j = i + 1; j < s; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j) - 1] + 1;
        }
        return;
      }
      for (std::size_t i = from; i < verts.size(); ++i) {
        int v = verts[i];
        self(self, i + 1, a | bit(v), t == 1 ? common & adj[static_cast<std::size_t>(v)] : common);
      }
    };
    rec(rec, 0, 0, within);
  }
  if (found) return Found::yes;
  return out_of_budget ? Found::unknown : Found::no;
}

/// Random balanced pairs as a fallback; finding one decides, not finding one leaves it unknown.
inline bool sampled_window_pair(const std::vector<Mask>& adj, Mask within, const Rational& eps, int lo, int hi,
                                const ReplayConfig& cfg) {
  Rng rng(cfg.seed);
  auto verts = bits_of(within);
  for (int i = 0; i < cfg.samples; ++i) {
    int s = lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
    shuffle(verts, rng);
    Mask a = 0, b = 0;
    for (int j = 0; j < s; ++j) a |= bit(verts[static_cast<std::size_t>(j)]);
    for (int j = s; j < 2 * s; ++j) b |= bit(verts[static_cast<std::size_t>(j)]);
    if (pair_dense(adj, a, b, eps, cfg.budget) == Found::yes) return true;
  }
  return false;
}

inline double log_factor(const ReductionCertificate& cert, const EngineParams& p) {
  switch (cert.kind) {
    case StepKind::q3_case1: return p.log_beta + p.log_alpha_at(0);
    case StepKind::q3_case2: return p.log_beta + p.log_alpha_at(1) + p.log_alpha_at(0);
    case StepKind::not_balanced: return p.log_gamma_at(cert.level - 1);
    case StepKind::balanced: return p.log_gamma_at(p.q - 2);
    default: return 0.0;
  }
}

inline void check_profile(Ctx& x, const RestrictionProfile& p, Mask surviving) {
  const auto k = static_cast<std::size_t>(p.q - 1);
  bool shape = p.q == x.params.q && p.classes.size() == k && p.r_vec.size() == k && p.x_vec.size() == k;
  x.expect(shape, "profile shape");
  if (!shape) return;
  int acc = 0;
  ColorSet seen;
  bool disjoint = true, sizes = true;
  for (std::size_t i = 0; i < k; ++i) {
    acc += static_cast<int>(p.classes[i].size());
    sizes = sizes && p.r_vec[i] == acc;
    for (ColorId col : p.classes[i]) disjoint = seen.insert(col).second && disjoint;
  }
  x.expect(sizes, "profile r_vec matches class sizes");
  x.expect(disjoint, "profile classes disjoint");
  x.expect(p.x_vec[0] == 1.0, "profile x_1 = 1");
  ColorSet used = used_in(x.c, surviving);
  bool covers = std::includes(seen.begin(), seen.end(), used.begin(), used.end());
  x.expect(covers, "profile covers every color used in the set");
  x.expect(p.eps == x.params.eps, "profile eps equals params eps");
}

inline void check_levels(Ctx& x, const LevelStructure& ls, Mask input) {
  const int q = ls.q;
  const Rational ed = eps_power(ls.eps, q - 1);
  x.expect(ls.q == x.params.q && ls.eps == x.params.eps, "level structure parameters");
  x.expect(ls.root == input, "level structure rooted at the input set");
  x.expect(ls.depth() >= 1 && ls.levels[0].pairs.size() == 1, "level 1 is one pair");
  if (ls.depth() < 1 || ls.levels[0].pairs.size() != 1) return;
  const Rational cap = Rational(std::int64_t{1} << (q + 3)) * ls.eps;
  const Rational low = Rational(std::int64_t{1} << (q + 2)) * ls.eps;
  std::vector<std::vector<Mask>> sets(static_cast<std::size_t>(ls.depth()));
  for (int m = 0; m < ls.depth(); ++m) {
    const auto& lvl = ls.levels[static_cast<std::size_t>(m)];
    x.expect(lvl.color == ls.colors.at(static_cast<std::size_t>(m)), "level color recorded");
    auto adj = adjacency(x.c, lvl.color, input);
    std::vector<Mask> seen_in_parent(m == 0 ? 1 : sets[static_cast<std::size_t>(m) - 1].size(), 0);
    std::vector<std::int64_t> fam_vol(seen_in_parent.size(), 0);
    for (const auto& pr : lvl.pairs) {
      Mask parent = m == 0 ? input : 0;
      bool parent_ok = m == 0 ? pr.parent == -1
                              : pr.parent >= 0 && pr.parent < static_cast<int>(sets[static_cast<std::size_t>(m) - 1].size());
      x.expect(parent_ok, "pair parent index valid", "level " + std::to_string(m + 1));
      if (!parent_ok) continue;
      std::size_t pidx = m == 0 ? 0 : static_cast<std::size_t>(pr.parent);
      if (m > 0) parent = sets[static_cast<std::size_t>(m) - 1][pidx];
      const int s = popcount(pr.a);
      x.expect(s > 0 && s == popcount(pr.b) && (pr.a & pr.b) == 0, "pair balanced and disjoint",
               "level " + std::to_string(m + 1));
      x.expect(((pr.a | pr.b) & ~parent) == 0, "pair nested in its parent", "level " + std::to_string(m + 1));
      x.expect(((pr.a | pr.b) & seen_in_parent[pidx]) == 0, "pairs of one parent are disjoint",
               "level " + std::to_string(m + 1));
      seen_in_parent[pidx] |= pr.a | pr.b;
      fam_vol[pidx] += 2 * s;
      if (m > 0) {
        const int vs = popcount(parent);
        std::int64_t lo = std::max<std::int64_t>(1, ceil_real(std::exp(x.params.log_alpha_at(m)), vs));
        std::int64_t hi = floor_frac(ed, vs);
        x.expect(s >= lo && s <= hi, "child part size inside the window",
                 std::to_string(s) + " in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
      }
      auto d = pair_dense(adj, pr.a, pr.b, ed, x.cfg.budget);
      if (d == Found::unknown) ++x.rep.sampled;
      x.expect(d != Found::no, "level pair is eps^{q-1}-dense", "level " + std::to_string(m + 1));
    }
    if (m > 0) {
      const auto& parents = sets[static_cast<std::size_t>(m) - 1];
      for (std::size_t j = 0; j < parents.size(); ++j)
        x.expect(Rational(fam_vol[j]) <= cap * popcount(parents[j]), "family volume <= 2^{q+3} eps |V|");
      std::int64_t up = 0, down = 0;
      for (Mask s : parents) up += popcount(s);
      for (std::int64_t v : fam_vol) down += v;
      x.expect(Rational(down) <= cap * up, "volume chain Vol(L_{m+1}) <= 2^{q+3} eps Vol(L_m)",
               std::to_string(down) + " vs " + std::to_string(up));
      // well-balanced: non-shattered volume of the parents
      std::int64_t vol_n = 0;
      for (std::size_t j = 0; j < parents.size(); ++j) {
        Rational v(fam_vol[j]);
        bool shattered = v >= low * popcount(parents[j]) && v <= cap * popcount(parents[j]);
        if (!shattered) vol_n += popcount(parents[j]);
      }
      x.expect(vol_n * (std::int64_t{1} << (4 * (q - 1))) <= up, "level is well-balanced",
               "level " + std::to_string(m));
    }
    for (const auto& pr : lvl.pairs) {
      sets[static_cast<std::size_t>(m)].push_back(pr.a);
      sets[static_cast<std::size_t>(m)].push_back(pr.b);
    }
  }
}

inline void check_step(Ctx& x, const ReductionCertificate& cert, const ReductionCertificate* prev) {
  const auto& c = x.c;
  const int q = x.params.q;
  const Mask all = low_mask(c.n());
  if (prev == nullptr) {
    x.expect(cert.input_set == all, "first step starts from every vertex");
    ColorSet used = used_in(c, all);
    x.expect(cert.input_profile.classes.size() == static_cast<std::size_t>(q - 1) &&
                 cert.input_profile.classes[0] == used,
             "first step starts unrestricted");
  } else {
    x.expect(cert.input_set == prev->surviving_set, "input set chains from the previous surviving set");
    x.expect(cert.input_profile == prev->output_profile, "input profile chains from the previous output");
  }
  x.expect((cert.surviving_set & ~cert.input_set) == 0, "surviving set inside the input set");
  for (const auto& ch : cert.checks)
    if (ch.mode == CheckMode::exact) x.expect(ch.pass, "recorded check: " + ch.claim, ch.detail);

  const int n = popcount(cert.input_set);
  const int s = popcount(cert.surviving_set);
  switch (cert.kind) {
    case StepKind::q3_case1:
    case StepKind::q3_case2:
    case StepKind::not_balanced:
    case StepKind::balanced: {
      double lf = log_factor(cert, x.params);
      auto sb = size_bound(lf, n);
      std::int64_t bound = sb.value;
      x.expect(cert.declared_bound == bound, "declared bound recomputed",
               std::to_string(cert.declared_bound) + " vs " + std::to_string(bound));
      x.expect(s >= bound, "surviving set meets the declared bound",
               std::to_string(s) + " >= " + std::to_string(bound));
      x.expect(sb.floored == !cert.floors.empty(), "floor events recorded");
      x.expect(s < n, "surviving set strictly smaller");
      check_profile(x, cert.output_profile, cert.surviving_set);
      for (ColorId col : cert.removed_colors) {
        bool clean = true;
        auto ids = bits_of(cert.surviving_set);
        for (std::size_t i = 0; i < ids.size() && clean; ++i)
          for (std::size_t j = i + 1; j < ids.size(); ++j)
            if (c.color_of(ids[i], ids[j]) == col) {
              clean = false;
              break;
            }
        x.expect(clean, "removed color " + std::to_string(col) + " has no edge in the surviving set");
        x.expect(cert.output_profile.class_of(col) < 0, "removed color left the profile");
      }
      if (cert.kind == StepKind::q3_case2 || cert.kind == StepKind::balanced) {
        bool free = true;
        for (std::size_t i = 1; i < cert.output_profile.classes.size(); ++i)
          free = free && cert.output_profile.classes[i].empty();
        x.expect(free, "output profile unrestricted");
      }
      // every restricted color carries a claim, and the claim holds
      const auto& out = cert.output_profile;
      const Rational ed = eps_power(out.eps, q - 1);
      for (std::size_t i = 1; i < out.classes.size(); ++i)
        for (ColorId col : out.classes[i]) {
          auto it = std::find_if(cert.sparsity_claims.begin(), cert.sparsity_claims.end(),
                                 [&](const SparsityClaim& cl) { return cl.color == col; });
          x.expect(it != cert.sparsity_claims.end(), "sparsity claim present for color " + std::to_string(col));
          if (it == cert.sparsity_claims.end()) continue;
          std::int64_t lo = std::max<std::int64_t>(1, ceil_real(out.x_vec[i], s));
          std::int64_t hi = out.variant == SparsityVariant::lower_only ? s / 2 : floor_frac(ed, s);
          hi = std::min<std::int64_t>(hi, s / 2);
          if (lo > hi) lo = 1, hi = 0;
          x.expect(it->lo == lo && it->hi == hi, "sparsity window recomputed",
                   "color " + std::to_string(col) + " [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
          auto adj = adjacency(c, col, cert.surviving_set);
          auto f = has_window_pair(adj, cert.surviving_set, ed, static_cast<int>(lo), static_cast<int>(hi), x.cfg);
          if (f == Found::unknown) {
            ++x.rep.sampled;
            if (sampled_window_pair(adj, cert.surviving_set, ed, static_cast<int>(lo), static_cast<int>(hi), x.cfg))
              f = Found::yes;
          }
          x.expect(f != Found::yes, "color " + std::to_string(col) + " sparse in its window");
        }
      if (cert.levels) check_levels(x, *cert.levels, cert.input_set);
      if (cert.kind == StepKind::balanced && cert.levels)
        x.expect(cert.levels->depth() == q - 1, "balanced step uses q-1 levels");
      if (cert.kind == StepKind::not_balanced && cert.levels)
        x.expect(cert.levels->depth() == cert.level && cert.level < q - 1, "not-balanced level below q-1");
      break;
    }
    case StepKind::precondition_violation: {
      x.expect(cert.violation.has_value(), "violation witness present");
      if (!cert.violation) break;
      const auto& w = *cert.violation;
      x.expect(static_cast<int>(w.colors.size()) <= q, "witness uses at most q colors");
      x.expect((w.vertices & ~cert.input_set) == 0, "witness vertices inside the input set");
      int chi = chromatic_number(union_color_classes(c, w.colors).induced(w.vertices));
      x.expect(chi == w.chi && chi >= (1 << q), "witness chromatic number",
               "recomputed " + std::to_string(chi) + ", recorded " + std::to_string(w.chi));
      break;
    }
    case StepKind::base_case: {
      x.expect(cert.input_profile.r1() < x.params.R, "base case only below R");
      auto it = cert.notes.find("outcome");
      bool halted = it != cert.notes.end() && it->second == "halt";
      if (halted) x.expect(n < cert.halt_bound, "halt below the threshold");
      x.expect(cert.surviving_set == cert.input_set, "base case keeps the set");
      break;
    }
  }
}

}  // namespace replay

/// Re-verifies every step of a trace against the coloring and parameters it was produced from.
inline ReplayReport replay_trace(const ColoredCompleteGraph& c, const EngineParams& params,
                                 const std::vector<ReductionCertificate>& trace, const ReplayConfig& cfg = {}) {
  ReplayReport rep;
  replay::Ctx x{c, params, cfg, rep};
  x.expect(!trace.empty(), "trace is nonempty");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    x.step = static_cast<int>(i);
    replay::check_step(x, trace[i], i == 0 ? nullptr : &trace[i - 1]);
    bool terminal = trace[i].kind == StepKind::base_case || trace[i].kind == StepKind::precondition_violation;
    if (terminal || cfg.require_terminal) x.expect(terminal == (i + 1 == trace.size()), "only the last step is terminal");
  }
  return rep;
}

}  // namespace fchi
