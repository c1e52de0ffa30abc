#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/constructions.hpp"
#include "fchi/engine/certificate.hpp"
#include "fchi/engine/common.hpp"
#include "fchi/engine/levels.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/engine/profile.hpp"
#include "fchi/search.hpp"

namespace fchi {

namespace detail {

inline constexpr double kMaxX = 1e300;

inline double clamp_x(double x) { return std::isfinite(x) ? std::min(x, kMaxX) : kMaxX; }

inline void declare_bound(ReductionCertificate& cert, double log_factor, const std::string& what) {
  const int n = popcount(cert.input_set);
  auto b = size_bound(log_factor, n);
  cert.declared_bound = b.value;
  cert.log_bound_factor = log_factor;
  if (b.floored) cert.floors.push_back({what, log_factor + std::log(static_cast<double>(n))});
  const int s = popcount(cert.surviving_set);
  add_check(cert, "surviving set size >= declared bound", s >= b.value && (cert.surviving_set & ~cert.input_set) == 0,
            CheckMode::exact, std::to_string(s) + " >= " + std::to_string(b.value));
}

inline void zero_edge_check(const ColoredCompleteGraph& c, ReductionCertificate& cert) {
  for (ColorId col : cert.removed_colors)
    add_check(cert, "removed color " + std::to_string(col) + " has no edge in the surviving set",
              !c.has_edge_within(col, cert.surviving_set), CheckMode::exact);
}

/// Records and verifies a sparsity claim for every restricted color of the output profile.
inline void sparsity_claims(const ColoredCompleteGraph& c, ReductionCertificate& cert, const DenseConfig& dcfg) {
  const auto& p = cert.output_profile;
  const int m = popcount(cert.surviving_set);
  for (int i = 1; i < p.q - 1; ++i) {
    auto [lo, hi] = sparsity_window(p, i, m);
    for (ColorId col : p.classes[static_cast<std::size_t>(i)]) {
      auto w = sparse_in_window(c, col, cert.surviving_set, p.eps_dense(), lo, hi, dcfg);
      bool ok = w.verdict == SparsityVerdict::sparse;
      cert.sparsity_claims.push_back({col, i, lo, hi, w.mode});
      add_check(cert, "color " + std::to_string(col) + " sparse in window", ok, ok ? w.mode : CheckMode::exact,
                "[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
  }
}

/// Proper k-coloring of the union of `colors` inside `within`, as k vertex classes (original ids).
inline std::optional<std::vector<Mask>> union_classes(const ColoredCompleteGraph& c, Mask within,
                                                      const ColorSet& colors, int k) {
  auto g = union_color_classes(c, colors).induced(within);
  auto col = find_k_coloring(g, k);
  if (!col) return std::nullopt;
  std::vector<Mask> out(static_cast<std::size_t>(k), 0);
  auto ids = bits_of(within);
  for (std::size_t v = 0; v < ids.size(); ++v) out[static_cast<std::size_t>(col->colors[v])] |= bit(ids[v]);
  return out;
}

inline ReductionCertificate violation_certificate(const ColoredCompleteGraph& c, Mask within,
                                                  const RestrictionProfile& prof, const ColorSet& colors,
                                                  const ChromaticConfig& chi_cfg) {
  ReductionCertificate cert;
  cert.kind = StepKind::precondition_violation;
  cert.input_set = within;
  cert.surviving_set = within;
  cert.input_profile = prof;
  cert.output_profile = prof;
  cert.declared_bound = popcount(within);
  int chi = chromatic_number(union_color_classes(c, colors).induced(within), chi_cfg);
  cert.violation = ViolationWitness{colors, chi, within};
  add_check(cert, "witness union chromatic number >= 2^q", chi >= (1 << prof.q), CheckMode::exact,
            "chi = " + std::to_string(chi));
  return cert;
}

inline ReductionCertificate start_certificate(StepKind kind, Mask within, const RestrictionProfile& prof) {
  ReductionCertificate cert;
  cert.kind = kind;
  cert.input_set = within;
  cert.input_profile = prof;
  return cert;
}

/// Index of the largest class intersection with `set`, ties to the lowest index.
inline int largest_part(const std::vector<Mask>& parts, Mask set) {
  int best = 0;
  for (std::size_t k = 1; k < parts.size(); ++k)
    if (popcount(parts[k] & set) > popcount(parts[static_cast<std::size_t>(best)] & set)) best = static_cast<int>(k);
  return best;
}

inline void intersection_check(ReductionCertificate& cert, const IntersectResult& res, const Rational& eps,
                               int count, int universe) {
  int k = (count + 3) / 4;
  add_check(cert, "common intersection >= (1-2eps)^ceil(k/4) |universe|", res.meets_bound,
            res.path == IntersectPath::unresolved ? CheckMode::informational : CheckMode::exact,
            std::to_string(res.intersection.size()) + " of " + std::to_string(universe) + ", k=" +
                std::to_string(count) + ", picked " + std::to_string(k) + ", eps=" + to_string(eps) + ", path " +
                to_string(res.path));
}

/// Verifies an eps-dense claim for a recorded pair.
inline void dense_check(ReductionCertificate& cert, const ColoredCompleteGraph& c, ColorId col, Mask a, Mask b,
                        const Rational& eps, const DenseConfig& dcfg, const std::string& what) {
  auto v = is_eps_dense(c.color_class(col), VertexSet(c.n(), a), VertexSet(c.n(), b), eps, dcfg);
  add_check(cert, what, v.dense, v.dense ? v.mode : CheckMode::exact);
}

}  // namespace detail

/// The q = 3 dichotomy on the coloring restricted to `within`.
inline ReductionCertificate step_q3(const ColoredCompleteGraph& c, Mask within, const RestrictionProfile& prof,
                                    const EngineParams& params, const EngineConfig& cfg = {}) {
  using namespace detail;
  if (prof.q != 3 || params.q != 3) throw Error(ErrorCode::InvalidArgument, "step_q3 needs q = 3");
  validate_profile(prof);
  if (prof.r1() < params.R)
    throw Error(ErrorCode::ProfileTooSmall, "r1 = " + std::to_string(prof.r1()) + " below R = " +
                                                std::to_string(params.R));
  const auto dcfg = engine_dense(cfg);
  const int n = popcount(within);
  const Rational eps = prof.eps;
  const Rational eps2 = prof.eps_dense();
  const ColorSet c1 = prof.classes[0];

  ColorId red = densest_color(c, within, prof.all_colors());
  if (red == 0) throw Error(ErrorCode::NoDensePair, "no color has an edge in the set");
  auto [va, vb] = dense_pair_within(class_within(c, red, within), within, eps2, dcfg);
  const Mask side_set[2] = {va, vb};
  const int m = popcount(va);

  ColorSet others = c1;
  others.erase(red);
  const int lo1 = alpha_floor(params.log_alpha_at(1), m);
  std::map<ColorId, Family> fam[2];
  std::map<ColorId, bool> big[2];
  for (ColorId col : others)
    for (int s = 0; s < 2; ++s) {
      fam[s][col] = extract_family(class_within(c, col, side_set[s]), side_set[s], eps, lo1, 0, dcfg);
      big[s][col] = volume_at_least(fam[s][col].volume(), 3, eps, m);
    }
  ColorId blue = 0;
  for (ColorId col : others)
    if (big[0][col] && big[1][col]) {
      blue = col;
      break;
    }

  if (blue == 0) {
    // Case 1
    auto cert = start_certificate(StepKind::q3_case1, within, prof);
    cert.dense_pairs.push_back({va, vb});
    cert.notes["red"] = std::to_string(red);
    dense_check(cert, c, red, va, vb, eps2, dcfg, "red pair is eps^2-dense");
    if (others.empty()) throw Error(ErrorCode::Stalled, "no unrestricted color besides red");
    std::map<ColorId, int> side;
    int on0 = 0;
    for (ColorId col : others) {
      side[col] = big[0][col] ? 1 : 0;
      on0 += side[col] == 0;
    }
    const int maj = 2 * on0 >= static_cast<int>(others.size()) ? 0 : 1;
    const Mask vs = side_set[maj];
    std::vector<ColorId> cand;
    std::vector<VertexSet> subsets;
    bool fam_exact = true;
    for (ColorId col : others) {
      if (side[col] != maj) continue;
      cand.push_back(col);
      subsets.emplace_back(c.n(), vs & ~fam[maj][col].cover());
      fam_exact = fam_exact && fam[maj][col].mode == CheckMode::exact;
    }
    cert.notes["side"] = maj == 0 ? "V1" : "V-1";
    cert.notes["side_colors"] = std::to_string(cand.size()) + " of " + std::to_string(others.size());
    add_check(cert, "majority side covers at least half of C1 minus red",
              2 * static_cast<int>(cand.size()) >= static_cast<int>(others.size()), CheckMode::exact);
    for (std::size_t i = 0; i < cand.size(); ++i)
      add_check(cert, "family of color " + std::to_string(cand[i]) + " below 8 eps m on the chosen side",
                !volume_at_least(fam[maj][cand[i]].volume(), 3, eps, m), CheckMode::exact);
    auto res = intersect_select(VertexSet(c.n(), vs), subsets, 8 * eps, cfg.intersect);
    intersection_check(cert, res, 8 * eps, static_cast<int>(cand.size()), m);
    cert.surviving_set = res.intersection.mask();
    ColorSet gamma;
    for (int i : res.indices) gamma.insert(cand[static_cast<std::size_t>(i)]);
    const int s = popcount(cert.surviving_set);

    RestrictionProfile out = prof;
    for (ColorId col : gamma) {
      out.classes[0].erase(col);
      out.classes[1].insert(col);
    }
    double x_old = prof.x_vec[1];
    double log_formula = -params.log_beta - params.log_alpha_at(0) +
                       std::max(params.log_alpha_at(1), x_old > 0 ? std::log(x_old) : -INFINITY);
    double x_need = std::max(static_cast<double>(lo1) * (1.0 - 1e-12), x_old * n) / std::max(1, s);
    out.x_vec[1] = clamp_x(std::max(std::exp(log_formula), x_need));
    out = normalize_profile(out, c, cert.surviving_set);
    cert.output_profile = out;
    cert.notes["x_formula_log"] = std::to_string(log_formula);
    cert.notes["restricted"] = std::to_string(gamma.size());
    add_check(cert, "r1 decrease matches ceil(31 r1/32)", out.r1() <= (31 * prof.r1() + 31) / 32,
              CheckMode::informational, std::to_string(prof.r1()) + " -> " + std::to_string(out.r1()));
    add_check(cert, "S_c families found maximal", fam_exact, fam_exact ? CheckMode::exact : CheckMode::sampled);
    declare_bound(cert, params.log_beta + params.log_alpha_at(0), "beta*alpha0*n");
    sparsity_claims(c, cert, dcfg);
    require_exact(cert);
    return cert;
  }

  // Case 2
  auto cert = start_certificate(StepKind::q3_case2, within, prof);
  cert.dense_pairs.push_back({va, vb});
  cert.notes["red"] = std::to_string(red);
  cert.notes["blue"] = std::to_string(blue);
  dense_check(cert, c, red, va, vb, eps2, dcfg, "red pair is eps^2-dense");
  add_check(cert, "blue families reach 8 eps m on both sides", big[0][blue] && big[1][blue], CheckMode::exact);
  const ColorSet all = prof.all_colors();
  std::vector<ColorId> rest;
  for (ColorId col : all)
    if (col != red && col != blue) rest.push_back(col);
  const int need_big = static_cast<int>(ceil_mul(eps2, m));
  std::map<ColorId, std::vector<Mask>> parts;
  std::map<ColorId, int> side;
  int on0 = 0;
  for (ColorId col : rest) {
    auto cls = union_classes(c, within, {red, blue, col}, 7);
    if (!cls) return violation_certificate(c, within, prof, {red, blue, col}, cfg.chi);
    int small[2] = {0, 0};
    for (Mask a : *cls)
      for (int s = 0; s < 2; ++s) small[s] += popcount(a & side_set[s]) < need_big;
    side[col] = small[0] >= 4 ? 0 : 1;
    on0 += side[col] == 0;
    add_check(cert, "color " + std::to_string(col) + ": chosen side meets 4 classes in < eps^2 m",
              small[side[col]] >= 4, CheckMode::exact);
    parts[col] = std::move(*cls);
  }
  const int maj = 2 * on0 >= static_cast<int>(rest.size()) ? 0 : 1;
  std::vector<ColorId> cal;
  for (ColorId col : rest)
    if (side[col] == maj) cal.push_back(col);
  const int r = static_cast<int>(all.size());
  add_check(cert, "at least ceil((r-2)/2) colors on the majority side",
            static_cast<int>(cal.size()) >= (r - 2 + 1) / 2, CheckMode::exact,
            std::to_string(cal.size()) + " of " + std::to_string(rest.size()));
  cert.notes["side"] = maj == 0 ? "V1" : "V-1";

  // signed indices: pair j of the blue family gives sets 2j and 2j+1
  std::vector<Mask> vi;
  for (auto& [a, b] : fam[maj][blue].pairs) {
    vi.push_back(a);
    vi.push_back(b);
  }
  std::vector<std::vector<ColorId>> covered(vi.size());
  for (ColorId col : cal) {
    const auto& pc = parts[col];
    for (std::size_t i = 0; i < vi.size(); ++i) {
      int best = popcount(pc[static_cast<std::size_t>(largest_part(pc, vi[i]))] & vi[i]);
      if (best >= ceil_mul(1 - 6 * eps, popcount(vi[i]))) covered[i].push_back(col);
    }
  }
  std::size_t iota = 0;
  for (std::size_t i = 1; i < vi.size(); ++i)
    if (covered[i].size() > covered[iota].size()) iota = i;
  if (vi.empty() || covered[iota].empty()) throw Error(ErrorCode::Stalled, "no blue set carries a c-free subset");
  const Mask v_iota = vi[iota];
  cert.notes["iota"] = std::to_string(iota);
  cert.dense_pairs.push_back(fam[maj][blue].pairs[iota / 2]);
  add_check(cert, "iota covered by >= r/8 colors", 8 * static_cast<int>(covered[iota].size()) >= r,
            CheckMode::informational, std::to_string(covered[iota].size()) + " colors");
  std::vector<VertexSet> subsets;
  for (ColorId col : covered[iota]) {
    const auto& pc = parts[col];
    subsets.emplace_back(c.n(), pc[static_cast<std::size_t>(largest_part(pc, v_iota))] & v_iota);
  }
  auto res = intersect_select(VertexSet(c.n(), v_iota), subsets, 6 * eps, cfg.intersect);
  intersection_check(cert, res, 6 * eps, static_cast<int>(subsets.size()), popcount(v_iota));
  cert.surviving_set = res.intersection.mask();
  for (int i : res.indices) cert.removed_colors.insert(covered[iota][static_cast<std::size_t>(i)]);

  RestrictionProfile out = prof;
  out.classes.assign(2, {});
  out.classes[0] = all;
  for (ColorId col : cert.removed_colors) out.classes[0].erase(col);
  out.x_vec = {1.0, 0.0};
  out = normalize_profile(out, c, cert.surviving_set);
  cert.output_profile = out;
  zero_edge_check(c, cert);
  add_check(cert, "blue set has part size >= ceil(alpha1 m)", popcount(v_iota) >= lo1, CheckMode::exact);
  declare_bound(cert, params.log_beta + params.log_alpha_at(1) + params.log_alpha_at(0), "beta*alpha1*alpha0*n");
  require_exact(cert);
  return cert;
}

/// Not well-balanced at level k+1: restrict the colors that fail to shatter one popular level-k set.
inline ReductionCertificate step_not_balanced(const ColoredCompleteGraph& c, Mask within,
                                              const RestrictionProfile& prof, const LevelStructure& levels,
                                              const EngineParams& params, const EngineConfig& cfg = {}) {
  using namespace detail;
  validate_profile(prof);
  const int q = params.q;
  const int k = levels.depth();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "need at least one level");
  if (k >= q - 1) throw Error(ErrorCode::IsBalanced, "the sequence already reaches q-1 levels");
  if (!is_well_balanced(levels)) throw Error(ErrorCode::NotBalanced, "level structure is not well-balanced");
  const auto dcfg = engine_dense(cfg);
  const int n = popcount(within);
  const auto sets = levels.sets(k - 1);
  const std::int64_t vol_l = levels.volume(k - 1);
  const ColorSet cand = prof.first_classes(k);

  std::map<ColorId, std::vector<bool>> in_n;
  for (ColorId col : cand) {
    std::vector<bool> flags(sets.size());
    std::int64_t vol_n = 0;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      auto fam = child_family(c, col, sets[j], k - 1, params, dcfg);
      std::vector<Mask> ch;
      for (auto& [a, b] : fam.pairs) {
        ch.push_back(a);
        ch.push_back(b);
      }
      flags[j] = !is_properly_shattered(sets[j], ch, params.eps, q);
      if (flags[j]) vol_n += popcount(sets[j]);
    }
    if (vol_n * (std::int64_t{1} << (4 * (q - 1))) <= vol_l)
      throw Error(ErrorCode::IsBalanced, "color " + std::to_string(col) + " extends the sequence");
    in_n[col] = std::move(flags);
  }

  auto cert = start_certificate(StepKind::not_balanced, within, prof);
  cert.level = k;
  cert.levels = levels;
  std::size_t best = 0;
  std::vector<int> count(sets.size(), 0);
  for (auto& [col, flags] : in_n)
    for (std::size_t j = 0; j < sets.size(); ++j) count[j] += flags[j];
  for (std::size_t j = 1; j < sets.size(); ++j)
    if (count[j] > count[best] || (count[j] == count[best] && popcount(sets[j]) > popcount(sets[best]))) best = j;
  const Mask v = sets[best];
  cert.notes["set"] = std::to_string(best);
  add_check(cert, "chosen set is non-shattered for >= 2^{-4q+4} r_k colors",
            static_cast<std::int64_t>(count[best]) * (std::int64_t{1} << (4 * q - 4)) >=
                static_cast<std::int64_t>(cand.size()),
            CheckMode::informational, std::to_string(count[best]) + " of " + std::to_string(cand.size()));

  std::vector<ColorId> used;
  std::vector<VertexSet> subsets;
  bool exact = true;
  for (auto& [col, flags] : in_n) {
    if (!flags[best]) continue;
    try {
      auto ns = nonshattered_subset(c, v, col, params, k, cfg);
      used.push_back(col);
      subsets.emplace_back(c.n(), ns.subset);
      exact = exact && ns.mode == CheckMode::exact;
      add_check(cert, "non-shattered subset of color " + std::to_string(col) + " >= ceil((1-2^{q+2}eps)|V|)",
                popcount(ns.subset) >= ceil_mul(1 - Rational(std::int64_t{1} << (q + 2)) * params.eps, popcount(v)),
                CheckMode::exact);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ActuallyShattered) throw;
      cert.notes["shattered_after_trim"] += std::to_string(col) + " ";
    }
  }
  if (used.empty()) throw Error(ErrorCode::Stalled, "no color leaves a non-shattered subset");
  add_check(cert, "non-shattered subsets hold no window pair", exact, exact ? CheckMode::exact : CheckMode::sampled);
  const Rational ieps = Rational(std::int64_t{1} << (q + 2)) * params.eps;
  auto res = intersect_select(VertexSet(c.n(), v), subsets, ieps, cfg.intersect);
  intersection_check(cert, res, ieps, static_cast<int>(used.size()), popcount(v));
  cert.surviving_set = res.intersection.mask();
  ColorSet chosen;
  for (int i : res.indices) chosen.insert(used[static_cast<std::size_t>(i)]);
  const int s = popcount(cert.surviving_set);

  RestrictionProfile out = prof;
  const double lg = params.log_gamma_at(k - 1);
  for (int i = 0; i < k; ++i) out.classes[static_cast<std::size_t>(i)].clear();
  for (ColorId col : cand)
    if (!chosen.count(col)) out.classes[0].insert(col);
  for (ColorId col : chosen) out.classes[static_cast<std::size_t>(k)].insert(col);
  out.x_vec[0] = 1.0;
  for (int i = 1; i < k; ++i) out.x_vec[static_cast<std::size_t>(i)] = 0.0;
  const int lo_k = alpha_floor(params.log_alpha_at(k), popcount(v));
  for (int i = k; i < q - 1; ++i) {
    double x_old = prof.x_vec[static_cast<std::size_t>(i)];
    double log_old = x_old > 0 ? std::log(x_old) : -INFINITY;
    double log_formula = -lg + (i == k ? std::max(params.log_alpha_at(k), log_old) : log_old);
    double x_need = x_old * n / std::max(1, s);
    if (i == k) x_need = std::max(x_need, static_cast<double>(lo_k) * (1.0 - 1e-12) / std::max(1, s));
    out.x_vec[static_cast<std::size_t>(i)] = clamp_x(std::max(std::exp(log_formula), x_need));
  }
  out = normalize_profile(out, c, cert.surviving_set);
  cert.output_profile = out;
  cert.notes["restricted"] = std::to_string(chosen.size());
  const auto zr = params.z * prof.r_vec[static_cast<std::size_t>(k - 1)];
  add_check(cert, "r_k drops to ceil(z r_k)", out.r_vec[static_cast<std::size_t>(k - 1)] <= ceil_mul(zr, 1),
            CheckMode::informational);
  declare_bound(cert, lg, "gamma_{k-1}*n");
  sparsity_claims(c, cert, dcfg);
  require_exact(cert);
  return cert;
}

/// Well-balanced through level q-1: remove colors that miss one popular level-(q-1) set almost entirely.
inline ReductionCertificate step_balanced(const ColoredCompleteGraph& c, Mask within, const RestrictionProfile& prof,
                                          const LevelStructure& levels, const EngineParams& params,
                                          const EngineConfig& cfg = {}) {
  using namespace detail;
  validate_profile(prof);
  const int q = params.q;
  if (levels.depth() != q - 1) throw Error(ErrorCode::NotBalanced, "need q-1 levels");
  const int parts_k = (1 << q) - 1;
  const Rational eps = params.eps;
  const ColorSet all = prof.all_colors();
  const ColorSet seq(levels.colors.begin(), levels.colors.end());

  std::map<ColorId, std::vector<Mask>> parts;
  for (ColorId col : all) {
    ColorSet u = seq;
    u.insert(col);
    auto cls = union_classes(c, within, u, parts_k);
    if (!cls) return violation_certificate(c, within, prof, u, cfg.chi);
    parts[col] = std::move(*cls);
  }
  if (!is_well_balanced(levels)) throw Error(ErrorCode::NotBalanced, "level structure is not well-balanced");

  auto cert = start_certificate(StepKind::balanced, within, prof);
  cert.levels = levels;
  auto eps_pow = [&](int e) {
    Rational out(1);
    for (int i = 0; i < e; ++i) out *= eps;
    return out;
  };
  auto big_count = [&](const std::vector<Mask>& pc, Mask set, const Rational& frac) {
    int cnt = 0;
    std::int64_t need = std::max<std::int64_t>(1, ceil_mul(frac, popcount(set)));
    for (Mask a : pc) cnt += popcount(a & set) >= need;
    return cnt;
  };

  const int depth = q - 1;
  const auto top = levels.sets(depth - 1);
  std::map<ColorId, std::vector<int>> final_sets;  // indices into top
  for (ColorId col : all) {
    const auto& pc = parts[col];
    // S_1: the level-1 side meeting at most 2^{q-1}-1 parts in an eps^{q-1} fraction
    auto first = levels.sets(0);
    int s1 = big_count(pc, first[0], eps_pow(q - 1)) <= (1 << (q - 1)) - 1 ? 0 : 1;
    if (big_count(pc, first[static_cast<std::size_t>(s1)], eps_pow(q - 1)) > (1 << (q - 1)) - 1) continue;
    std::vector<int> cur = {s1};
    for (int m = 1; m < depth; ++m) {
      std::vector<int> next;
      const auto lower = levels.sets(m);
      const auto& lvl = levels.levels[static_cast<std::size_t>(m)];
      for (std::size_t pi = 0; pi < lvl.pairs.size(); ++pi) {
        if (std::find(cur.begin(), cur.end(), lvl.pairs[pi].parent) == cur.end()) continue;
        for (int side = 0; side < 2; ++side) {
          int idx = static_cast<int>(2 * pi) + side;
          if (big_count(pc, lower[static_cast<std::size_t>(idx)], eps_pow(q - m - 1)) <= (1 << (q - m - 1)) - 1)
            next.push_back(idx);
        }
      }
      std::int64_t vol = 0;
      for (int i : next) vol += popcount(lower[static_cast<std::size_t>(i)]);
      add_check(cert, "color " + std::to_string(col) + ": Vol(S_" + std::to_string(m + 1) + ") >= 2^{-4m+2} Vol(L)",
                vol * (std::int64_t{1} << std::max(0, 4 * (m + 1) - 2)) >= levels.volume(m), CheckMode::informational);
      cur = std::move(next);
    }
    std::vector<int> ok;
    for (int idx : cur) {
      Mask set = top[static_cast<std::size_t>(idx)];
      int big = popcount(pc[static_cast<std::size_t>(largest_part(pc, set))] & set);
      if (big >= ceil_mul(1 - (parts_k - 1) * eps, popcount(set))) ok.push_back(idx);
    }
    final_sets[col] = std::move(ok);
  }
  std::vector<int> count(top.size(), 0);
  for (auto& [col, idx] : final_sets)
    for (int i : idx) ++count[static_cast<std::size_t>(i)];
  std::size_t best = 0;
  for (std::size_t j = 1; j < top.size(); ++j)
    if (count[j] > count[best]) best = j;
  if (top.empty() || count[best] == 0) throw Error(ErrorCode::Stalled, "no level set is c-free for any color");
  const Mask v = top[best];
  cert.notes["set"] = std::to_string(best);
  add_check(cert, "chosen set serves >= 2^{-4q+6} |C| colors",
            static_cast<std::int64_t>(count[best]) * (std::int64_t{1} << std::max(0, 4 * q - 6)) >=
                static_cast<std::int64_t>(all.size()),
            CheckMode::informational, std::to_string(count[best]) + " of " + std::to_string(all.size()));
  std::vector<ColorId> used;
  std::vector<VertexSet> subsets;
  for (auto& [col, idx] : final_sets) {
    if (std::find(idx.begin(), idx.end(), static_cast<int>(best)) == idx.end()) continue;
    const auto& pc = parts[col];
    used.push_back(col);
    subsets.emplace_back(c.n(), pc[static_cast<std::size_t>(largest_part(pc, v))] & v);
  }
  const Rational ieps = (parts_k - 1) * eps;
  auto res = intersect_select(VertexSet(c.n(), v), subsets, ieps, cfg.intersect);
  intersection_check(cert, res, ieps, static_cast<int>(used.size()), popcount(v));
  cert.surviving_set = res.intersection.mask();
  for (int i : res.indices) cert.removed_colors.insert(used[static_cast<std::size_t>(i)]);

  RestrictionProfile out = prof;
  out.classes.assign(static_cast<std::size_t>(q - 1), {});
  out.classes[0] = all;
  for (ColorId col : cert.removed_colors) out.classes[0].erase(col);
  out.x_vec.assign(static_cast<std::size_t>(q - 1), 0.0);
  out.x_vec[0] = 1.0;
  out = normalize_profile(out, c, cert.surviving_set);
  cert.output_profile = out;
  zero_edge_check(c, cert);
  declare_bound(cert, params.log_gamma_at(q - 2), "gamma_{q-2}*n");
  require_exact(cert);
  return cert;
}

namespace detail {

/// Largest clique of g inside `cand`, stopping once `target` vertices are found.
inline Mask clique_search(const SimpleGraph& g, Mask cand, int target) {
  Mask best = 0;
  auto rec = [&](auto&& self, Mask cur, Mask p) -> bool {
    if (popcount(cur) > popcount(best)) best = cur;
    if (popcount(best) >= target) return true;
    while (p) {
      if (popcount(cur) + popcount(p) <= popcount(best)) return false;
      int v = lowest(p);
      p &= ~bit(v);
      if (self(self, cur | bit(v), p & g.neighbors(v))) return true;
    }
    return false;
  };
  rec(rec, 0, cand);
  return best;
}

/// F_chi(R, 2^q, q+1) by search when small enough, else the product bound.
inline std::pair<int, std::string> base_gamma(const EngineParams& params, const EngineConfig& cfg) {
  if (params.gamma_base > 0) return {params.gamma_base, "configured"};
  const int q = params.q, R = params.R;
  std::int64_t prod = product_upper_bound(R, 1 << q, q + 1);
  if (prod <= 16 && R <= 8) {
    SearchConfig sc;
    sc.node_budget = cfg.gamma_search_nodes;
    sc.time_limit_seconds = 5.0;
    try {
      auto res = compute_F_chi(R, 1 << q, q + 1, static_cast<int>(prod), sc);
      if (res.value) return {*res.value, "search"};
    } catch (const SearchBudgetExceeded&) {
    }
  }
  return {static_cast<int>(std::min<std::int64_t>(prod, 1 << 30)), "product bound"};
}

}  // namespace detail

/// Final step once r1 < R: halt below the threshold, else find the Ramsey witness or a sparsity contradiction.
inline ReductionCertificate base_case_check(const ColoredCompleteGraph& c, Mask within, const RestrictionProfile& prof,
                                            const EngineParams& params, const EngineConfig& cfg = {}) {
  using namespace detail;
  validate_profile(prof);
  if (prof.r1() >= params.R)
    throw Error(ErrorCode::NotBaseCase, "r1 = " + std::to_string(prof.r1()) + " is not below R");
  auto cert = start_certificate(StepKind::base_case, within, prof);
  cert.output_profile = prof;
  cert.surviving_set = within;
  const int n = popcount(within);
  cert.declared_bound = n;
  auto [gamma, source] = base_gamma(params, cfg);
  const std::int64_t n0 = static_cast<std::int64_t>(gamma) * (gamma - 1);
  const bool q3 = params.path == EnginePath::q3;
  const Rational ed = prof.eps_dense();
  std::int64_t threshold = q3 ? n0 : ceil_mul(Rational(n0) / ed, 1);
  cert.halt_bound = threshold;
  cert.notes["gamma"] = std::to_string(gamma) + " (" + source + ")";
  cert.notes["N0"] = std::to_string(n0);
  if (n < threshold) {
    cert.notes["outcome"] = "halt";
    add_check(cert, "n below the base-case threshold", true, CheckMode::exact,
              std::to_string(n) + " < " + std::to_string(threshold));
    return cert;
  }
  // a working set of N0 vertices; the general path keeps it inside eps^{q-1} n
  auto ids = bits_of(within);
  std::int64_t take = q3 ? n : std::max<std::int64_t>(n0, floor_mul(ed, n));
  Mask work = 0;
  for (std::int64_t i = 0; i < take && i < n; ++i) work |= bit(ids[static_cast<std::size_t>(i)]);
  const ColorSet free_colors = prof.classes[0];
  auto h = union_color_classes(c, free_colors);
  Mask clique = clique_search(h, work, gamma);
  if (popcount(clique) >= gamma) {
    ColorSet on;
    for (int u : bits_of(clique))
      for (int v : bits_of(clique))
        if (u < v) on.insert(c.color_of(u, v));
    std::vector<int> onv(on.begin(), on.end());
    std::optional<ColorSet> hit;
    for_each_k_subset(onv, std::min<int>(params.q, static_cast<int>(onv.size())), [&](const std::vector<int>& pick) {
      ColorSet cs(pick.begin(), pick.end());
      if (chromatic_number(union_color_classes(c, cs).induced(clique), cfg.chi) >= (1 << params.q)) {
        hit = cs;
        return false;
      }
      return true;
    });
    if (!hit) {
      add_check(cert, "K_gamma carries a q-color union of chromatic number 2^q", false, CheckMode::exact,
                "gamma " + std::to_string(gamma) + " is not a valid F_chi value here");
      require_exact(cert);
    }
    auto v = violation_certificate(c, clique, prof, *hit, cfg.chi);
    v.input_set = within;
    v.surviving_set = within;
    v.declared_bound = n;
    v.notes = cert.notes;
    v.notes["outcome"] = "clique";
    v.halt_bound = threshold;
    return v;
  }
  // no K_gamma: some restricted color is dense
  ColorSet restricted;
  for (std::size_t i = 1; i < prof.classes.size(); ++i) restricted.insert(prof.classes[i].begin(), prof.classes[i].end());
  ColorId dense = densest_color(c, work, restricted);
  if (dense != 0) {
    const int cls = prof.class_of(dense);
    auto [lo, hi] = sparsity_window(prof, cls, n);
    if (lo <= hi) {
      auto w = sparse_in_window(c, dense, work, ed, lo, std::min(hi, popcount(work) / 2), engine_dense(cfg));
      if (w.verdict == SparsityVerdict::not_sparse)
        throw SparsityViolatedError("base case: restricted color " + std::to_string(dense) + " has a window pair", w);
    }
  }
  cert.notes["outcome"] = "inconclusive";
  add_check(cert, "x below the base-case density threshold", false, CheckMode::informational,
            "no K_gamma and no window pair in the densest restricted color");
  return cert;
}

}  // namespace fchi
