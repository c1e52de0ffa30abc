#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fchi/error.hpp"
#include "fchi/rational.hpp"

namespace fchi {

enum class ParamSource { paper_formula, manual };
enum class EnginePath { q3, general };

inline const char* to_string(ParamSource s) { return s == ParamSource::paper_formula ? "paper_formula" : "manual"; }
inline const char* to_string(EnginePath p) { return p == EnginePath::q3 ? "q3" : "general"; }

/// Smallest positive beta the engine keeps, in log form.
inline constexpr double kLogBetaFloor = -690.0;

/// Parameters of one reduction run.  Tiny quantities live in log space (natural log).
struct EngineParams {
  int q = 3;
  int r = 1;
  int n = 1;
  Rational eps{1, 32};
  std::vector<double> log_alpha;  // alpha_0 .. alpha_{q-2}
  double log_beta = 0.0;
  double log_delta = 0.0;
  Rational z{1};
  double y = 0.0;
  std::vector<double> log_gamma;  // gamma_i = beta * alpha_0 ... alpha_i
  ParamSource source = ParamSource::paper_formula;
  EnginePath path = EnginePath::general;
  int R = 8;                 // base case once the first r-entry drops below R
  int gamma_base = 0;        // F_chi(R, 2^q, q+1) or an upper bound on it; 0 = derive
  double eps_formula = 0.0;  // the unclamped formula value
  bool eps_clamped = false;
  bool beta_floored = false;

  /// The density parameter the framework runs with: eps^{q-1}.
  Rational eps_dense() const {
    if ((q - 1) * std::log2(static_cast<double>(eps.denominator())) > 62.0)
      throw Error(ErrorCode::Overflow, "eps^{q-1} leaves the 64-bit rational range");
    Rational out(1);
    for (int i = 0; i < q - 1; ++i) out *= eps;
    return out;
  }

  // indices past the end reuse the last alpha (longer manual level sequences)
  double log_alpha_at(int i) const {
    return log_alpha.at(std::min(static_cast<std::size_t>(i), log_alpha.size() - 1));
  }
  double log_gamma_at(int i) const {
    return log_gamma.at(std::min(static_cast<std::size_t>(i), log_gamma.size() - 1));
  }
};

namespace detail {

/// Largest unit fraction 1/k with 1/k <= v, for v in (0, 1).
inline Rational unit_fraction_below(double v) {
  double k = std::ceil(1.0 / v - 1e-12);
  if (k > 1e15) throw Error(ErrorCode::Overflow, "eps below representable range");
  return Rational(1, std::max<std::int64_t>(2, static_cast<std::int64_t>(k)));
}

inline void fill_gammas(EngineParams& p) {
  p.log_gamma.clear();
  double acc = p.log_beta;
  for (double la : p.log_alpha) {
    acc += la;
    p.log_gamma.push_back(acc);
  }
}

/// eps strictly inside the range every step needs, so each intersection eps stays <= 1/2.
inline double eps_ceiling(int q, EnginePath path, const Rational& eps0) {
  double cap = path == EnginePath::q3 ? 1.0 / 32.0 : std::ldexp(1.0, -(q + 4));
  return std::min(cap, to_double(eps0));
}

inline void check_q(int q, EnginePath path) {
  if (q < 2 || q > 8) throw Error(ErrorCode::InvalidArgument, "engine supports 2 <= q <= 8");
  if (path == EnginePath::q3 && q != 3) throw Error(ErrorCode::InvalidArgument, "the q3 path needs q = 3");
}

}  // namespace detail

/// The general-q formulas: eps = r^{-1/q} log r, delta, z, y, beta, alpha_i, gamma_i.
inline EngineParams paper_params(int q, int r, int n, const Rational& eps0 = Rational(1, 12), int R = 8) {
  detail::check_q(q, EnginePath::general);
  if (r < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "need r >= 1 and n >= 1");
  EngineParams p;
  p.q = q;
  p.r = r;
  p.n = n;
  p.R = R;
  p.source = ParamSource::paper_formula;
  p.path = EnginePath::general;
  const double lr = std::log(static_cast<double>(r));
  p.eps_formula = std::pow(static_cast<double>(r), -1.0 / q) * lr;
  const double ceiling = detail::eps_ceiling(q, p.path, eps0);
  p.eps_clamped = !(p.eps_formula > 0.0 && p.eps_formula < ceiling);
  p.eps = detail::unit_fraction_below(p.eps_clamped ? ceiling : p.eps_formula);
  const double e = to_double(p.eps);
  p.log_delta = -std::pow(e, -(q - 1)) * lr;
  const std::int64_t big = std::int64_t{1} << (4 * q);
  p.z = Rational(big, big + 1);
  p.y = r > 1 ? lr / std::log(1.0 / to_double(p.z)) : 0.0;
  p.log_beta = (static_cast<double>(r) / static_cast<double>(big)) * std::log1p(-std::ldexp(e, q + 3));
  if (p.log_beta < kLogBetaFloor) {
    p.log_beta = kLogBetaFloor;
    p.beta_floored = true;
  }
  for (int i = 0; i <= q - 2; ++i)
    p.log_alpha.push_back(-p.log_beta + std::pow(3.0 * p.y, i) * (p.log_beta + p.log_delta));
  detail::fill_gammas(p);
  return p;
}

/// The q = 3 dichotomy's parameters: eps = r^{-1/3} log^{2/3} r, alpha_1, alpha_0, beta = (1-16eps)^{r/4}.
inline EngineParams q3_params(int r, int n, const Rational& eps0 = Rational(1, 12), int R = 8) {
  if (r < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "need r >= 1 and n >= 1");
  EngineParams p;
  p.q = 3;
  p.r = r;
  p.n = n;
  p.R = R;
  p.source = ParamSource::paper_formula;
  p.path = EnginePath::q3;
  const double lr = std::log(static_cast<double>(r));
  p.eps_formula = std::pow(static_cast<double>(r), -1.0 / 3.0) * std::pow(lr, 2.0 / 3.0);
  const double ceiling = detail::eps_ceiling(3, p.path, eps0);
  p.eps_clamped = !(p.eps_formula > 0.0 && p.eps_formula < ceiling);
  p.eps = detail::unit_fraction_below(p.eps_clamped ? ceiling : p.eps_formula);
  const double e = to_double(p.eps);
  const double e2 = e * e;
  double log_alpha1 = -100.0 * lr * lr * std::pow(static_cast<double>(r), 2.0 / 3.0);
  double log_alpha0 = -lr * std::log(1.0 / e2) / e2;
  p.log_alpha = {log_alpha0, log_alpha1};
  p.log_beta = (static_cast<double>(r) / 4.0) * std::log1p(-16.0 * e);
  if (p.log_beta < kLogBetaFloor) {
    p.log_beta = kLogBetaFloor;
    p.beta_floored = true;
  }
  p.z = Rational(31, 32);
  p.log_delta = 0.0;
  p.y = r > 1 ? lr / std::log(32.0 / 31.0) : 0.0;
  detail::fill_gammas(p);
  return p;
}

/// Checks a hand-written parameter set and fills the derived gammas.
inline EngineParams validate_manual(EngineParams p) {
  p.source = ParamSource::manual;
  detail::check_q(p.q, p.path);
  if (p.eps <= 0 || p.eps >= 1) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0,1)");
  if (static_cast<int>(p.log_alpha.size()) < p.q - 1)
    throw Error(ErrorCode::InvalidArgument, "need q-1 alpha values (alpha_0 .. alpha_{q-2})");
  for (double la : p.log_alpha)
    if (!(la <= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha values must lie in (0,1]");
  if (!(p.log_beta <= 0.0) || p.log_beta < kLogBetaFloor)
    throw Error(ErrorCode::InvalidArgument, "beta must lie in [e^-690, 1]");
  if (p.z <= 0 || p.z > 1) throw Error(ErrorCode::InvalidArgument, "z must lie in (0,1]");
  if (p.R < 1) throw Error(ErrorCode::InvalidArgument, "R must be positive");
  detail::fill_gammas(p);
  return p;
}

/// max(1, ceil(e^{log_factor} n)); `floored` reports when the real bound was below one vertex.
struct SizeBound {
  std::int64_t value = 1;
  double log_factor = 0.0;
  bool floored = false;
};

inline SizeBound size_bound(double log_factor, std::int64_t n) {
  SizeBound b;
  b.log_factor = log_factor;
  double lg = log_factor + std::log(static_cast<double>(n));
  if (lg < 0.0 && !(std::abs(lg) < 1e-12)) {
    b.floored = true;
    b.value = 1;
    return b;
  }
  b.value = std::max<std::int64_t>(1, ceil_real(std::exp(log_factor), n));
  return b;
}

}  // namespace fchi
