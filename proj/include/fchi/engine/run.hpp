#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fchi/chromatic.hpp"
#include "fchi/engine/certificate.hpp"
#include "fchi/engine/levels.hpp"
#include "fchi/engine/params.hpp"
#include "fchi/engine/profile.hpp"
#include "fchi/engine/steps.hpp"

namespace fchi {

struct RunOptions {
  bool precheck = true;  // verify the chromatic-(2^q, q+1) property before stepping
  bool expect_violation = false;
  EngineConfig cfg;
};

enum class RunOutcome { halt, violation, inconclusive };

inline const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::halt: return "halt";
    case RunOutcome::violation: return "violation";
    case RunOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ReductionTrace {
  int n0 = 0;
  std::vector<ReductionCertificate> steps;
  RunOutcome outcome = RunOutcome::halt;
  double log_chain_bound = 0.0;  // log of threshold * prod gamma^{-1} over the steps
  bool chain_holds = true;       // log n0 <= log_chain_bound

  std::vector<const LevelStructure*> level_structures() const {
    std::vector<const LevelStructure*> out;
    for (const auto& s : steps)
      if (s.levels) out.push_back(&*s.levels);
    return out;
  }
};

/// Drives the reduction from the whole vertex set until the base case, a witness, or one vertex.
inline ReductionTrace run_reduction(const ColoredCompleteGraph& c, int q, const EngineParams& params,
                                    const RunOptions& opts = {}) {
  if (params.q != q) throw Error(ErrorCode::InvalidArgument, "params were built for another q");
  if (params.path == EnginePath::q3 && q != 3) throw Error(ErrorCode::InvalidArgument, "the q3 path needs q = 3");
  const auto& cfg = opts.cfg;
  ReductionTrace trace;
  trace.n0 = c.n();
  Mask within = low_mask(c.n());
  const auto variant = params.path == EnginePath::q3 ? SparsityVariant::lower_only : SparsityVariant::interval;
  RestrictionProfile prof = initial_profile(c, within, q, params.eps, variant);

  if (opts.precheck && c.n() >= (1 << q)) {
    auto v = is_chromatic_pq_coloring(c, 1 << q, q + 1, cfg.chi);
    if (!v.holds) {
      ColorSet used = c.used_colors(), colors;
      for (ColorId col : v.witness_colors)
        if (used.count(col)) colors.insert(col);
      trace.steps.push_back(detail::violation_certificate(c, within, prof, colors, cfg.chi));
      trace.outcome = RunOutcome::violation;
      return trace;
    }
  }

  double log_factors = 0.0;
  for (int step = 0;; ++step) {
    if (step >= cfg.max_steps) throw Error(ErrorCode::Stalled, "step limit reached");
    prof = normalize_profile(prof, c, within);
    if (prof.r1() < params.R || popcount(within) <= 1) {
      auto cert = base_case_check(c, within, prof, params, cfg);
      if (cert.kind == StepKind::precondition_violation) {
        trace.outcome = RunOutcome::violation;
      } else {
        trace.outcome = cert.notes["outcome"] == "halt" ? RunOutcome::halt : RunOutcome::inconclusive;
        double lb = std::log(static_cast<double>(std::max<std::int64_t>(1, cert.halt_bound)));
        trace.log_chain_bound = lb - log_factors;
        trace.chain_holds = std::log(static_cast<double>(trace.n0)) <= trace.log_chain_bound + 1e-9;
      }
      trace.steps.push_back(std::move(cert));
      return trace;
    }
    ReductionCertificate cert;
    if (params.path == EnginePath::q3) {
      cert = step_q3(c, within, prof, params, cfg);
    } else {
      auto levels = maximal_well_balanced(c, within, prof, params, cfg);
      cert = levels.depth() == q - 1 ? step_balanced(c, within, prof, levels, params, cfg)
                                     : step_not_balanced(c, within, prof, levels, params, cfg);
    }
    if (cert.kind == StepKind::precondition_violation) {
      trace.steps.push_back(std::move(cert));
      trace.outcome = RunOutcome::violation;
      return trace;
    }
    if (popcount(cert.surviving_set) >= popcount(within)) {
      trace.steps.push_back(std::move(cert));
      throw Error(ErrorCode::Stalled, "surviving set did not shrink");
    }
    log_factors += cert.log_bound_factor;
    within = cert.surviving_set;
    prof = cert.output_profile;
    trace.steps.push_back(std::move(cert));
  }
}

}  // namespace fchi
