#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fchi/dense_pairs.hpp"
#include "fchi/engine/levels.hpp"
#include "fchi/engine/profile.hpp"

namespace fchi {

enum class StepKind { q3_case1, q3_case2, not_balanced, balanced, base_case, precondition_violation };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::q3_case1: return "q3_case1";
    case StepKind::q3_case2: return "q3_case2";
    case StepKind::not_balanced: return "not_balanced";
    case StepKind::balanced: return "balanced";
    case StepKind::base_case: return "base_case";
    case StepKind::precondition_violation: return "precondition_violation";
  }
  return "?";
}

struct GuaranteeCheck {
  std::string claim;
  bool pass = true;
  CheckMode mode = CheckMode::exact;
  std::string detail;
  friend bool operator==(const GuaranteeCheck&, const GuaranteeCheck&) = default;
};

/// A size bound that fell below one vertex and was raised to 1.
struct FloorEvent {
  std::string quantity;
  double log_value = 0.0;  // natural log of the unfloored bound
  friend bool operator==(const FloorEvent&, const FloorEvent&) = default;
};

/// The union of `colors` restricted to `vertices` has chromatic number `chi` >= 2^q.
struct ViolationWitness {
  ColorSet colors;
  int chi = 0;
  Mask vertices = 0;
  friend bool operator==(const ViolationWitness&, const ViolationWitness&) = default;
};

/// `color` has no eps^{q-1}-dense pair with part size in [lo, hi] inside the surviving set.
struct SparsityClaim {
  ColorId color = 0;
  int cls = 1;  // 0-based class index in the output profile
  int lo = 1, hi = 0;
  CheckMode mode = CheckMode::exact;
  friend bool operator==(const SparsityClaim&, const SparsityClaim&) = default;
};

struct ReductionCertificate {
  StepKind kind = StepKind::base_case;
  int level = 0;  // k for not_balanced
  Mask input_set = 0;
  Mask surviving_set = 0;
  RestrictionProfile input_profile, output_profile;
  std::int64_t declared_bound = 1;
  double log_bound_factor = 0.0;
  std::vector<GuaranteeCheck> checks;
  std::vector<FloorEvent> floors;
  ColorSet removed_colors;  // zero edges inside surviving_set
  std::vector<SparsityClaim> sparsity_claims;
  std::optional<ViolationWitness> violation;
  std::optional<LevelStructure> levels;
  std::vector<std::pair<Mask, Mask>> dense_pairs;
  std::map<std::string, std::string> notes;
  std::int64_t halt_bound = 0;  // base case: the vertex threshold

  bool exact_checks_pass() const {
    for (const auto& ch : checks)
      if (ch.mode == CheckMode::exact && !ch.pass) return false;
    return true;
  }

  const GuaranteeCheck* first_failure() const {
    for (const auto& ch : checks)
      if (ch.mode == CheckMode::exact && !ch.pass) return &ch;
    return nullptr;
  }

  friend bool operator==(const ReductionCertificate&, const ReductionCertificate&) = default;
};

namespace detail {

inline void add_check(ReductionCertificate& cert, std::string claim, bool pass, CheckMode mode,
                      std::string detail = {}) {
  cert.checks.push_back({std::move(claim), pass, mode, std::move(detail)});
}

/// Exact checks must hold when a certificate leaves a step.
inline void require_exact(const ReductionCertificate& cert) {
  if (auto* f = cert.first_failure())
    throw Error(ErrorCode::GuaranteeFailed, std::string(to_string(cert.kind)) + ": " + f->claim +
                                                (f->detail.empty() ? "" : " (" + f->detail + ")"));
}

}  // namespace detail
}  // namespace fchi
