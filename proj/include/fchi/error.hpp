#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fchi {

enum class ErrorCode {
  TooLarge,
  UnknownColor,
  DegenerateGraph,
  Overflow,
  NotDisjoint,
  NotBalanced,
  EmptyGraph,
  EpsilonOutOfRange,
  BadRange,
  TooFewSets,
  SubsetTooSmall,
  SparsityViolated,
  NoDensePair,
  NotNested,
  ActuallyShattered,
  ProfileTooSmall,
  IsBalanced,
  NotBaseCase,
  Stalled,
  BudgetExceeded,
  InvalidArgument,
  InvalidProfile,
  GuaranteeFailed,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnknownColor: return "UnknownColor";
    case ErrorCode::DegenerateGraph: return "DegenerateGraph";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::NotBalanced: return "NotBalanced";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::TooFewSets: return "TooFewSets";
    case ErrorCode::SubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::SparsityViolated: return "SparsityViolated";
    case ErrorCode::NoDensePair: return "NoDensePair";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::ActuallyShattered: return "ActuallyShattered";
    case ErrorCode::ProfileTooSmall: return "ProfileTooSmall";
    case ErrorCode::IsBalanced: return "IsBalanced";
    case ErrorCode::NotBaseCase: return "NotBaseCase";
    case ErrorCode::Stalled: return "Stalled";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::GuaranteeFailed: return "GuaranteeFailed";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fchi
