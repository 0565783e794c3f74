#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpareto {

enum class Errc {
  AgentCountTooLarge,
  MismatchedAgentSets,
  UnknownStructure,
  LengthMismatch,
  EmptyInput,
  EmptyArchive,
  NonPositiveWeight,
  BadAgentIndex,
  DimensionUnsupported,
  PointBelowReference,
  NonPositiveArgument,
  EvaluationAtWellCenter,
  DimensionMismatch,
  Unbounded,
  NoFeasibleFound,
  TooFewAgents,
  ResultingStructureMissing,
  TooManyVariables,
  InvalidArgument,
  ParseError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::AgentCountTooLarge: return "AgentCountTooLarge";
    case Errc::MismatchedAgentSets: return "MismatchedAgentSets";
    case Errc::UnknownStructure: return "UnknownStructure";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyArchive: return "EmptyArchive";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::BadAgentIndex: return "BadAgentIndex";
    case Errc::DimensionUnsupported: return "DimensionUnsupported";
    case Errc::PointBelowReference: return "PointBelowReference";
    case Errc::NonPositiveArgument: return "NonPositiveArgument";
    case Errc::EvaluationAtWellCenter: return "EvaluationAtWellCenter";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::Unbounded: return "Unbounded";
    case Errc::NoFeasibleFound: return "NoFeasibleFound";
    case Errc::TooFewAgents: return "TooFewAgents";
    case Errc::ResultingStructureMissing: return "ResultingStructureMissing";
    case Errc::TooManyVariables: return "TooManyVariables";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace detail

}  // namespace cpareto
