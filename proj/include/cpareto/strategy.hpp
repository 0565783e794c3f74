#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/pareto.hpp"

namespace cpareto {

enum class StrategyKind { NonNested, BottomUp, TopDown };

inline std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::NonNested: return "nonnested";
    case StrategyKind::BottomUp: return "bottomup";
    case StrategyKind::TopDown: return "topdown";
  }
  return "unknown";
}

inline StrategyKind parse_strategy(const std::string& s) {
  if (s == "nonnested" || s == "non-nested") return StrategyKind::NonNested;
  if (s == "bottomup" || s == "bottom-up") return StrategyKind::BottomUp;
  if (s == "topdown" || s == "top-down") return StrategyKind::TopDown;
  detail::fail(Errc::InvalidArgument, "unknown strategy '" + s + "'");
}

/// Physics evaluations per phase. Postprocessing (restriction) never evaluates.
struct EvalBudgetReport {
  std::uint64_t extreme_point_runs = 0;
  std::uint64_t moo_runs = 0;
  std::uint64_t postprocessing = 0;
  /// Evaluations attributed to each structure's own run, keyed by canonical key.
  std::vector<std::pair<std::string, std::uint64_t>> per_structure;
  /// Number of optimizer invocations (CSO/LP extremes and MOO runs).
  std::uint64_t extreme_runs_count = 0;
  std::uint64_t moo_runs_count = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return extreme_point_runs + moo_runs + postprocessing; }
};

/// One archive per structure, in enumerate_structures order.
struct StrategyResult {
  std::vector<CoalitionStructure> structures;
  std::vector<ParetoArchive> archives;
  EvalBudgetReport report;

  [[nodiscard]] const ParetoArchive& archive_for(const CoalitionStructure& cs) const {
    for (std::size_t i = 0; i < structures.size(); ++i)
      if (structures[i] == cs) return archives[i];
    detail::fail(Errc::UnknownStructure, "no archive for structure " + cs.key());
  }
};

}  // namespace cpareto
