#pragma once

// Dominance (maximization), Pareto archives over coalition-aggregated
// objectives, restriction of a singleton-structure archive to coarser
// structures, and front point selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"

namespace cpareto {

using ObjectiveVector = std::vector<double>;

/// Absolute tolerance for treating two coalition-objective vectors as equal.
inline constexpr double kDedupTolerance = 1e-9;

/// u dominates v: u >= v everywhere and u > v somewhere.
inline bool dominates(std::span<const double> u, std::span<const double> v) {
  detail::require(u.size() == v.size(), Errc::LengthMismatch, "objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < v[i]) return false;
    if (u[i] > v[i]) strict = true;
  }
  return strict;
}

/// Indices (ascending) of points not dominated by any other point. Duplicates survive.
inline std::vector<std::size_t> non_dominated_filter(std::span<const ObjectiveVector> points) {
  detail::require(!points.empty(), Errc::EmptyInput, "no points to filter");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) detail::require(p.size() == dim, Errc::LengthMismatch, "ragged objective vectors");

  // Sorting by descending coordinate sum means a dominator always precedes its victims.
  std::vector<std::size_t> order(points.size());
  std::vector<double> sums(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    order[i] = i;
    double s = 0.0;
    for (double x : points[i]) s += x;
    sums[i] = s;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });

  std::vector<std::size_t> front;
  std::vector<char> keep(points.size(), 0);
  for (auto i : order) {
    bool dominated = false;
    for (auto j : front) {
      if (dominates(points[j], points[i])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      // Rounded sums can tie; evict anything the newcomer dominates.
      std::erase_if(front, [&](std::size_t j) {
        if (!dominates(points[i], points[j])) return false;
        keep[j] = 0;
        return true;
      });
      front.push_back(i);
      keep[i] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

struct ObjectivePoint {
  std::vector<double> decision;
  /// F_a(q) for every agent a (unweighted).
  std::vector<double> agent_values;
  bool feasible = true;
  double max_constraint_violation = 0.0;

  friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

/// F_C = sum_{a in C} gamma_a F_a for every coalition of `cs`.
inline ObjectiveVector coalition_values(std::span<const double> agent_values, const CoalitionStructure& cs,
                                        std::span<const double> gamma) {
  detail::require(agent_values.size() == cs.n_agents() && gamma.size() == cs.n_agents(), Errc::LengthMismatch,
                  "agent value / weight count does not match the structure");
  ObjectiveVector out(cs.size(), 0.0);
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (auto a : cs[i].members()) out[i] += gamma[a] * agent_values[a];
  return out;
}

class ParetoArchive {
 public:
  ParetoArchive() = default;
  ParetoArchive(CoalitionStructure cs, std::vector<double> gamma) : cs_(std::move(cs)), gamma_(std::move(gamma)) {
    detail::require(gamma_.size() == cs_.n_agents(), Errc::LengthMismatch, "one weight per agent required");
  }

  /// Builds an archive from arbitrary candidates: infeasible points are dropped,
  /// then dominated ones, then near-duplicates (first seen wins).
  static ParetoArchive from_candidates(CoalitionStructure cs, std::vector<double> gamma,
                                       std::span<const ObjectivePoint> candidates) {
    ParetoArchive ar(std::move(cs), std::move(gamma));
    std::vector<const ObjectivePoint*> feasible;
    std::vector<ObjectiveVector> objs;
    for (const auto& p : candidates) {
      if (!p.feasible) continue;
      feasible.push_back(&p);
      objs.push_back(ar.objectives_of(p));
    }
    if (feasible.empty()) return ar;
    for (auto i : non_dominated_filter(objs)) {
      const bool dup = std::any_of(ar.objectives_.begin(), ar.objectives_.end(),
                                   [&](const ObjectiveVector& o) { return near_equal(o, objs[i]); });
      if (dup) continue;
      ar.points_.push_back(*feasible[i]);
      ar.objectives_.push_back(std::move(objs[i]));
    }
    return ar;
  }

  /// Incremental elitist insert. Returns false if `p` is infeasible, dominated
  /// or a near-duplicate; otherwise removes the points it dominates.
  bool offer(const ObjectivePoint& p) {
    if (!p.feasible) return false;
    auto obj = objectives_of(p);
    for (const auto& o : objectives_)
      if (near_equal(o, obj) || dominates(o, obj)) return false;
    std::size_t w = 0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (dominates(obj, objectives_[i])) continue;
      if (w != i) {
        points_[w] = std::move(points_[i]);
        objectives_[w] = std::move(objectives_[i]);
      }
      ++w;
    }
    points_.resize(w);
    objectives_.resize(w);
    points_.push_back(p);
    objectives_.push_back(std::move(obj));
    return true;
  }

  [[nodiscard]] const CoalitionStructure& structure() const noexcept { return cs_; }
  [[nodiscard]] const std::vector<double>& gamma() const noexcept { return gamma_; }
  [[nodiscard]] const std::vector<ObjectivePoint>& points() const noexcept { return points_; }
  [[nodiscard]] const std::vector<ObjectiveVector>& objectives() const noexcept { return objectives_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

  [[nodiscard]] ObjectiveVector objectives_of(const ObjectivePoint& p) const {
    return coalition_values(p.agent_values, cs_, gamma_);
  }

  [[nodiscard]] bool mutually_non_dominated() const {
    for (std::size_t i = 0; i < objectives_.size(); ++i)
      for (std::size_t j = 0; j < objectives_.size(); ++j)
        if (i != j && dominates(objectives_[i], objectives_[j])) return false;
    return true;
  }

  static bool near_equal(const ObjectiveVector& a, const ObjectiveVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > kDedupTolerance) return false;
    return true;
  }

 private:
  CoalitionStructure cs_;
  std::vector<double> gamma_;
  std::vector<ObjectivePoint> points_;
  std::vector<ObjectiveVector> objectives_;
};

/// Archive for `target` obtained by re-aggregating and filtering the points of
/// an all-singletons archive. Every returned decision vector comes from the input.
inline ParetoArchive restrict_archive(const ParetoArchive& singleton_archive, const CoalitionStructure& target) {
  const auto& src = singleton_archive.structure();
  detail::require(src.n_agents() == target.n_agents(), Errc::MismatchedAgentSets,
                  "target structure has a different agent count");
  detail::require(src.is_singletons(), Errc::InvalidArgument, "source archive must belong to the singleton structure");
  return ParetoArchive::from_candidates(target, singleton_archive.gamma(), singleton_archive.points());
}

/// Componentwise maximum of the coalition objectives over the archive.
inline ObjectiveVector utopia_point(const ParetoArchive& archive) {
  detail::require(!archive.empty(), Errc::EmptyArchive, "utopia point of an empty archive");
  ObjectiveVector u = archive.objectives().front();
  for (const auto& o : archive.objectives())
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max(u[i], o[i]);
  return u;
}

struct UtopiaWeighted {
  /// One positive weight per agent; coalition weights are sums over members.
  std::vector<double> agent_weights;
  double p = 2.0;
};

struct FavorAgent {
  std::size_t agent = 0;
};

using SelectionCriterion = std::variant<UtopiaWeighted, FavorAgent>;

/// Weighted L_p distance of every archive point to the utopia point.
inline std::vector<double> utopia_distances(const ParetoArchive& archive, const UtopiaWeighted& crit) {
  detail::require(!archive.empty(), Errc::EmptyArchive, "selection from an empty archive");
  const auto& cs = archive.structure();
  detail::require(crit.agent_weights.size() == cs.n_agents(), Errc::LengthMismatch, "one weight per agent required");
  for (double b : crit.agent_weights)
    detail::require(b > 0.0 && std::isfinite(b), Errc::NonPositiveWeight, "agent weights must be strictly positive");
  detail::require(crit.p >= 1.0 && std::isfinite(crit.p), Errc::InvalidArgument, "norm exponent must be >= 1");

  std::vector<double> beta(cs.size(), 0.0);
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (auto a : cs[i].members()) beta[i] += crit.agent_weights[a];

  const auto utopia = utopia_point(archive);
  std::vector<double> out;
  out.reserve(archive.size());
  for (const auto& o : archive.objectives()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) acc += std::pow(std::abs(beta[i] * (o[i] - utopia[i])), crit.p);
    out.push_back(std::pow(acc, 1.0 / crit.p));
  }
  return out;
}

/// Index of the point closest to the utopia point; lowest index on ties.
inline std::size_t select_utopia_index(const ParetoArchive& archive, const UtopiaWeighted& crit) {
  const auto d = utopia_distances(archive, crit);
  return static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
}

inline const ObjectivePoint& select_utopia(const ParetoArchive& archive, const UtopiaWeighted& crit) {
  return archive.points()[select_utopia_index(archive, crit)];
}

/// Index of the point giving agent `a` the largest weighted value. Ties go to
/// the largest weighted total, then to the lowest index.
inline std::size_t select_favor_agent_index(const ParetoArchive& archive, std::size_t a) {
  detail::require(!archive.empty(), Errc::EmptyArchive, "selection from an empty archive");
  detail::require(a < archive.structure().n_agents(), Errc::BadAgentIndex, "agent index out of range");
  const auto& g = archive.gamma();
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)}); };
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  double best_total = best_val;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const auto& v = archive.points()[i].agent_values;
    const double val = g[a] * v[a];
    double total = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) total += g[k] * v[k];
    const bool better =
        i == 0 || (close(val, best_val) ? (!close(total, best_total) && total > best_total) : val > best_val);
    if (better) {
      best = i;
      best_val = val;
      best_total = total;
    }
  }
  return best;
}

inline const ObjectivePoint& select_favor_agent(const ParetoArchive& archive, std::size_t a) {
  return archive.points()[select_favor_agent_index(archive, a)];
}

inline std::size_t select_index(const ParetoArchive& archive, const SelectionCriterion& criterion) {
  if (const auto* u = std::get_if<UtopiaWeighted>(&criterion)) return select_utopia_index(archive, *u);
  return select_favor_agent_index(archive, std::get<FavorAgent>(criterion).agent);
}

}  // namespace cpareto
