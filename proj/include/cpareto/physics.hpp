#pragma once

// Scenario definition and the two constraint models: the Theis superposition
// aquifer model (linear in the rates) and a nonlinear pressure proxy.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpareto/error.hpp"
#include "cpareto/matrix.hpp"
#include "cpareto/pareto.hpp"

namespace cpareto {

inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

enum class ModelKind { Linear, Proxy };

struct Well {
  double x = 0.0;  // m
  double y = 0.0;  // m
  std::size_t agent = 0;
  /// Whole intervals before the well starts injecting.
  std::size_t start_offset = 0;
};

/// Bilinear pressure coupling `coefficient * q_a * q_b` added to the constraints of wells a and b.
struct Coupling {
  std::size_t well_a = 0;
  std::size_t well_b = 0;
  double coefficient = 0.0;
};

struct ProxyParams {
  /// Interference kernel A[j][k] = 1 / (1 + d_jk / length_scale).
  double length_scale = 1000.0;
  double kappa = 0.0;
  double exponent = 3.0;
  std::vector<Coupling> couplings;
};

struct Scenario {
  std::string name;
  std::string description;
  ModelKind model = ModelKind::Linear;
  std::vector<std::string> agent_labels;
  std::vector<Well> wells;
  std::size_t n_intervals = 1;
  double dt_seconds = kSecondsPerYear;
  double storage = 1e-5;          // S, dimensionless
  double transmissivity = 1e-3;   // T, m^2/s
  double q_min = 0.0;             // rate unit
  double q_max = 1.0;             // rate unit
  double h_crit = 1.0;            // m (linear) or proxy pressure units
  std::vector<double> gamma;      // per-agent objective weights
  double q_vol = 1e6 / kSecondsPerYear;  // rate unit -> m^3/s
  double r_well = 0.2;            // m, representative constraint radius
  ProxyParams proxy;
  std::string rate_unit = "Mm3/year";
  std::string volume_unit = "Mm3";

  [[nodiscard]] std::size_t n_agents() const noexcept { return agent_labels.size(); }
  [[nodiscard]] std::size_t n_wells() const noexcept { return wells.size(); }
  [[nodiscard]] double dt_years() const noexcept { return dt_seconds / kSecondsPerYear; }

  [[nodiscard]] std::size_t n_decision() const noexcept {
    std::size_t n = 0;
    for (const auto& w : wells) n += w.start_offset < n_intervals ? n_intervals - w.start_offset : 0;
    return n;
  }

  /// First decision index of each well; decision vectors are well-major.
  [[nodiscard]] std::vector<std::size_t> well_offsets() const {
    std::vector<std::size_t> out;
    std::size_t k = 0;
    for (const auto& w : wells) {
      out.push_back(k);
      k += w.start_offset < n_intervals ? n_intervals - w.start_offset : 0;
    }
    return out;
  }

  /// Full per-well, per-interval rate table; inactive intervals are zero.
  [[nodiscard]] std::vector<std::vector<double>> expand_rates(std::span<const double> q) const {
    detail::require(q.size() == n_decision(), Errc::LengthMismatch,
                    "decision vector has " + std::to_string(q.size()) + " entries, expected " +
                        std::to_string(n_decision()));
    std::vector<std::vector<double>> r(wells.size(), std::vector<double>(n_intervals, 0.0));
    std::size_t k = 0;
    for (std::size_t w = 0; w < wells.size(); ++w)
      for (std::size_t n = wells[w].start_offset; n < n_intervals; ++n) r[w][n] = q[k++];
    return r;
  }

  void validate() const {
    using detail::require;
    require(!agent_labels.empty(), Errc::InvalidArgument, "scenario has no agents");
    require(agent_labels.size() <= 12, Errc::AgentCountTooLarge, "too many agents");
    require(!wells.empty(), Errc::InvalidArgument, "scenario has no wells");
    require(n_intervals >= 1, Errc::InvalidArgument, "need at least one rate interval");
    require(dt_seconds > 0.0, Errc::InvalidArgument, "dt must be positive");
    require(q_min <= q_max, Errc::InvalidArgument, "q_min exceeds q_max");
    require(gamma.size() == agent_labels.size(), Errc::LengthMismatch, "one gamma per agent required");
    std::vector<bool> owns(agent_labels.size(), false);
    for (const auto& w : wells) {
      require(w.agent < agent_labels.size(), Errc::BadAgentIndex, "well owned by unknown agent");
      require(w.start_offset < n_intervals, Errc::InvalidArgument, "well starts after the horizon");
      owns[w.agent] = true;
    }
    for (std::size_t a = 0; a < owns.size(); ++a)
      require(owns[a], Errc::InvalidArgument, "agent " + agent_labels[a] + " operates no well");
    if (model == ModelKind::Linear) {
      require(storage > 0.0 && transmissivity > 0.0, Errc::InvalidArgument, "S and T must be positive");
      require(r_well > 0.0, Errc::InvalidArgument, "representative radius must be positive");
      require(h_crit > 0.0, Errc::InvalidArgument, "h_crit must be positive");
      require(q_vol > 0.0, Errc::InvalidArgument, "q_vol must be positive");
    } else {
      require(proxy.exponent > 1.0, Errc::InvalidArgument, "proxy exponent must exceed 1");
      require(proxy.kappa > 0.0, Errc::InvalidArgument, "proxy kappa must be positive");
      require(proxy.length_scale > 0.0, Errc::InvalidArgument, "proxy length scale must be positive");
      require(q_min >= 0.0, Errc::InvalidArgument, "proxy rates must be nonnegative");
      const auto a = interference_matrix();
      for (const auto& c : proxy.couplings) {
        require(c.well_a < wells.size() && c.well_b < wells.size() && c.well_a != c.well_b, Errc::InvalidArgument,
                "coupling references invalid wells");
        // A negative coupling must not be able to push a constraint below zero.
        if (c.coefficient < 0.0)
          require(-c.coefficient * q_max <= std::min(a(c.well_a, c.well_b), a(c.well_b, c.well_a)),
                  Errc::InvalidArgument, "negative coupling too strong for the rate bounds");
      }
    }
  }

  [[nodiscard]] DenseMatrix interference_matrix() const {
    DenseMatrix a(wells.size(), wells.size());
    for (std::size_t j = 0; j < wells.size(); ++j)
      for (std::size_t k = 0; k < wells.size(); ++k)
        a(j, k) = 1.0 / (1.0 + std::hypot(wells[j].x - wells[k].x, wells[j].y - wells[k].y) / proxy.length_scale);
    return a;
  }
};

/// Theis well function W(chi) = E1(chi), the exponential integral.
inline double well_function(double chi) {
  detail::require(chi > 0.0 && std::isfinite(chi), Errc::NonPositiveArgument, "well function needs chi > 0");
  constexpr double eps = 1e-16;
  if (chi < 1.0) {
    double sum = -std::log(chi) - std::numbers::egamma;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= -chi / k;
      const double del = -term / k;
      sum += del;
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    return sum;
  }
  if (chi > 700.0) return 0.0;
  // Modified Lentz evaluation of the continued fraction.
  constexpr double tiny = 1e-300;
  double b = chi + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h * std::exp(-chi);
}

namespace detail {

// Superposed Theis response at time t for squared distances r2[k] to each well.
inline double theis_superposition(const Scenario& s, const std::vector<std::vector<double>>& rates,
                                  std::span<const double> r2, double t) {
  double h = 0.0;
  const double scale = s.q_vol / (4.0 * std::numbers::pi * s.transmissivity);
  for (std::size_t n = 0; n < s.n_intervals; ++n) {
    const double elapsed = t - static_cast<double>(n) * s.dt_seconds;
    if (elapsed <= 0.0) break;
    for (std::size_t k = 0; k < s.wells.size(); ++k) {
      const double dq = rates[k][n] - (n > 0 ? rates[k][n - 1] : 0.0);
      if (dq == 0.0) continue;
      const double chi = s.storage * r2[k] / (4.0 * s.transmissivity * elapsed);
      h += dq * scale * well_function(chi);
    }
  }
  return h;
}

}  // namespace detail

/// Head change at (x, y) and time t for a rate table rates[well][interval].
inline double head_change(const Scenario& s, const std::vector<std::vector<double>>& rates, double x, double y,
                          double t) {
  detail::require(t > 0.0, Errc::InvalidArgument, "evaluation time must be positive");
  detail::require(rates.size() == s.wells.size(), Errc::LengthMismatch, "one rate row per well required");
  std::vector<double> r2(s.wells.size());
  for (std::size_t k = 0; k < s.wells.size(); ++k) {
    detail::require(rates[k].size() == s.n_intervals, Errc::LengthMismatch, "one rate per interval required");
    const double dx = x - s.wells[k].x;
    const double dy = y - s.wells[k].y;
    r2[k] = dx * dx + dy * dy;
    detail::require(r2[k] > 0.0, Errc::EvaluationAtWellCenter, "head evaluated at the center of well " + std::to_string(k));
  }
  return detail::theis_superposition(s, rates, r2, t);
}

/// Head change at the representative point of well j: the self term uses
/// r_well, the other wells use center-to-center distance.
inline double representative_head(const Scenario& s, const std::vector<std::vector<double>>& rates, std::size_t j,
                                  double t) {
  detail::require(j < s.wells.size(), Errc::InvalidArgument, "well index out of range");
  detail::require(t > 0.0, Errc::InvalidArgument, "evaluation time must be positive");
  std::vector<double> r2(s.wells.size());
  for (std::size_t k = 0; k < s.wells.size(); ++k) {
    const double dx = s.wells[j].x - s.wells[k].x;
    const double dy = s.wells[j].y - s.wells[k].y;
    r2[k] = k == j ? s.r_well * s.r_well : dx * dx + dy * dy;
  }
  return detail::theis_superposition(s, rates, r2, t);
}

struct LinearConstraintSystem {
  DenseMatrix B;  // (N_t * N_w) x N_dv, rows time-major
  std::vector<double> b;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// B = Btilde (I_Nw (x) D) with Btilde from the well function at the
/// interval-end times; columns of inactive (pre-start) intervals are dropped.
inline LinearConstraintSystem assemble_linear(const Scenario& s) {
  s.validate();
  detail::require(s.model == ModelKind::Linear, Errc::InvalidArgument, "scenario is not linear");
  const std::size_t nw = s.wells.size();
  const std::size_t nt = s.n_intervals;
  const double scale = s.q_vol / (4.0 * std::numbers::pi * s.transmissivity);

  DenseMatrix bt(nt * nw, nw * nt);
  for (std::size_t i = 1; i <= nt; ++i)
    for (std::size_t j = 0; j < nw; ++j)
      for (std::size_t k = 0; k < nw; ++k) {
        const double dx = s.wells[j].x - s.wells[k].x;
        const double dy = s.wells[j].y - s.wells[k].y;
        const double r2 = j == k ? s.r_well * s.r_well : dx * dx + dy * dy;
        for (std::size_t l = 1; l <= i; ++l) {
          const double elapsed = static_cast<double>(i - l + 1) * s.dt_seconds;
          bt((i - 1) * nw + j, k * nt + (l - 1)) = scale * well_function(s.storage * r2 / (4.0 * s.transmissivity * elapsed));
        }
      }

  // Right-multiplying by the block-diagonal difference operator D (D_ii = 1, D_{i,i-1} = -1).
  DenseMatrix full(nt * nw, nw * nt);
  for (std::size_t r = 0; r < nt * nw; ++r)
    for (std::size_t k = 0; k < nw; ++k)
      for (std::size_t l = 0; l < nt; ++l) {
        double v = bt(r, k * nt + l);
        if (l + 1 < nt) v -= bt(r, k * nt + l + 1);
        full(r, k * nt + l) = v;
      }

  LinearConstraintSystem sys;
  sys.B = DenseMatrix(nt * nw, s.n_decision());
  std::size_t col = 0;
  for (std::size_t k = 0; k < nw; ++k)
    for (std::size_t l = s.wells[k].start_offset; l < nt; ++l, ++col)
      for (std::size_t r = 0; r < nt * nw; ++r) sys.B(r, col) = full(r, k * nt + l);
  sys.b.assign(nt * nw, s.h_crit);
  sys.lo.assign(s.n_decision(), s.q_min);
  sys.hi.assign(s.n_decision(), s.q_max);
  return sys;
}

/// F_a: total volume injected by agent a's wells (rate x interval length).
inline std::vector<double> agent_objectives(const Scenario& s, std::span<const double> q) {
  const auto rates = s.expand_rates(q);
  std::vector<double> f(s.n_agents(), 0.0);
  const double dt = s.dt_years();
  for (std::size_t w = 0; w < s.wells.size(); ++w)
    for (std::size_t n = 0; n < s.n_intervals; ++n) f[s.wells[w].agent] += rates[w][n] * dt;
  return f;
}

/// Proxy constraint values g[n * N_w + j] for interval n and well j.
inline std::vector<double> proxy_constraint_values(const Scenario& s, const DenseMatrix& interference,
                                                   std::span<const double> q) {
  const auto rates = s.expand_rates(q);
  const std::size_t nw = s.wells.size();
  std::vector<double> g(s.n_intervals * nw, 0.0);
  std::vector<double> qbar(nw);
  for (std::size_t n = 0; n < s.n_intervals; ++n) {
    double total = 0.0;
    for (std::size_t k = 0; k < nw; ++k) {
      qbar[k] = rates[k][n];
      total += qbar[k];
    }
    const double capacity = s.proxy.kappa * std::pow(std::max(total, 0.0), s.proxy.exponent);
    for (std::size_t j = 0; j < nw; ++j) {
      double v = capacity;
      for (std::size_t k = 0; k < nw; ++k) v += interference(j, k) * qbar[k];
      g[n * nw + j] = v;
    }
    for (const auto& c : s.proxy.couplings) {
      const double term = c.coefficient * qbar[c.well_a] * qbar[c.well_b];
      g[n * nw + c.well_a] += term;
      g[n * nw + c.well_b] += term;
    }
  }
  return g;
}

struct ConstraintReport {
  /// max(0, g_i - g_max - tol) for every model constraint.
  std::vector<double> violations;
  /// Largest violation over model and bound constraints; 0 iff feasible.
  double max_violation = 0.0;
};

/// Scenario plus cached model data. `evaluate` is the single place where
/// physics evaluations are counted.
class PhysicsModel {
 public:
  explicit PhysicsModel(Scenario s) : scenario_(std::move(s)) {
    scenario_.validate();
    if (scenario_.model == ModelKind::Linear)
      linear_ = assemble_linear(scenario_);
    else
      interference_ = scenario_.interference_matrix();
  }

  PhysicsModel(const PhysicsModel&) = delete;
  PhysicsModel& operator=(const PhysicsModel&) = delete;

  [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
  [[nodiscard]] const std::optional<LinearConstraintSystem>& linear_system() const noexcept { return linear_; }

  /// Raw constraint values g(q), compared against h_crit.
  [[nodiscard]] std::vector<double> constraint_values(std::span<const double> q) const {
    detail::require(q.size() == scenario_.n_decision(), Errc::LengthMismatch, "decision vector length mismatch");
    if (linear_) return linear_->B.multiply(q);
    return proxy_constraint_values(scenario_, interference_, q);
  }

  [[nodiscard]] ConstraintReport evaluate_constraints(std::span<const double> q) const {
    ConstraintReport rep;
    const double gmax = scenario_.h_crit;
    const double tol = 1e-7 * (1.0 + std::abs(gmax));
    for (double g : constraint_values(q)) {
      const double v = std::max(0.0, g - gmax - tol);
      rep.violations.push_back(v);
      rep.max_violation = std::max(rep.max_violation, v);
    }
    const double btol_lo = 1e-9 * (1.0 + std::abs(scenario_.q_min));
    const double btol_hi = 1e-9 * (1.0 + std::abs(scenario_.q_max));
    for (double x : q) {
      rep.max_violation = std::max(rep.max_violation, scenario_.q_min - x - btol_lo);
      rep.max_violation = std::max(rep.max_violation, x - scenario_.q_max - btol_hi);
    }
    return rep;
  }

  /// Counted evaluation: objectives plus feasibility of q.
  [[nodiscard]] ObjectivePoint evaluate(std::span<const double> q) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    ObjectivePoint p;
    p.decision.assign(q.begin(), q.end());
    p.agent_values = agent_objectives(scenario_, q);
    p.max_constraint_violation = evaluate_constraints(q).max_violation;
    p.feasible = p.max_constraint_violation == 0.0;
    return p;
  }

  [[nodiscard]] std::uint64_t evaluations() const noexcept { return count_.load(std::memory_order_relaxed); }

 private:
  Scenario scenario_;
  std::optional<LinearConstraintSystem> linear_;
  DenseMatrix interference_;
  mutable std::atomic<std::uint64_t> count_{0};
};

inline ConstraintReport evaluate_constraints(const PhysicsModel& model, std::span<const double> q) {
  return model.evaluate_constraints(q);
}

}  // namespace cpareto
