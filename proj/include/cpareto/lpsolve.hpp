#pragma once

// Dense bounded-variable primal simplex (Bland's rule) and weighted-sum
// sweeps over the linear aquifer model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/matrix.hpp"
#include "cpareto/parallel.hpp"
#include "cpareto/pareto.hpp"
#include "cpareto/physics.hpp"
#include "cpareto/strategy.hpp"

namespace cpareto {

/// maximize c.x  subject to  A x <= b,  lo <= x <= hi.
struct LinearProgram {
  std::vector<double> c;
  DenseMatrix A;
  std::vector<double> b;
  std::vector<double> lo;
  std::vector<double> hi;
};

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kLpFeasibilityTolerance = 1e-7;

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(std::size_t rows, std::size_t cols) : m_(rows), n_(cols) {}

  // Columns: structural [0, n), slacks [n, n+m), artificials after that.
  LpResult solve(const LinearProgram& lp) {
    const std::size_t n = n_;
    const std::size_t m = m_;
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = lp.b[i];
      for (std::size_t j = 0; j < n; ++j) s -= lp.A(i, j) * lp.lo[j];
      rhs[i] = s;
    }
    std::vector<std::size_t> art_rows;
    for (std::size_t i = 0; i < m; ++i)
      if (rhs[i] < 0.0) art_rows.push_back(i);
    total_ = n + m + art_rows.size();
    upper_.assign(total_, kInf);
    for (std::size_t j = 0; j < n; ++j) upper_[j] = lp.hi[j] - lp.lo[j];
    flipped_.assign(total_, false);
    tab_ = DenseMatrix(m, total_);
    beta_.assign(m, 0.0);
    basis_.assign(m, 0);
    is_basic_.assign(total_, false);

    std::size_t next_art = n + m;
    for (std::size_t i = 0; i < m; ++i) {
      const bool neg = rhs[i] < 0.0;
      const double sign = neg ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n; ++j) tab_(i, j) = sign * lp.A(i, j);
      tab_(i, n + i) = sign;
      beta_[i] = sign * rhs[i];
      if (neg) {
        tab_(i, next_art) = 1.0;
        basis_[i] = next_art++;
      } else {
        basis_[i] = n + i;
      }
      is_basic_[basis_[i]] = true;
    }

    LpResult res;
    if (!art_rows.empty()) {
      // Phase I: maximize -(sum of artificials).
      std::vector<double> cost(total_, 0.0);
      for (std::size_t k = n + m; k < total_; ++k) cost[k] = -1.0;
      price(cost);
      iterate(total_, res.iterations);
      if (z0_ < -kLpFeasibilityTolerance * (1.0 + max_abs(lp.b))) return res;
      // Artificials stay but are pinned at zero.
      for (std::size_t k = n + m; k < total_; ++k) {
        upper_[k] = 0.0;
        if (flipped_[k]) complement_nonbasic(k);
      }
    }

    std::vector<double> cost(total_, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
    price(cost);
    iterate(n + m, res.iterations);

    std::vector<double> y(total_, 0.0);
    for (std::size_t i = 0; i < m; ++i) y[basis_[i]] = beta_[i];
    res.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      double v = flipped_[j] ? upper_[j] - y[j] : y[j];
      res.x[j] = std::clamp(lp.lo[j] + v, lp.lo[j], lp.hi[j]);
    }
    polish(lp, art_rows, res.x);
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += lp.c[j] * res.x[j];
    res.status = LpStatus::Optimal;
    return res;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr std::size_t kMaxIterations = 100000;

  static double max_abs(std::span<const double> v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
  }

  // Recomputes the basic variables of the final basis from the original rows in
  // extended precision, so the vertex does not carry the pivot-order rounding.
  void polish(const LinearProgram& lp, const std::vector<std::size_t>& art_rows, std::vector<double>& x) const {
    using ld = long double;
    const std::size_t n = n_;
    const std::size_t m = m_;
    if (m == 0) return;
    std::vector<ld> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = lp.b[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (is_basic_[j]) continue;
      const ld v = flipped_[j] ? lp.hi[j] : lp.lo[j];
      for (std::size_t i = 0; i < m; ++i) rhs[i] -= static_cast<ld>(lp.A(i, j)) * v;
    }
    std::vector<std::vector<ld>> M(m, std::vector<ld>(m, 0.0L));
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t k = basis_[r];
      if (k < n) {
        for (std::size_t i = 0; i < m; ++i) M[i][r] = lp.A(i, k);
      } else if (k < n + m) {
        M[k - n][r] = 1.0L;
      } else {
        M[art_rows[k - n - m]][r] = -1.0L;
      }
    }
    // Gaussian elimination with partial pivoting on a copy, then one refinement step.
    auto solve = [&](std::vector<ld> b, std::vector<ld>& out) {
      auto a = M;
      for (std::size_t c = 0; c < m; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < m; ++i)
          if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
        if (std::abs(a[p][c]) < 1e-14L) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = c + 1; i < m; ++i) {
          const ld f = a[i][c] / a[c][c];
          if (f == 0.0L) continue;
          for (std::size_t k = c; k < m; ++k) a[i][k] -= f * a[c][k];
          b[i] -= f * b[c];
        }
      }
      out.assign(m, 0.0L);
      for (std::size_t c = m; c-- > 0;) {
        ld s = b[c];
        for (std::size_t k = c + 1; k < m; ++k) s -= a[c][k] * out[k];
        out[c] = s / a[c][c];
      }
      return true;
    };
    std::vector<ld> xb;
    if (!solve(rhs, xb)) return;
    std::vector<ld> resid(m);
    for (std::size_t i = 0; i < m; ++i) {
      ld s = rhs[i];
      for (std::size_t r = 0; r < m; ++r) s -= M[i][r] * xb[r];
      resid[i] = s;
    }
    std::vector<ld> dx;
    if (solve(resid, dx))
      for (std::size_t r = 0; r < m; ++r) xb[r] += dx[r];
    std::vector<double> out = x;
    for (std::size_t j = 0; j < n; ++j)
      if (!is_basic_[j]) out[j] = flipped_[j] ? lp.hi[j] : lp.lo[j];
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t k = basis_[r];
      if (k >= n) continue;
      const double v = static_cast<double>(xb[r]);
      // A polished value far from the simplex value means the basis is ill-conditioned.
      if (!std::isfinite(v) || std::abs(v - x[k]) > 1e-6 * (1.0 + std::abs(x[k]))) return;
      out[k] = std::clamp(v, lp.lo[k], lp.hi[k]);
    }
    x = std::move(out);
  }

  // Rebuilds the reduced-cost row for `cost` given in original (unflipped) variables.
  void price(const std::vector<double>& cost) {
    d_.assign(total_, 0.0);
    z0_ = 0.0;
    std::vector<double> eff(total_);
    for (std::size_t k = 0; k < total_; ++k) {
      eff[k] = flipped_[k] ? -cost[k] : cost[k];
      if (flipped_[k]) z0_ += cost[k] * upper_[k];
    }
    for (std::size_t k = 0; k < total_; ++k) d_[k] = is_basic_[k] ? 0.0 : eff[k];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = eff[basis_[i]];
      if (cb == 0.0) continue;
      z0_ += cb * beta_[i];
      const auto row = tab_.row(i);
      for (std::size_t k = 0; k < total_; ++k)
        if (!is_basic_[k]) d_[k] -= cb * row[k];
    }
  }

  void complement_nonbasic(std::size_t j) {
    const double u = upper_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      beta_[i] -= tab_(i, j) * u;
      tab_(i, j) = -tab_(i, j);
    }
    z0_ += d_[j] * u;
    d_[j] = -d_[j];
    flipped_[j] = !flipped_[j];
  }

  void complement_basic_row(std::size_t r) {
    const std::size_t bv = basis_[r];
    auto row = tab_.row(r);
    for (std::size_t k = 0; k < total_; ++k)
      if (k != bv) row[k] = -row[k];
    beta_[r] = upper_[bv] - beta_[r];
    flipped_[bv] = !flipped_[bv];
  }

  void pivot(std::size_t r, std::size_t j) {
    auto prow = tab_.row(r);
    const double piv = prow[j];
    for (auto& v : prow) v /= piv;
    beta_[r] /= piv;
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = tab_(i, j);
      if (f == 0.0) continue;
      auto row = tab_.row(i);
      for (std::size_t k = 0; k < total_; ++k) row[k] -= f * prow[k];
      row[j] = 0.0;
      beta_[i] -= f * beta_[r];
    }
    const double dj = d_[j];
    if (dj != 0.0) {
      for (std::size_t k = 0; k < total_; ++k) d_[k] -= dj * prow[k];
      d_[j] = 0.0;
      z0_ += dj * beta_[r];
    }
    is_basic_[basis_[r]] = false;
    basis_[r] = j;
    is_basic_[j] = true;
  }

  // Columns >= `limit` never enter.
  void iterate(std::size_t limit, std::size_t& iterations) {
    for (;;) {
      detail::require(iterations < kMaxIterations, Errc::InvalidArgument, "simplex iteration limit reached");
      std::size_t enter = total_;
      for (std::size_t k = 0; k < limit; ++k)
        if (!is_basic_[k] && upper_[k] > 0.0 && d_[k] > kCostTol) {
          enter = k;
          break;
        }
      if (enter == total_) return;
      ++iterations;

      double best = upper_[enter];
      std::size_t leave_row = m_;
      bool leave_at_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tab_(i, enter);
        double t;
        bool at_upper;
        if (a > kPivotTol) {
          t = std::max(beta_[i], 0.0) / a;
          at_upper = false;
        } else if (a < -kPivotTol && upper_[basis_[i]] < kInf) {
          t = std::max(upper_[basis_[i]] - beta_[i], 0.0) / -a;
          at_upper = true;
        } else {
          continue;
        }
        // Bland: smallest ratio, then smallest leaving variable index.
        bool take;
        if (!(best < kInf)) {
          take = true;
        } else if (std::abs(t - best) <= 1e-12 * (1.0 + best)) {
          take = leave_row < m_ && basis_[i] < basis_[leave_row];
        } else {
          take = t < best;
        }
        if (take) {
          best = t;
          leave_row = i;
          leave_at_upper = at_upper;
        }
      }
      detail::require(best < kInf, Errc::Unbounded, "linear program is unbounded");
      if (leave_row == m_) {
        complement_nonbasic(enter);
        continue;
      }
      if (leave_at_upper) complement_basic_row(leave_row);
      pivot(leave_row, enter);
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t total_ = 0;
  DenseMatrix tab_;
  std::vector<double> beta_;
  std::vector<double> d_;
  std::vector<double> upper_;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<bool> flipped_;
  double z0_ = 0.0;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.c.size();
  detail::require(lp.A.cols() == n && lp.lo.size() == n && lp.hi.size() == n, Errc::DimensionMismatch,
                  "objective, matrix and bounds disagree on the variable count");
  detail::require(lp.A.rows() == lp.b.size(), Errc::DimensionMismatch, "matrix rows and right-hand side differ");
  for (std::size_t j = 0; j < n; ++j) {
    detail::require(std::isfinite(lp.lo[j]) && std::isfinite(lp.hi[j]), Errc::Unbounded, "variable bounds must be finite");
    detail::require(lp.lo[j] <= lp.hi[j], Errc::InvalidArgument, "lower bound exceeds upper bound");
  }
  detail::BoundedSimplex s(lp.A.rows(), n);
  auto res = s.solve(lp);
  if (res.status != LpStatus::Optimal) return res;
  // Final primal check on the original rows.
  const auto ax = lp.A.multiply(res.x);
  for (std::size_t i = 0; i < ax.size(); ++i)
    if (ax[i] > lp.b[i] + kLpFeasibilityTolerance * (1.0 + std::abs(lp.b[i]))) {
      res.status = LpStatus::Infeasible;
      break;
    }
  return res;
}

/// Positive weight vectors on the simplex: w_j = eps + (1 - k eps) i_j / m with sum_j i_j = m.
class WeightGrid {
 public:
  static constexpr double kDefaultFloor = 1e-3;

  WeightGrid(std::size_t dimension, std::size_t resolution, double floor = kDefaultFloor)
      : dim_(dimension), m_(resolution), floor_(floor) {
    detail::require(dim_ >= 1, Errc::InvalidArgument, "weight grid needs at least one dimension");
    detail::require(m_ >= 1, Errc::InvalidArgument, "weight grid resolution must be positive");
    detail::require(floor_ > 0.0 && floor_ * static_cast<double>(dim_) < 1.0, Errc::InvalidArgument,
                    "weight floor incompatible with the dimension");
  }

  /// Default resolution by objective count: 100 for two, 40 for three, 12 beyond.
  static std::size_t default_resolution(std::size_t dimension) {
    if (dimension <= 1) return 1;
    if (dimension == 2) return 100;
    if (dimension == 3) return 40;
    return 12;
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] std::size_t resolution() const noexcept { return m_; }
  [[nodiscard]] double floor() const noexcept { return floor_; }

  /// All grid weights in lexicographic order of the integer compositions.
  [[nodiscard]] std::vector<std::vector<double>> weights() const {
    std::vector<std::vector<double>> out;
    if (dim_ == 1) return {{1.0}};
    std::vector<std::size_t> comp(dim_, 0);
    const double scale = 1.0 - static_cast<double>(dim_) * floor_;
    auto emit = [&] {
      std::vector<double> w(dim_);
      for (std::size_t j = 0; j < dim_; ++j) w[j] = floor_ + scale * static_cast<double>(comp[j]) / static_cast<double>(m_);
      out.push_back(std::move(w));
    };
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
      if (pos + 1 == dim_) {
        comp[pos] = left;
        emit();
        return;
      }
      for (std::size_t v = left + 1; v-- > 0;) {
        comp[pos] = v;
        self(self, pos + 1, left - v);
      }
    };
    rec(rec, 0, m_);
    return out;
  }

 private:
  std::size_t dim_;
  std::size_t m_;
  double floor_;
};

/// Cost vector c_j = sum_C alpha_C sum_{a in C} gamma_a dF_a/dq_j.
inline std::vector<double> wsm_costs(const Scenario& s, const CoalitionStructure& cs, std::span<const double> alpha) {
  detail::require(alpha.size() == cs.size(), Errc::LengthMismatch, "one weight per coalition required");
  detail::require(cs.n_agents() == s.n_agents(), Errc::MismatchedAgentSets, "structure and scenario agent counts differ");
  std::vector<double> c;
  c.reserve(s.n_decision());
  const double dt = s.dt_years();
  for (const auto& w : s.wells) {
    const double coef = alpha[cs.coalition_of(w.agent)] * s.gamma[w.agent] * dt;
    for (std::size_t n = w.start_offset; n < s.n_intervals; ++n) c.push_back(coef);
  }
  return c;
}

/// Solves one weighted-sum LP and evaluates (counts) the optimum.
inline ObjectivePoint solve_weighted(const PhysicsModel& model, const CoalitionStructure& cs,
                                     std::span<const double> alpha) {
  const auto& sys = model.linear_system();
  detail::require(sys.has_value(), Errc::InvalidArgument, "weighted-sum LP requires a linear scenario");
  LinearProgram lp{wsm_costs(model.scenario(), cs, alpha), sys->B, sys->b, sys->lo, sys->hi};
  auto res = solve_lp(lp);
  detail::require(res.status == LpStatus::Optimal, Errc::NoFeasibleFound, "weighted-sum LP is infeasible");
  return model.evaluate(res.x);
}

struct SweepOptions {
  std::size_t resolution = 0;  // 0: WeightGrid::default_resolution
  double floor = WeightGrid::kDefaultFloor;
  /// Exact bi-objective front vertices by dichotomic weight refinement.
  bool refine_two_objective = true;
};

namespace detail {

// Dichotomic search between two front points: each new weight is the normal of
// the segment joining neighbours; recursion stops when no point lies beyond it.
inline void dichotomic_refine(const PhysicsModel& model, const CoalitionStructure& cs, std::span<const double> gamma,
                              const ObjectivePoint& p1, const ObjectivePoint& p2, std::vector<ObjectivePoint>& out,
                              int depth) {
  if (depth > 60) return;
  const auto f1 = coalition_values(p1.agent_values, cs, gamma);
  const auto f2 = coalition_values(p2.agent_values, cs, gamma);
  double n0 = f2[1] - f1[1];
  double n1 = f1[0] - f2[0];
  if (n0 <= 0.0 || n1 <= 0.0) return;
  const double sum = n0 + n1;
  n0 /= sum;
  n1 /= sum;
  const double alpha[2] = {n0, n1};
  auto p = solve_weighted(model, cs, alpha);
  const auto f = coalition_values(p.agent_values, cs, gamma);
  const double base = n0 * f1[0] + n1 * f1[1];
  if (n0 * f[0] + n1 * f[1] <= base + 1e-6 * (1.0 + std::abs(base))) return;
  out.push_back(p);
  dichotomic_refine(model, cs, gamma, p1, p, out, depth + 1);
  dichotomic_refine(model, cs, gamma, p, p2, out, depth + 1);
}

}  // namespace detail

/// Raw weighted-sum solutions for `cs` (grid order, then refinement points).
inline std::vector<ObjectivePoint> wsm_candidates(const PhysicsModel& model, const CoalitionStructure& cs,
                                                  const SweepOptions& opt = {}) {
  const std::size_t k = cs.size();
  const std::size_t m = opt.resolution ? opt.resolution : WeightGrid::default_resolution(k);
  const auto weights = WeightGrid(k, m, opt.floor).weights();
  std::vector<ObjectivePoint> pts(weights.size());
  parallel_for(weights.size(), [&](std::size_t i) { pts[i] = solve_weighted(model, cs, weights[i]); });
  if (k == 2 && opt.refine_two_objective) {
    const double e = opt.floor;
    const double a[2] = {1.0 - e, e};
    const double b[2] = {e, 1.0 - e};
    auto pa = solve_weighted(model, cs, a);
    auto pb = solve_weighted(model, cs, b);
    std::vector<ObjectivePoint> extra{pa, pb};
    detail::dichotomic_refine(model, cs, model.scenario().gamma, pa, pb, extra, 0);
    pts.insert(pts.end(), extra.begin(), extra.end());
  }
  return pts;
}

inline ParetoArchive wsm_sweep(const PhysicsModel& model, const CoalitionStructure& cs, const SweepOptions& opt = {}) {
  const auto pts = wsm_candidates(model, cs, opt);
  return ParetoArchive::from_candidates(cs, model.scenario().gamma, pts);
}

/// Per-coalition extreme LPs (target weight 1-(k-1)eps, eps elsewhere).
inline std::vector<ObjectivePoint> lp_extreme_points(const PhysicsModel& model, const CoalitionStructure& cs,
                                                     double eps = WeightGrid::kDefaultFloor) {
  std::vector<ObjectivePoint> out;
  const std::size_t k = cs.size();
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<double> alpha(k, eps);
    alpha[t] = 1.0 - static_cast<double>(k - 1) * eps;
    out.push_back(solve_weighted(model, cs, alpha));
  }
  return out;
}

/// All fronts of the linear game by weighted-sum sweeps.
///  NonNested: independent sweep per structure.
///  TopDown:   extreme LPs of every structure plus one singleton sweep, then restriction.
///  BottomUp:  full sweeps of every coarser structure merged into the singleton sweep, then restriction.
inline StrategyResult run_linear_strategy(const PhysicsModel& model, StrategyKind kind, const SweepOptions& opt = {}) {
  const auto& s = model.scenario();
  const AgentSet agents(s.n_agents(), s.agent_labels);
  StrategyResult out;
  out.structures = enumerate_structures(agents);
  const auto singletons = CoalitionStructure::singletons(s.n_agents());
  const std::uint64_t start = model.evaluations();

  if (kind == StrategyKind::NonNested) {
    for (const auto& cs : out.structures) {
      const auto before = model.evaluations();
      out.archives.push_back(wsm_sweep(model, cs, opt));
      out.report.per_structure.emplace_back(cs.key(), model.evaluations() - before);
      ++out.report.moo_runs_count;
    }
    out.report.moo_runs = model.evaluations() - start;
    return out;
  }

  std::vector<ObjectivePoint> pool;
  for (const auto& cs : out.structures) {
    if (cs.is_singletons()) continue;
    const auto before = model.evaluations();
    std::vector<ObjectivePoint> pts;
    if (kind == StrategyKind::TopDown) {
      pts = lp_extreme_points(model, cs, opt.floor);
      ++out.report.extreme_runs_count;
    } else {
      pts = wsm_candidates(model, cs, opt);
      ++out.report.moo_runs_count;
    }
    out.report.per_structure.emplace_back(cs.key(), model.evaluations() - before);
    pool.insert(pool.end(), pts.begin(), pts.end());
  }
  const auto seeded = model.evaluations();
  if (kind == StrategyKind::TopDown)
    out.report.extreme_point_runs = seeded - start;
  else
    out.report.moo_runs = seeded - start;

  auto own = wsm_candidates(model, singletons, opt);
  ++out.report.moo_runs_count;
  out.report.per_structure.emplace_back(singletons.key(), model.evaluations() - seeded);
  out.report.moo_runs += model.evaluations() - seeded;
  own.insert(own.end(), pool.begin(), pool.end());
  const auto fine = ParetoArchive::from_candidates(singletons, s.gamma, own);
  for (const auto& cs : out.structures) out.archives.push_back(restrict_archive(fine, cs));
  return out;
}

}  // namespace cpareto
