#pragma once

// Constrained evolutionary optimization: NSGA-II for fronts, competitive swarm
// optimization (CSO) for single-objective extreme points, and the
// non-nested / bottom-up / top-down orchestration over all structures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/parallel.hpp"
#include "cpareto/pareto.hpp"
#include "cpareto/physics.hpp"
#include "cpareto/random.hpp"
#include "cpareto/strategy.hpp"

namespace cpareto {

struct EvoConfig {
  std::size_t population = 100;
  std::size_t generations = 100;
  std::uint64_t seed = 1;
  double crossover_rate = 0.9;
  double crossover_eta = 20.0;
  /// Per-variable mutation probability; negative means 1 / N_dv.
  double mutation_rate = -1.0;
  double mutation_eta = 20.0;
  /// Weight given to non-target coalitions in extreme-point runs.
  double extreme_eps = 1e-3;
  /// CSO settings; zero population/iterations inherit the NSGA-II values.
  std::size_t cso_population = 0;
  std::size_t cso_iterations = 0;
  double cso_phi = 0.1;
  /// Generation budget fraction of the bottom-up stage-1 partial runs.
  double partial_fraction = 0.25;

  void validate() const {
    detail::require(population >= 4 && population % 2 == 0, Errc::InvalidArgument,
                    "population must be even and at least 4");
    detail::require(crossover_rate >= 0.0 && crossover_rate <= 1.0, Errc::InvalidArgument, "crossover rate outside [0,1]");
    detail::require(mutation_rate <= 1.0, Errc::InvalidArgument, "mutation rate above 1");
    detail::require(crossover_eta >= 0.0 && mutation_eta >= 0.0, Errc::InvalidArgument, "distribution index negative");
    detail::require(extreme_eps > 0.0 && extreme_eps < 0.5, Errc::InvalidArgument, "extreme-point epsilon out of range");
    detail::require(cso_population == 0 || (cso_population >= 4 && cso_population % 2 == 0), Errc::InvalidArgument,
                    "CSO population must be even and at least 4");
    detail::require(partial_fraction > 0.0 && partial_fraction <= 1.0, Errc::InvalidArgument,
                    "partial fraction outside (0,1]");
  }
};

/// Box-bounded decision space plus a thread-safe evaluator.
struct Problem {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t n_agents = 0;
  std::function<ObjectivePoint(std::span<const double>)> evaluate;

  [[nodiscard]] std::size_t n_var() const noexcept { return lo.size(); }
};

inline Problem problem_of(const PhysicsModel& model) {
  const auto& s = model.scenario();
  Problem p;
  p.lo.assign(s.n_decision(), s.q_min);
  p.hi.assign(s.n_decision(), s.q_max);
  p.n_agents = s.n_agents();
  p.evaluate = [&model](std::span<const double> q) { return model.evaluate(q); };
  return p;
}

namespace detail {

inline bool feasibility_first_better(const ObjectivePoint& a, double fa, const ObjectivePoint& b, double fb) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return a.max_constraint_violation < b.max_constraint_violation;
  return fa > fb;
}

inline std::vector<std::vector<double>> latin_hypercube(const Problem& pr, std::size_t n, SplitMix64& rng) {
  const std::size_t d = pr.n_var();
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t i = 0; i < n; ++i)
      x[i][j] = pr.lo[j] + (pr.hi[j] - pr.lo[j]) * (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
  }
  return x;
}

// Initial decision vectors: the all-minimum member, up to half the population
// of seeds (evenly strided), then Latin-hypercube samples.
inline std::vector<std::vector<double>> initial_population(const Problem& pr, std::size_t n,
                                                           std::span<const ObjectivePoint> seeds, SplitMix64& rng,
                                                           std::vector<std::size_t>& seed_slots) {
  std::vector<std::vector<double>> pop;
  pop.push_back(pr.lo);
  const std::size_t take = std::min(seeds.size(), n / 2);
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t idx = take == seeds.size() ? k : k * seeds.size() / take;
    seed_slots.push_back(idx);
    pop.push_back(seeds[idx].decision);
  }
  auto lhs = latin_hypercube(pr, n - pop.size(), rng);
  for (auto& x : lhs) pop.push_back(std::move(x));
  return pop;
}

inline std::vector<ObjectivePoint> evaluate_all(const Problem& pr, const std::vector<std::vector<double>>& xs) {
  std::vector<ObjectivePoint> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = pr.evaluate(xs[i]); });
  return out;
}

// Evaluates the initial population; seed slots reuse the seeds' evaluations.
inline std::vector<ObjectivePoint> initial_points(const Problem& pr, const std::vector<std::vector<double>>& xs,
                                                  std::span<const ObjectivePoint> seeds,
                                                  const std::vector<std::size_t>& seed_slots) {
  std::vector<ObjectivePoint> pts(xs.size());
  std::vector<std::size_t> fresh;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i >= 1 && i < 1 + seed_slots.size())
      pts[i] = seeds[seed_slots[i - 1]];
    else
      fresh.push_back(i);
  }
  parallel_for(fresh.size(), [&](std::size_t k) { pts[fresh[k]] = pr.evaluate(xs[fresh[k]]); });
  return pts;
}

inline void sbx(std::vector<double>& a, std::vector<double>& b, const Problem& pr, double eta, SplitMix64& rng) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (rng.uniform() > 0.5) continue;
    const double lo = pr.lo[j];
    const double hi = pr.hi[j];
    if (std::abs(a[j] - b[j]) <= 1e-14 || hi <= lo) continue;
    const double y1 = std::min(a[j], b[j]);
    const double y2 = std::max(a[j], b[j]);
    const double u = rng.uniform();
    auto betaq = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    double c1 = 0.5 * ((y1 + y2) - betaq(1.0 + 2.0 * (y1 - lo) / (y2 - y1)) * (y2 - y1));
    double c2 = 0.5 * ((y1 + y2) + betaq(1.0 + 2.0 * (hi - y2) / (y2 - y1)) * (y2 - y1));
    c1 = std::clamp(c1, lo, hi);
    c2 = std::clamp(c2, lo, hi);
    if (rng.uniform() < 0.5) std::swap(c1, c2);
    a[j] = c1;
    b[j] = c2;
  }
}

inline void polynomial_mutation(std::vector<double>& x, const Problem& pr, double rate, double eta, SplitMix64& rng) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (rng.uniform() >= rate) continue;
    const double lo = pr.lo[j];
    const double hi = pr.hi[j];
    if (hi <= lo) continue;
    const double d1 = (x[j] - lo) / (hi - lo);
    const double d2 = (hi - x[j]) / (hi - lo);
    const double u = rng.uniform();
    const double p = 1.0 / (eta + 1.0);
    double dq;
    if (u < 0.5) {
      const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, p) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, p);
    }
    x[j] = std::clamp(x[j] + dq * (hi - lo), lo, hi);
  }
}

struct Individual {
  ObjectivePoint point;
  ObjectiveVector obj;
  std::size_t rank = 0;
  double crowding = 0.0;
};

inline bool constrained_dominates(const Individual& a, const Individual& b) {
  if (a.point.feasible != b.point.feasible) return a.point.feasible;
  if (!a.point.feasible) return a.point.max_constraint_violation < b.point.max_constraint_violation;
  return dominates(a.obj, b.obj);
}

// Assigns rank and crowding distance; returns the fronts.
inline std::vector<std::vector<std::size_t>> sort_and_crowd(std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (constrained_dominates(pop[i], pop[j])) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (constrained_dominates(pop[j], pop[i])) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] == 0) fronts[0].push_back(i);
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (auto i : fronts[f]) {
      pop[i].rank = f;
      for (auto j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();

  for (const auto& front : fronts) {
    for (auto i : front) pop[i].crowding = 0.0;
    if (front.size() <= 2) {
      for (auto i : front) pop[i].crowding = std::numeric_limits<double>::infinity();
      continue;
    }
    const std::size_t m = pop[front[0]].obj.size();
    std::vector<std::size_t> order(front);
    for (std::size_t k = 0; k < m; ++k) {
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pop[a].obj[k] < pop[b].obj[k]; });
      const double lo = pop[order.front()].obj[k];
      const double hi = pop[order.back()].obj[k];
      pop[order.front()].crowding = std::numeric_limits<double>::infinity();
      pop[order.back()].crowding = std::numeric_limits<double>::infinity();
      if (hi <= lo) continue;
      for (std::size_t r = 1; r + 1 < order.size(); ++r)
        pop[order[r]].crowding += (pop[order[r + 1]].obj[k] - pop[order[r - 1]].obj[k]) / (hi - lo);
    }
  }
  return fronts;
}

inline double aggregate_sum(const ObjectiveVector& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

inline double best_sum(const ParetoArchive& ar) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& o : ar.objectives()) best = std::max(best, aggregate_sum(o));
  return best;
}

}  // namespace detail

struct Nsga2Result {
  ParetoArchive archive;
  /// Best feasible aggregate (sum over coalitions) after initialization and each generation.
  std::vector<double> best_total_trace;
};

/// NSGA-II with feasibility-first constrained domination and an external
/// elitist archive. Seeds are already-evaluated points; every feasible seed
/// that stays non-dominated ends up in the archive.
inline Nsga2Result nsga2(const Problem& pr, const CoalitionStructure& cs, std::span<const double> gamma,
                         const EvoConfig& cfg, std::span<const ObjectivePoint> seeds = {}, std::uint64_t stream = 0) {
  cfg.validate();
  detail::require(gamma.size() == cs.n_agents() && pr.n_agents == cs.n_agents(), Errc::MismatchedAgentSets,
                  "problem, structure and weights disagree on the agent count");
  for (const auto& s : seeds)
    detail::require(s.decision.size() == pr.n_var(), Errc::LengthMismatch, "seed has the wrong number of variables");

  SplitMix64 rng(cfg.seed, stream);
  const std::size_t n = cfg.population;
  const double mut_rate = cfg.mutation_rate < 0.0 ? 1.0 / static_cast<double>(pr.n_var()) : cfg.mutation_rate;
  std::vector<double> gam(gamma.begin(), gamma.end());

  Nsga2Result res{ParetoArchive(cs, gam), {}};
  for (const auto& s : seeds) res.archive.offer(s);

  std::vector<std::size_t> seed_slots;
  const auto xs = detail::initial_population(pr, n, seeds, rng, seed_slots);
  auto init = detail::initial_points(pr, xs, seeds, seed_slots);

  std::vector<detail::Individual> pop;
  pop.reserve(2 * n);
  for (auto& p : init) {
    res.archive.offer(p);
    detail::Individual ind;
    ind.obj = coalition_values(p.agent_values, cs, gamma);
    ind.point = std::move(p);
    pop.push_back(std::move(ind));
  }
  detail::sort_and_crowd(pop);
  double best = detail::best_sum(res.archive);
  res.best_total_trace.push_back(best);

  auto better = [](const detail::Individual& a, const detail::Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
  };

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    auto tournament = [&]() -> const detail::Individual& {
      const auto& a = pop[rng.below(n)];
      const auto& b = pop[rng.below(n)];
      return better(b, a) ? b : a;
    };
    std::vector<std::vector<double>> children;
    children.reserve(n);
    while (children.size() < n) {
      auto c1 = tournament().point.decision;
      auto c2 = tournament().point.decision;
      if (rng.uniform() < cfg.crossover_rate) detail::sbx(c1, c2, pr, cfg.crossover_eta, rng);
      detail::polynomial_mutation(c1, pr, mut_rate, cfg.mutation_eta, rng);
      detail::polynomial_mutation(c2, pr, mut_rate, cfg.mutation_eta, rng);
      children.push_back(std::move(c1));
      children.push_back(std::move(c2));
    }
    auto evaluated = detail::evaluate_all(pr, children);
    for (auto& p : evaluated) {
      res.archive.offer(p);
      detail::Individual ind;
      ind.obj = coalition_values(p.agent_values, cs, gamma);
      ind.point = std::move(p);
      pop.push_back(std::move(ind));
    }
    const auto fronts = detail::sort_and_crowd(pop);
    std::vector<detail::Individual> next;
    next.reserve(2 * n);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= n) {
        for (auto i : front) next.push_back(std::move(pop[i]));
        continue;
      }
      std::vector<std::size_t> f(front);
      std::stable_sort(f.begin(), f.end(), [&](auto a, auto b) { return pop[a].crowding > pop[b].crowding; });
      for (std::size_t k = 0; next.size() < n; ++k) next.push_back(std::move(pop[f[k]]));
      break;
    }
    pop = std::move(next);
    detail::sort_and_crowd(pop);
    best = std::max(best, detail::best_sum(res.archive));
    res.best_total_trace.push_back(best);
  }
  detail::require(!res.archive.empty(), Errc::NoFeasibleFound, "NSGA-II found no feasible point");
  return res;
}

/// Competitive swarm optimization of a scalar fitness (maximized) with
/// feasibility-first pairwise competitions. Returns the best point seen.
inline ObjectivePoint cso(const Problem& pr, const std::function<double(const ObjectivePoint&)>& fitness,
                          const EvoConfig& cfg, std::span<const ObjectivePoint> seeds = {}, std::uint64_t stream = 0) {
  cfg.validate();
  SplitMix64 rng(cfg.seed, stream);
  const std::size_t n = cfg.cso_population ? cfg.cso_population : cfg.population;
  const std::size_t iters = cfg.cso_iterations ? cfg.cso_iterations : cfg.generations;
  const std::size_t d = pr.n_var();

  std::vector<std::size_t> seed_slots;
  auto xs = detail::initial_population(pr, n, seeds, rng, seed_slots);
  auto pts = detail::initial_points(pr, xs, seeds, seed_slots);
  std::vector<double> fit(n);
  for (std::size_t i = 0; i < n; ++i) fit[i] = fitness(pts[i]);
  std::vector<std::vector<double>> vel(n, std::vector<double>(d, 0.0));

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (detail::feasibility_first_better(pts[i], fit[i], pts[best], fit[best])) best = i;
  ObjectivePoint best_point = pts[best];
  double best_fit = fit[best];

  std::vector<std::size_t> order(n);
  for (std::size_t it = 0; it < iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<double> mean(d, 0.0);
    for (const auto& x : xs)
      for (std::size_t j = 0; j < d; ++j) mean[j] += x[j] / static_cast<double>(n);

    std::vector<std::size_t> losers;
    for (std::size_t k = 0; k + 1 < n; k += 2) {
      std::size_t w = order[k];
      std::size_t l = order[k + 1];
      if (detail::feasibility_first_better(pts[l], fit[l], pts[w], fit[w])) std::swap(w, l);
      for (std::size_t j = 0; j < d; ++j) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        const double r3 = rng.uniform();
        vel[l][j] = r1 * vel[l][j] + r2 * (xs[w][j] - xs[l][j]) + cfg.cso_phi * r3 * (mean[j] - xs[l][j]);
        xs[l][j] = std::clamp(xs[l][j] + vel[l][j], pr.lo[j], pr.hi[j]);
      }
      losers.push_back(l);
    }
    std::vector<ObjectivePoint> ev(losers.size());
    parallel_for(losers.size(), [&](std::size_t k) { ev[k] = pr.evaluate(xs[losers[k]]); });
    for (std::size_t k = 0; k < losers.size(); ++k) {
      const std::size_t l = losers[k];
      pts[l] = std::move(ev[k]);
      fit[l] = fitness(pts[l]);
      if (detail::feasibility_first_better(pts[l], fit[l], best_point, best_fit)) {
        best_point = pts[l];
        best_fit = fit[l];
      }
    }
  }
  detail::require(best_point.feasible, Errc::NoFeasibleFound, "CSO found no feasible point");
  return best_point;
}

/// Weighted-sum fitness over the coalitions of `cs`.
inline std::function<double(const ObjectivePoint&)> weighted_fitness(const CoalitionStructure& cs,
                                                                    std::vector<double> gamma,
                                                                    std::vector<double> alpha) {
  return [cs, gamma = std::move(gamma), alpha = std::move(alpha)](const ObjectivePoint& p) {
    const auto v = coalition_values(p.agent_values, cs, gamma);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += alpha[i] * v[i];
    return s;
  };
}

/// One CSO run per coalition of `cs` (weight 1-(k-1)eps on the target, eps elsewhere).
inline std::vector<ObjectivePoint> coalition_extremes(const Problem& pr, const CoalitionStructure& cs,
                                                      std::span<const double> gamma, const EvoConfig& cfg,
                                                      std::uint64_t stream_base) {
  std::vector<ObjectivePoint> out;
  const std::size_t k = cs.size();
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<double> alpha(k, cfg.extreme_eps);
    alpha[t] = 1.0 - static_cast<double>(k - 1) * cfg.extreme_eps;
    out.push_back(cso(pr, weighted_fitness(cs, {gamma.begin(), gamma.end()}, alpha), cfg, {}, stream_base + t));
  }
  return out;
}

/// Welfare (unweighted coalition sum) maximizer by CSO.
inline ObjectivePoint welfare_point(const Problem& pr, std::span<const double> gamma, const EvoConfig& cfg,
                                    std::uint64_t stream) {
  const auto grand = CoalitionStructure::grand(pr.n_agents);
  return cso(pr, weighted_fitness(grand, {gamma.begin(), gamma.end()}, {1.0}), cfg, {}, stream);
}

/// Extreme points of every coalition of `cs` followed by the welfare point.
inline std::vector<ObjectivePoint> extreme_point_seeds(const Problem& pr, const CoalitionStructure& cs,
                                                       std::span<const double> gamma, const EvoConfig& cfg,
                                                       std::uint64_t stream_base = 0) {
  detail::require(cs.size() >= 2, Errc::InvalidArgument, "extreme-point seeding needs at least two coalitions");
  auto out = coalition_extremes(pr, cs, gamma, cfg, stream_base);
  out.push_back(welfare_point(pr, gamma, cfg, stream_base + cs.size()));
  return out;
}

namespace detail {

inline void merge_unique(std::vector<ObjectivePoint>& into, std::span<const ObjectivePoint> from) {
  for (const auto& p : from) {
    const bool dup = std::any_of(into.begin(), into.end(), [&](const ObjectivePoint& q) { return q.decision == p.decision; });
    if (!dup) into.push_back(p);
  }
}

// Stream ids: structure index in the high bits, run number below.
inline std::uint64_t stream_id(std::size_t structure, std::size_t run) {
  return (static_cast<std::uint64_t>(structure + 1) << 16) | run;
}

}  // namespace detail

/// Evolutionary computation of all fronts.
///  NonNested: per structure, extreme-point CSO runs and an independent NSGA-II run
///             (the grand coalition is the welfare CSO run alone).
///  TopDown:   extreme points of every structure plus the welfare point, one
///             singleton NSGA-II run seeded with all of them, then restriction.
///  BottomUp:  as TopDown, preceded by short NSGA-II runs coarse-to-fine whose
///             results seed every refinement.
inline StrategyResult run_strategy(const PhysicsModel& model, StrategyKind kind, const EvoConfig& cfg) {
  cfg.validate();
  const auto& s = model.scenario();
  const auto pr = problem_of(model);
  const auto& gamma = s.gamma;
  const AgentSet agents(s.n_agents(), s.agent_labels);
  StrategyResult out;
  out.structures = enumerate_structures(agents);
  const auto& all = out.structures;
  const std::size_t n_cs = all.size();
  const std::size_t single_idx = n_cs - 1;  // enumeration order ends with the singleton structure
  const std::uint64_t start = model.evaluations();

  if (kind == StrategyKind::NonNested) {
    std::uint64_t extreme = 0;
    std::uint64_t moo = 0;
    for (std::size_t i = 0; i < n_cs; ++i) {
      const auto& cs = all[i];
      const auto before = model.evaluations();
      if (cs.size() == 1) {
        auto w = welfare_point(pr, gamma, cfg, detail::stream_id(i, 0));
        ++out.report.extreme_runs_count;
        extreme += model.evaluations() - before;
        out.archives.push_back(ParetoArchive::from_candidates(cs, gamma, std::span<const ObjectivePoint>(&w, 1)));
      } else {
        auto seeds = extreme_point_seeds(pr, cs, gamma, cfg, detail::stream_id(i, 0));
        out.report.extreme_runs_count += seeds.size();
        const auto mid = model.evaluations();
        extreme += mid - before;
        out.archives.push_back(nsga2(pr, cs, gamma, cfg, seeds, detail::stream_id(i, 100)).archive);
        moo += model.evaluations() - mid;
      }
      ++out.report.moo_runs_count;
      out.report.per_structure.emplace_back(cs.key(), model.evaluations() - before);
    }
    out.report.extreme_point_runs = extreme;
    out.report.moo_runs = moo;
    return out;
  }

  // Extreme points of every structure with at least two coalitions, plus one welfare run.
  std::vector<std::vector<ObjectivePoint>> seeds(n_cs);
  std::vector<ObjectivePoint> all_seeds;
  const auto welfare = welfare_point(pr, gamma, cfg, detail::stream_id(0, 0));
  ++out.report.extreme_runs_count;
  seeds[0].push_back(welfare);
  all_seeds.push_back(welfare);
  for (std::size_t i = 1; i < n_cs; ++i) {
    auto ex = coalition_extremes(pr, all[i], gamma, cfg, detail::stream_id(i, 0));
    out.report.extreme_runs_count += ex.size();
    seeds[i] = ex;
    seeds[i].push_back(welfare);
    detail::merge_unique(all_seeds, ex);
  }
  out.report.extreme_point_runs = model.evaluations() - start;
  const auto after_seeds = model.evaluations();

  std::vector<ObjectivePoint> singleton_seeds;
  if (kind == StrategyKind::TopDown) {
    singleton_seeds = all_seeds;
  } else {
    EvoConfig partial = cfg;
    partial.generations = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(cfg.generations) * cfg.partial_fraction)));
    for (std::size_t level = 1; level < s.n_agents(); ++level) {
      for (std::size_t i = 0; i < n_cs; ++i) {
        if (all[i].size() != level) continue;
        const auto before = model.evaluations();
        auto run = nsga2(pr, all[i], gamma, partial, seeds[i], detail::stream_id(i, 100));
        ++out.report.moo_runs_count;
        out.report.per_structure.emplace_back(all[i].key(), model.evaluations() - before);
        for (std::size_t k = 0; k < n_cs; ++k)
          if (k != i && is_refinement(all[k], all[i])) detail::merge_unique(seeds[k], run.archive.points());
      }
    }
    singleton_seeds = seeds[single_idx];
  }

  const auto before_single = model.evaluations();
  auto fine = nsga2(pr, all[single_idx], gamma, cfg, singleton_seeds, detail::stream_id(single_idx, 100)).archive;
  ++out.report.moo_runs_count;
  out.report.per_structure.emplace_back(all[single_idx].key(), model.evaluations() - before_single);
  out.report.moo_runs = model.evaluations() - after_seeds;
  for (const auto& cs : all) out.archives.push_back(restrict_archive(fine, cs));
  return out;
}

}  // namespace cpareto
