#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace cpareto;

namespace {

// maximize (q1, q2) on [0,1]^2 subject to q1 + q2 <= 1.
Problem budget_toy() {
  Problem p;
  p.lo = {0.0, 0.0};
  p.hi = {1.0, 1.0};
  p.n_agents = 2;
  p.evaluate = [](std::span<const double> q) {
    ObjectivePoint o;
    o.decision.assign(q.begin(), q.end());
    o.agent_values = o.decision;
    o.max_constraint_violation = std::max(0.0, q[0] + q[1] - 1.0);
    o.feasible = o.max_constraint_violation == 0.0;
    return o;
  };
  return p;
}

Problem box(std::size_t n) {
  Problem p;
  p.lo.assign(n, 0.0);
  p.hi.assign(n, 1.0);
  p.n_agents = 1;
  p.evaluate = [](std::span<const double> q) {
    ObjectivePoint o;
    o.decision.assign(q.begin(), q.end());
    o.agent_values = {0.0};
    return o;
  };
  return p;
}

EvoConfig small(std::uint64_t seed = 1) {
  EvoConfig c;
  c.population = 100;
  c.generations = 100;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Nsga2, ToyFrontCoverage) {
  const auto pr = budget_toy();
  const std::vector<double> gamma{1, 1};
  const auto res = nsga2(pr, CoalitionStructure::singletons(2), gamma, small());
  ASSERT_GT(res.archive.size(), 10u);
  std::size_t close = 0;
  for (const auto& p : res.archive.points()) {
    EXPECT_TRUE(p.feasible);
    if (std::abs(p.decision[0] + p.decision[1] - 1.0) <= 0.02) ++close;
  }
  EXPECT_GE(static_cast<double>(close), 0.95 * static_cast<double>(res.archive.size()));
  EXPECT_TRUE(res.archive.mutually_non_dominated());
}

TEST(Nsga2, SeedSurvives) {
  const auto pr = budget_toy();
  const std::vector<double> gamma{1, 1};
  const std::vector<double> corner{1.0, 0.0};
  const std::vector<ObjectivePoint> seeds{pr.evaluate(corner)};
  const auto res = nsga2(pr, CoalitionStructure::singletons(2), gamma, small(), seeds);
  EXPECT_TRUE(std::any_of(res.archive.points().begin(), res.archive.points().end(),
                          [&](const ObjectivePoint& p) { return p.decision == corner; }));
}

TEST(Nsga2, DeterministicPerSeed) {
  const auto pr = budget_toy();
  const std::vector<double> gamma{1, 1};
  const auto a = nsga2(pr, CoalitionStructure::singletons(2), gamma, small(4));
  const auto b = nsga2(pr, CoalitionStructure::singletons(2), gamma, small(4));
  const auto c = nsga2(pr, CoalitionStructure::singletons(2), gamma, small(5));
  EXPECT_EQ(a.archive.points(), b.archive.points());
  EXPECT_NE(a.archive.points(), c.archive.points());
}

TEST(Nsga2, BestTotalNeverDecreases) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  const auto pr = problem_of(m);
  auto cfg = small();
  cfg.generations = 40;
  const auto res = nsga2(pr, CoalitionStructure::singletons(3), m.scenario().gamma, cfg);
  ASSERT_EQ(res.best_total_trace.size(), cfg.generations + 1);
  for (std::size_t i = 1; i < res.best_total_trace.size(); ++i)
    EXPECT_GE(res.best_total_trace[i], res.best_total_trace[i - 1]);
}

TEST(Nsga2, ReportsNoFeasiblePoint) {
  auto pr = budget_toy();
  pr.lo = {0.8, 0.8};
  try {
    (void)nsga2(pr, CoalitionStructure::singletons(2), std::vector<double>{1, 1}, small());
    FAIL() << "expected NoFeasibleFound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoFeasibleFound);
  }
}

TEST(Nsga2, RejectsBadConfig) {
  auto cfg = small();
  cfg.population = 7;
  EXPECT_THROW((void)nsga2(budget_toy(), CoalitionStructure::singletons(2), std::vector<double>{1, 1}, cfg), Error);
}

TEST(Cso, QuadraticOptimum) {
  auto cfg = small();
  cfg.population = 50;
  const auto best = cso(box(1), [](const ObjectivePoint& p) { return -(p.decision[0] - 0.3) * (p.decision[0] - 0.3); }, cfg);
  EXPECT_LE(std::abs(best.decision[0] - 0.3), 0.01);
}

TEST(Cso, ConstrainedLinearOptimum) {
  const auto best = cso(budget_toy(), [](const ObjectivePoint& p) { return p.decision[0] + p.decision[1]; }, small());
  EXPECT_TRUE(best.feasible);
  EXPECT_GE(best.decision[0] + best.decision[1], 0.99);
}

TEST(Cso, SeededOptimumIsKept) {
  const auto pr = box(3);
  const std::vector<double> opt{0.3, 0.3, 0.3};
  auto fit = [](const ObjectivePoint& p) {
    double s = 0;
    for (double x : p.decision) s -= (x - 0.3) * (x - 0.3);
    return s;
  };
  auto cfg = small();
  cfg.generations = 5;
  const std::vector<ObjectivePoint> seeds{pr.evaluate(opt)};
  const auto best = cso(pr, fit, cfg, seeds);
  EXPECT_EQ(fit(best), 0.0);
}

TEST(ExtremeSeeds, CountAndDominance) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  const auto pr = problem_of(m);
  const auto cs = testsupport::cs("{1,2}|{3}", 3);
  const auto& gamma = m.scenario().gamma;
  auto cfg = small();
  cfg.generations = 30;
  const auto seeds = extreme_point_seeds(pr, cs, gamma, cfg);
  ASSERT_EQ(seeds.size(), 3u);
  for (const auto& s : seeds) EXPECT_TRUE(s.feasible);
  EXPECT_THROW((void)extreme_point_seeds(pr, CoalitionStructure::grand(3), gamma, cfg), Error);
}

TEST(ExtremeSeeds, LinearAgentExtremeBoundedByLpOptimum) {
  PhysicsModel m(testsupport::scenario("test_case_1.json"));
  const auto pr = problem_of(m);
  const auto single = CoalitionStructure::singletons(3);
  const auto seeds = extreme_point_seeds(pr, single, m.scenario().gamma, small());
  const auto lp = lp_extreme_points(m, single);
  for (std::size_t a = 0; a < 3; ++a) {
    EXPECT_LE(seeds[a].agent_values[a], lp[a].agent_values[a] * (1 + 1e-9));
    for (std::size_t b = 0; b < 3; ++b)
      if (b != a) EXPECT_GT(seeds[a].agent_values[a], seeds[b].agent_values[a]);
  }
}

TEST(Strategy, NonNestedRunsOnePerStructure) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  auto cfg = small();
  cfg.generations = 20;
  const auto r = run_strategy(m, StrategyKind::NonNested, cfg);
  EXPECT_EQ(r.report.moo_runs_count, 5u);
  EXPECT_EQ(r.report.per_structure.size(), 5u);
  EXPECT_EQ(r.report.total(), m.evaluations());
  EXPECT_EQ(r.report.postprocessing, 0u);
  EXPECT_EQ(r.archive_for(CoalitionStructure::grand(3)).size(), 1u);
}

TEST(Strategy, TopDownRestrictsTheSingletonArchive) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  auto cfg = small();
  cfg.generations = 30;
  const auto r = run_strategy(m, StrategyKind::TopDown, cfg);
  EXPECT_EQ(r.report.total(), m.evaluations());
  EXPECT_EQ(r.report.moo_runs_count, 1u);
  const auto& single = r.archive_for(CoalitionStructure::singletons(3));
  for (std::size_t i = 0; i < r.structures.size(); ++i) {
    for (const auto& p : r.archives[i].points()) {
      EXPECT_TRUE(p.feasible);
      EXPECT_TRUE(std::any_of(single.points().begin(), single.points().end(),
                              [&](const ObjectivePoint& q) { return q.decision == p.decision; }));
    }
    // Nesting is exact for every refinement pair.
    for (std::size_t f = 0; f < r.structures.size(); ++f) {
      if (!is_refinement(r.structures[f], r.structures[i])) continue;
      for (const auto& p : r.archives[i].points())
        EXPECT_TRUE(std::any_of(r.archives[f].points().begin(), r.archives[f].points().end(),
                                [&](const ObjectivePoint& q) { return q.decision == p.decision; }));
    }
  }
}

TEST(Strategy, BottomUpIsDeterministicAndFeasible) {
  auto cfg = small(3);
  cfg.generations = 20;
  PhysicsModel m1(testsupport::scenario("proxy_3well.json"));
  PhysicsModel m2(testsupport::scenario("proxy_3well.json"));
  const auto a = run_strategy(m1, StrategyKind::BottomUp, cfg);
  const auto b = run_strategy(m2, StrategyKind::BottomUp, cfg);
  ASSERT_EQ(a.archives.size(), b.archives.size());
  for (std::size_t i = 0; i < a.archives.size(); ++i) EXPECT_EQ(a.archives[i].points(), b.archives[i].points());
  EXPECT_EQ(a.report.total(), m1.evaluations());
  EXPECT_EQ(a.report.moo_runs_count, 5u);  // grand, three pairs, singletons
}

TEST(Strategy, ThreadCountDoesNotChangeResults) {
  auto cfg = small(2);
  cfg.generations = 15;
  PhysicsModel m1(testsupport::scenario("proxy_3well.json"));
  setenv("CPARETO_THREADS", "1", 1);
  const auto a = run_strategy(m1, StrategyKind::TopDown, cfg);
  setenv("CPARETO_THREADS", "4", 1);
  PhysicsModel m2(testsupport::scenario("proxy_3well.json"));
  const auto b = run_strategy(m2, StrategyKind::TopDown, cfg);
  unsetenv("CPARETO_THREADS");
  for (std::size_t i = 0; i < a.archives.size(); ++i) EXPECT_EQ(a.archives[i].points(), b.archives[i].points());
}

TEST(Proxy, FrontIsNotConvex) {
  // A point dominated by a convex combination of two feasible points can never
  // maximize a positive weighted sum, so a weighted-sum sweep cannot find it.
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  const auto r = run_strategy(m, StrategyKind::TopDown, small());
  const auto& ar = r.archive_for(CoalitionStructure::singletons(3));
  const auto& o = ar.objectives();
  bool found = false;
  for (std::size_t x = 0; x < o.size() && !found; ++x)
    for (std::size_t y = 0; y < o.size() && !found; ++y)
      for (std::size_t z = y + 1; z < o.size() && !found; ++z) {
        if (x == y || x == z) continue;
        for (int k = 1; k < 20 && !found; ++k) {
          const double l = k / 20.0;
          std::vector<double> mix(3);
          for (int i = 0; i < 3; ++i) mix[i] = l * o[y][i] + (1 - l) * o[z][i];
          found = oracle::dominates(mix, o[x]);
        }
      }
  EXPECT_TRUE(found);
}
