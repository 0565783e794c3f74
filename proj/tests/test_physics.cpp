#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace cpareto;

namespace {

Scenario one_well() {
  Scenario s;
  s.name = "one";
  s.agent_labels = {"a1"};
  s.gamma = {1.0};
  s.wells = {{0.0, 0.0, 0, 0}};
  s.n_intervals = 1;
  s.dt_seconds = kSecondsPerYear;
  s.storage = 1e-5;
  s.transmissivity = 1e-3;
  s.q_min = 0.0;
  s.q_max = 1.0;
  s.h_crit = 1e4;
  s.q_vol = 1.0;  // rates in m^3/s
  return s;
}

std::vector<double> random_rates(const Scenario& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(s.q_min, s.q_max);
  std::vector<double> q(s.n_decision());
  for (auto& x : q) x = u(rng);
  return q;
}

}  // namespace

TEST(WellFunction, ReferenceValues) {
  EXPECT_NEAR(well_function(1.0), 0.2193839, 5e-8);
  EXPECT_NEAR(well_function(0.1), 1.8229240, 5e-8);
  EXPECT_LT(well_function(50.0), 1e-23);
  EXPECT_GT(well_function(50.0), 0.0);
  EXPECT_THROW((void)well_function(0.0), Error);
  EXPECT_THROW((void)well_function(-1.0), Error);
}

TEST(WellFunction, MatchesSeriesOracle) {
  for (int i = 0; i < 50; ++i) {
    const double chi = std::pow(10.0, -8.0 + 9.0 * i / 49.0);  // 1e-8 .. 10
    const double ref = oracle::e1_series(chi);
    EXPECT_NEAR(well_function(chi), ref, 1e-10 * std::abs(ref)) << "chi=" << chi;
  }
}

TEST(HeadChange, SingleWellExample) {
  const auto s = one_well();
  const double t = kSecondsPerYear;
  const double chi = 100.0 * 100.0 * 1e-5 / (4.0 * 1e-3 * t);
  EXPECT_NEAR(chi, 7.92e-7, 0.01e-7);
  EXPECT_NEAR(well_function(chi), 13.47, 0.01);
  EXPECT_NEAR(head_change(s, {{0.1}}, 100.0, 0.0, t), 107.2, 0.1);
}

TEST(HeadChange, TelescopingAndZero) {
  auto s = one_well();
  s.n_intervals = 2;
  auto s1 = one_well();
  s1.dt_seconds = 2.0 * kSecondsPerYear;
  const double t = 2.0 * kSecondsPerYear;
  EXPECT_NEAR(head_change(s, {{0.05, 0.05}}, 50.0, 20.0, t), head_change(s1, {{0.05}}, 50.0, 20.0, t), 1e-12);
  EXPECT_EQ(head_change(s, {{0.0, 0.0}}, 50.0, 20.0, t), 0.0);
  EXPECT_THROW((void)head_change(s, {{0.1, 0.1}}, 0.0, 0.0, t), Error);
}

TEST(HeadChange, MatchesIndependentTheisOracle) {
  const auto& s = testsupport::scenario("test_case_1.json");
  std::mt19937_64 rng(21);
  std::vector<oracle::TheisWell> wells;
  for (const auto& w : s.wells) wells.push_back({w.x, w.y});
  for (int trial = 0; trial < 10; ++trial) {
    const auto rates = s.expand_rates(random_rates(s, rng));
    std::vector<oracle::Vec> m3s(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k)
      for (double r : rates[k]) m3s[k].push_back(r * s.q_vol);
    const double t = (1.0 + trial % s.n_intervals) * s.dt_seconds;
    const double x = 3000.0 + 100.0 * trial, y = 4100.0;
    const double ref = oracle::theis_head(wells, m3s, s.dt_seconds, s.storage, s.transmissivity, x, y, t, s.r_well);
    EXPECT_NEAR(head_change(s, rates, x, y, t), ref, 1e-9 * std::abs(ref));
  }
}

TEST(HeadChange, Linearity) {
  const auto& s = testsupport::scenario("test_case_1.json");
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto q1 = random_rates(s, rng);
    const auto q2 = random_rates(s, rng);
    const double alpha = 0.37 + trial;
    std::vector<double> mix(q1.size());
    for (std::size_t i = 0; i < q1.size(); ++i) mix[i] = alpha * q1[i] + q2[i];
    const double t = 7.5 * s.dt_seconds;
    auto h = [&](const std::vector<double>& q) { return head_change(s, s.expand_rates(q), 1234.0, 987.0, t); };
    const double lhs = h(mix);
    EXPECT_NEAR(lhs, alpha * h(q1) + h(q2), 1e-10 * std::abs(lhs));
  }
}

TEST(Assemble, Dimensions) {
  const auto sys = assemble_linear(testsupport::scenario("test_case_1.json"));
  EXPECT_EQ(sys.B.rows(), 30u);
  EXPECT_EQ(sys.B.cols(), 30u);
  for (double v : sys.b) EXPECT_EQ(v, 1e4);
  auto s = one_well();
  s.r_well = 0.3;
  s.q_vol = 2.0;
  const auto one = assemble_linear(s);
  ASSERT_EQ(one.B.rows(), 1u);
  const double chi = 0.09 * 1e-5 / (4.0 * 1e-3 * kSecondsPerYear);
  EXPECT_NEAR(one.B(0, 0), 2.0 * oracle::e1_series(chi) / (4.0 * M_PI * 1e-3), 1e-10 * one.B(0, 0));
}

TEST(Assemble, MatrixProductMatchesDirectEvaluation) {
  for (const char* name : {"test_case_1.json", "test_case_2.json"}) {
    auto s = testsupport::scenario(name);
    // Exercise start offsets as well.
    for (int variant = 0; variant < 2; ++variant) {
      if (variant == 1) s.wells[1].start_offset = 2;
      const auto sys = assemble_linear(s);
      std::mt19937_64 rng(29);
      double worst = 0;
      for (int trial = 0; trial < 20; ++trial) {
        const auto q = random_rates(s, rng);
        const auto bq = sys.B.multiply(q);
        const auto rates = s.expand_rates(q);
        for (std::size_t i = 1; i <= s.n_intervals; ++i)
          for (std::size_t j = 0; j < s.wells.size(); ++j) {
            const double direct = representative_head(s, rates, j, static_cast<double>(i) * s.dt_seconds);
            worst = std::max(worst, std::abs(bq[(i - 1) * s.wells.size() + j] - direct) / std::abs(direct));
          }
      }
      EXPECT_LE(worst, 1e-8) << name << " variant " << variant;
    }
  }
}

TEST(Assemble, FinalIntervalRaiseNeverLowersHeads) {
  const auto& s = testsupport::scenario("test_case_1.json");
  const auto sys = assemble_linear(s);
  std::mt19937_64 rng(31);
  const auto q = random_rates(s, rng);
  const auto base = sys.B.multiply(q);
  for (std::size_t w = 0; w < s.wells.size(); ++w) {
    auto up = q;
    up[w * s.n_intervals + s.n_intervals - 1] += 1.0;
    const auto after = sys.B.multiply(up);
    for (std::size_t r = 0; r < base.size(); ++r) EXPECT_GE(after[r], base[r] - 1e-9);
  }
}

TEST(Constraints, LinearExamples) {
  PhysicsModel m(testsupport::scenario("test_case_1.json"));
  const auto& s = m.scenario();
  std::vector<double> q(s.n_decision(), s.q_min);
  const auto rep = m.evaluate_constraints(q);
  EXPECT_EQ(rep.max_violation, 0.0);
  EXPECT_EQ(rep.violations.size(), 30u);
  q[4] = s.q_max + 1.0;
  EXPECT_GT(m.evaluate_constraints(q).max_violation, 0.0);
  EXPECT_THROW((void)m.evaluate_constraints(std::vector<double>(5, 40.0)), Error);
}

TEST(Constraints, ProxyZeroRatesViolateOnlyTheBound) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  const std::vector<double> zero(m.scenario().n_decision(), 0.0);
  for (double g : m.constraint_values(zero)) EXPECT_EQ(g, 0.0);
  const auto rep = m.evaluate_constraints(zero);
  for (double v : rep.violations) EXPECT_EQ(v, 0.0);
  EXPECT_GT(rep.max_violation, 0.0);
  const std::vector<double> qmin(m.scenario().n_decision(), m.scenario().q_min);
  EXPECT_EQ(m.evaluate_constraints(qmin).max_violation, 0.0);
}

TEST(Constraints, ProxyFormula) {
  const auto& s = testsupport::scenario("proxy_3well.json");
  std::mt19937_64 rng(37);
  const auto q = random_rates(s, rng);
  const auto g = proxy_constraint_values(s, s.interference_matrix(), q);
  const auto rates = s.expand_rates(q);
  for (std::size_t n = 0; n < s.n_intervals; ++n) {
    double total = 0;
    for (std::size_t k = 0; k < 3; ++k) total += rates[k][n];
    for (std::size_t j = 0; j < 3; ++j) {
      double v = s.proxy.kappa * std::pow(total, s.proxy.exponent);
      for (std::size_t k = 0; k < 3; ++k)
        v += rates[k][n] / (1.0 + std::hypot(s.wells[j].x - s.wells[k].x, s.wells[j].y - s.wells[k].y) /
                                      s.proxy.length_scale);
      for (const auto& c : s.proxy.couplings)
        if (c.well_a == j || c.well_b == j) v += c.coefficient * rates[c.well_a][n] * rates[c.well_b][n];
      EXPECT_NEAR(g[n * 3 + j], v, 1e-12 * v);
    }
  }
}

TEST(Objectives, Examples) {
  auto s = one_well();
  s.q_max = 200.0;
  s.n_intervals = 10;
  s.q_vol = 1e6 / kSecondsPerYear;
  EXPECT_NEAR(agent_objectives(s, std::vector<double>(10, 89.1))[0], 891.0, 1e-9);
  EXPECT_EQ(agent_objectives(s, std::vector<double>(10, 0.0))[0], 0.0);
  const auto& tc = testsupport::scenario("test_case_1.json");
  std::mt19937_64 rng(41);
  const auto q1 = random_rates(tc, rng);
  const auto f = agent_objectives(tc, q1);
  for (std::size_t a = 0; a < 3; ++a) {
    double sum = 0;
    for (std::size_t n = 0; n < 10; ++n) sum += q1[a * 10 + n];
    EXPECT_NEAR(f[a], sum, 1e-9);
  }
}

TEST(Objectives, StartOffsetsRemoveEarlyIntervals) {
  const auto& s = testsupport::scenario("proxy_9well.json");
  EXPECT_EQ(s.n_decision(), 70u);
  const std::vector<double> q(70, 1.0);
  const auto f = agent_objectives(s, q);
  // Agent 1 owns 4 wells, two of them starting one interval late.
  EXPECT_NEAR(f[0], (4.0 * 8.0 - 2.0) * s.dt_years(), 1e-9);
}

TEST(Symmetry, TestCaseTwoReflection) {
  // Wells at (2500,2500),(2500,5000),(5000,2500),(5000,5000): swapping x and y
  // exchanges wells 2 and 3 and leaves the constraint set invariant.
  const auto& s = testsupport::scenario("test_case_2.json");
  const auto sys = assemble_linear(s);
  std::mt19937_64 rng(43);
  const auto q = random_rates(s, rng);
  auto swapped = q;
  for (std::size_t n = 0; n < s.n_intervals; ++n) std::swap(swapped[1 * s.n_intervals + n], swapped[2 * s.n_intervals + n]);
  const auto f = agent_objectives(s, q);
  const auto fs = agent_objectives(s, swapped);
  EXPECT_NEAR(f[1], fs[2], 1e-12);
  EXPECT_NEAR(f[2], fs[1], 1e-12);
  const auto g = sys.B.multiply(q);
  const auto gs = sys.B.multiply(swapped);
  for (std::size_t i = 0; i < s.n_intervals; ++i) {
    EXPECT_NEAR(g[i * 4 + 0], gs[i * 4 + 0], 1e-9 * g[i * 4]);
    EXPECT_NEAR(g[i * 4 + 1], gs[i * 4 + 2], 1e-9 * g[i * 4 + 1]);
    EXPECT_NEAR(g[i * 4 + 3], gs[i * 4 + 3], 1e-9 * g[i * 4 + 3]);
  }
}

TEST(Model, CountsEveryEvaluation) {
  PhysicsModel m(testsupport::scenario("proxy_3well.json"));
  const std::vector<double> q(m.scenario().n_decision(), 1.0);
  for (int i = 0; i < 7; ++i) (void)m.evaluate(q);
  (void)m.evaluate_constraints(q);
  EXPECT_EQ(m.evaluations(), 7u);
}
