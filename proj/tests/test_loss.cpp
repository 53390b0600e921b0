// Copyright 2026 The sbqudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sbq/loss.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sbq;

namespace {

// Explicit 64-term enumeration over (photon 0 party, photon 1 party).
double enumerate_success(const std::vector<double>& p) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i != j) s += (1.0 / 64.0) * (1.0 - p[static_cast<std::size_t>(i)]) * (1.0 - p[static_cast<std::size_t>(8 + j)]);
  return s;
}

// Distance from uniformity computed straight from the 56 pattern weights.
double enumerate_distance(const std::vector<double>& p) {
  std::vector<double> w;
  double total = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i != j) {
        w.push_back((1.0 - p[static_cast<std::size_t>(i)]) * (1.0 - p[static_cast<std::size_t>(8 + j)]));
        total += w.back();
      }
  double d = 0.0;
  for (double x : w) d += (x / total - 1.0 / 56.0) * (x / total - 1.0 / 56.0);
  return d;
}

std::vector<double> flat(double p) { return std::vector<double>(kLossModes, p); }

}  // namespace

TEST(CavityBudget, HighQInternal) {
  const CavityBudget b = cavity_budget(CavityParams{});
  EXPECT_NEAR(b.loss_fraction, 0.0189, 5e-4);
  EXPECT_NEAR(b.success_fraction, 0.981, 5e-4);
  EXPECT_NEAR(b.success_db, 0.08, 5e-3);
  EXPECT_NEAR(b.kappa_internal_mhz, 0.02841, 1e-12);
  EXPECT_NEAR(b.kappa_coupling_mhz, 2.841, 1e-12);
  EXPECT_NEAR(b.loss_fraction + b.success_fraction, 1.0, 1e-12);
}

TEST(CavityBudget, LowQInternal) {
  CavityParams c;
  c.q_internal = 1e5;
  const CavityBudget b = cavity_budget(c);
  EXPECT_NEAR(b.loss_fraction, 0.150, 2e-3);
  EXPECT_NEAR(b.success_fraction, 0.845, 5e-3);
  EXPECT_NEAR(b.success_db, 0.7, 0.02);
  RecordProperty("loss_fraction_q1e5", std::to_string(b.loss_fraction));
}

TEST(CavityBudget, ClosedFormOracle) {
  RandomStream rng(4);
  for (int k = 0; k < 200; ++k) {
    CavityParams c;
    c.q_internal = std::pow(10.0, 3.0 + 4.0 * rng.uniform());
    c.q_coupling = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
    c.g_mhz = 0.5 + 10.0 * rng.uniform();
    const CavityBudget b = cavity_budget(c);
    const double ki = 28410.0 / c.q_internal, kc = 28410.0 / c.q_coupling;
    const double gb = 1.0 / (1.0 / c.g_mhz + 1.0 / ki), gp = 1.0 / (1.0 / c.g_mhz + 1.0 / kc);
    EXPECT_NEAR(b.loss_fraction, gb / (gb + gp), 1e-12);
    EXPECT_NEAR(b.loss_fraction + b.success_fraction, 1.0, 1e-12);
    EXPECT_GT(b.gamma_bath_mhz, 0.0);
    EXPECT_GT(b.gamma_port_mhz, 0.0);
  }
}

TEST(CavityBudget, LossVanishesAsQInternalGrows) {
  double prev = 1.0;
  for (double q = 1e3; q <= 1e12; q *= 10.0) {
    CavityParams c;
    c.q_internal = q;
    const double loss = cavity_budget(c).loss_fraction;
    EXPECT_LT(loss, prev);
    prev = loss;
  }
  EXPECT_LT(prev, 1e-7);
  for (double qc : {1e3, 1e4, 1e5}) {
    CavityParams c;
    c.q_internal = 1e15;
    c.q_coupling = qc;
    EXPECT_LT(cavity_budget(c).loss_fraction, 1e-6);
  }
}

TEST(CavityBudget, Validation) {
  CavityParams c;
  c.q_coupling = 0.0;
  try {
    cavity_budget(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "cavity.q_coupling");
  }
  c = CavityParams{};
  c.omega_c_ghz = -1.0;
  EXPECT_THROW(cavity_budget(c), ValidationError);
}

TEST(Analytic, LosslessUpperBound) { EXPECT_NEAR(analytic_success_under_loss(LossModel::uniform(0.0)), 0.875, 1e-15); }

TEST(Analytic, UniformFivePercent) {
  EXPECT_NEAR(analytic_success_under_loss(LossModel::uniform(0.05)), 0.7896875, 1e-12);
}

TEST(Analytic, GridMatchesClosedForm) {
  for (double p : default_loss_grid())
    EXPECT_NEAR(analytic_success_under_loss(LossModel::uniform(p)), 0.875 * (1 - p) * (1 - p), 1e-12);
  EXPECT_EQ(default_loss_grid().size(), 10u);
}

TEST(Analytic, SingleLossyMode) {
  std::vector<double> p(16, 0.0);
  p[0] = 0.1;
  EXPECT_NEAR(analytic_success_under_loss(p), 55.3 / 64.0, 1e-12);
  EXPECT_NEAR(analytic_success_under_loss(p), enumerate_success(p), 1e-15);
  const PatternReport r = analytic_pattern_report(p);
  EXPECT_NEAR(r.success_mass, 55.3 / 64.0, 1e-12);
  EXPECT_NEAR(distance_from_uniformity(r), enumerate_distance(p), 1e-15);
  EXPECT_NEAR(distance_from_uniformity(r), 2.0e-5, 1e-7);
}

TEST(Analytic, OnePartyLossyForBothPhotons) {
  std::vector<double> p(16, 0.0);
  p[0] = p[8] = 0.1;
  EXPECT_NEAR(analytic_success_under_loss(p), 54.6 / 64.0, 1e-12);
  EXPECT_NEAR(analytic_success_under_loss(p), 0.853125, 1e-12);
  const double d = distance_from_uniformity(analytic_pattern_report(p));
  EXPECT_NEAR(d, enumerate_distance(p), 1e-15);
  EXPECT_NEAR(d, 3.5e-5, 1e-6);
}

TEST(Analytic, MatchesOracleOnRandomModels) {
  RandomStream rng(21);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> p(16);
    for (auto& x : p) x = rng.uniform();
    EXPECT_NEAR(analytic_success_under_loss(p), enumerate_success(p), 1e-14);
    const PatternReport r = analytic_pattern_report(p);
    EXPECT_NEAR(r.success_mass, enumerate_success(p), 1e-14);
    EXPECT_NEAR(distance_from_uniformity(r), enumerate_distance(p), 1e-14);
    double total = 0.0;
    for (const auto& [pat, v] : r.patterns) total += v;
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(Analytic, DecreasingInEveryMode) {
  RandomStream rng(22);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> p(16);
    for (auto& x : p) x = 0.5 * rng.uniform();
    const double base = analytic_success_under_loss(p);
    const auto m = static_cast<std::size_t>(rng.below(16));
    p[m] += 0.1;
    EXPECT_LT(analytic_success_under_loss(p), base);
  }
}

TEST(Analytic, WrongModeCount) {
  EXPECT_THROW(analytic_success_under_loss(std::vector<double>(8, 0.0)), ValidationError);
  EXPECT_THROW(analytic_success_under_loss(LossModel::explicit_modes(std::vector<double>(15, 0.0))), ValidationError);
}

TEST(Analytic, UniformIsExactlyUniform) {
  for (double p : default_loss_grid()) EXPECT_LE(distance_from_uniformity(analytic_pattern_report(flat(p))), 1e-12);
}

TEST(Models, ValidationAndResolution) {
  EXPECT_THROW(validate(LossModel::uniform(1.2)), ValidationError);
  EXPECT_THROW(validate(LossModel::interval(0.2, 0.1)), ValidationError);
  EXPECT_THROW(validate(LossModel::normal_per_mode(0.05, -1.0)), ValidationError);
  EXPECT_THROW(loss_kind_from_string("gauss"), ValidationError);
  EXPECT_EQ(loss_kind_from_string("interval"), LossModel::Kind::IntervalRandom);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (double x : resolve(LossModel::normal_per_mode(0.001, 0.05), seed)) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    for (double x : resolve(LossModel::interval(0.02, 0.07), seed)) {
      EXPECT_GE(x, 0.02);
      EXPECT_LE(x, 0.07);
    }
  }
  EXPECT_EQ(resolve(LossModel::normal_per_mode(0.05), 3), resolve(LossModel::normal_per_mode(0.05), 3));
  EXPECT_NE(resolve(LossModel::normal_per_mode(0.05), 3), resolve(LossModel::normal_per_mode(0.05), 4));
}

TEST(MonteCarlo, UniformFivePercent) {
  const MonteCarloResult r = monte_carlo_success(LossModel::uniform(0.05), 1000000, 20260101);
  EXPECT_NEAR(r.rate, 0.7896875, 0.003);
  EXPECT_NEAR(r.rate, 0.7896875, 3.0 * r.stderr_);
  EXPECT_LE(r.stderr_, std::sqrt(0.25 / 1e6));
  EXPECT_EQ(r.trials, 1000000u);
}

TEST(MonteCarlo, TotalLossGivesZero) {
  const MonteCarloResult r = monte_carlo_success(flat(1.0), 10000, 1);
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_EQ(r.successes, 0u);
  EXPECT_THROW(distance_from_uniformity(r.report), ModelError);
}

TEST(MonteCarlo, SameSeedSameReport) {
  const MonteCarloResult a = monte_carlo_success(flat(0.03), 200000, 55);
  const MonteCarloResult b = monte_carlo_success(flat(0.03), 200000, 55);
  EXPECT_EQ(a.report.csv(), b.report.csv());
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.report.patterns, b.report.patterns);
}

TEST(MonteCarlo, ThreadCountIndependent) {
  const MonteCarloResult one = monte_carlo_success(flat(0.07), 100003, 56, 1);
  for (unsigned t : {2u, 3u, 7u}) {
    const MonteCarloResult many = monte_carlo_success(flat(0.07), 100003, 56, t);
    EXPECT_EQ(one.successes, many.successes);
    EXPECT_EQ(one.report.patterns, many.report.patterns);
  }
}

TEST(MonteCarlo, EstimatorConsistencyOverSeeds) {
  const double p = 0.05, want = 0.875 * (1 - p) * (1 - p);
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const MonteCarloResult r = monte_carlo_success(flat(p), 100000, seed, 1);
    inside += std::abs(r.rate - want) <= 4.0 * std::sqrt(r.rate * (1 - r.rate) / 1e5);
  }
  EXPECT_GE(inside, 99);
}

TEST(MonteCarlo, UniformLossPatternsAreSymmetric) {
  const MonteCarloResult r = monte_carlo_success(flat(0.04), 1000000, 8);
  ASSERT_EQ(r.report.normalized.size(), 56u);
  const double q = 1.0 / 56.0;
  const double se = std::sqrt(q * (1 - q) / static_cast<double>(r.successes));
  for (const auto& [pat, v] : r.report.normalized) EXPECT_NEAR(v, q, 4.5 * se) << PatternReport::pattern_string(pat);
}

TEST(MonteCarlo, NormalPerModeMatchesResolvedAnalytic) {
  for (double p : {0.02, 0.06, 0.1}) {
    const LossModel m = LossModel::normal_per_mode(p);
    const MonteCarloResult r = monte_carlo_success(m, 1000000, 91);
    EXPECT_NEAR(r.rate, analytic_success_under_loss(m, 91), 3.0 * r.stderr_);
  }
}

TEST(Sweep, UniformAnalyticColumn) {
  const SweepTable t = loss_sweep(LossModel::Kind::Uniform, default_loss_grid(), 20000, 3);
  ASSERT_EQ(t.rows.size(), 10u);
  for (const auto& r : t.rows) {
    EXPECT_NEAR(r.analytic_rate, 0.875 * (1 - r.param) * (1 - r.param), 1e-12);
    EXPECT_LE(r.distance, 1e-12);
    EXPECT_EQ(r.trials, 20000u);
    EXPECT_EQ(r.seed, 3u);
  }
}

TEST(Sweep, ZeroWidthIntervalEqualsUniform) {
  const std::vector<double> grid{0.0};
  const SweepTable a = loss_sweep(LossModel::Kind::IntervalRandom, grid, 50000, 5);
  const SweepTable b = loss_sweep(LossModel::Kind::Uniform, grid, 50000, 5);
  EXPECT_EQ(a.rows[0].analytic_rate, b.rows[0].analytic_rate);
  EXPECT_EQ(a.rows[0].mc_rate, b.rows[0].mc_rate);
  EXPECT_EQ(a.rows[0].distance, b.rows[0].distance);
  const auto lo = resolve(LossModel::interval(0.04, 0.04), 9);
  EXPECT_EQ(lo, flat(0.04));
}

TEST(Sweep, IntervalDistanceTrendsUp) {
  std::vector<double> mean;
  for (double w : default_loss_grid()) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const double d = distance_from_uniformity(analytic_pattern_report(resolve(LossModel::interval(0.0, w), seed)));
      EXPECT_GE(d, 0.0);
      s += d;
    }
    mean.push_back(s / 100.0);
  }
  for (std::size_t k = 1; k < mean.size(); ++k) EXPECT_GT(mean[k], mean[k - 1]);
}

TEST(Sweep, CsvSchemaAndDeterminism) {
  const SweepTable t = loss_sweep(LossModel::Kind::NormalPerMode, {0.01, 0.02}, 10000, 12);
  const std::string csv = t.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "param,analytic_rate,mc_rate,mc_stderr,distance_from_uniformity,trials,seed");
  EXPECT_EQ(csv, loss_sweep(LossModel::Kind::NormalPerMode, {0.01, 0.02}, 10000, 12).csv());
  const std::string wide = t.csv(true);
  EXPECT_EQ(wide.substr(0, wide.find('\n')),
            "param,analytic_rate,mc_rate,mc_stderr,distance_from_uniformity,trials,seed,analytic_normalized,mc_normalized");
  EXPECT_THROW(loss_sweep(LossModel::Kind::Uniform, {}, 10, 1), ValidationError);
}
