#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "readout/benchmark.hpp"
#include "readout/errors.hpp"
#include "support.hpp"

using namespace readout;
using namespace readout::testing;

namespace {

// Synthetic optimum for every qubit of the device, no optimizer run needed.
OptimizationResult synthetic_result(const DeviceGraph& g, double snr, double relaxation, double coupling = 0.0) {
  OptimizationResult r;
  std::size_t k = 0;
  for (const auto& id : g.ids()) {
    QubitResult q;
    q.id = id;
    q.breakdown.snr = snr + 0.5 * static_cast<double>(k % 3);
    q.breakdown.separation = 0.5 * std::erfc(std::sqrt(q.breakdown.snr) / 2.0);
    q.breakdown.relaxation = relaxation;
    q.breakdown.coupling = coupling;
    q.traversal_index = k++;
    r.qubits.push_back(q);
  }
  return r;
}

BenchmarkConfig small_cfg(std::uint64_t seed = 5) {
  BenchmarkConfig c;
  c.n_states = 24;
  c.n_shots = 300;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(ShotModel, MonteCarloMatchesExpectedFlips) {
  const ShotModel m{9.0, 0.03, 0.05, 0.01};
  const auto p = expected_flip_probabilities(m);
  std::mt19937_64 rng(17);
  const int n = 400000;
  std::array<int, 2> wrong{};
  for (int prepared = 0; prepared < 2; ++prepared)
    for (int k = 0; k < n; ++k)
      if (sample_shot(m, prepared != 0, rng) != (prepared != 0)) ++wrong[prepared];
  for (int s = 0; s < 2; ++s) {
    const double sigma = std::sqrt(p[s] * (1.0 - p[s]) / n);
    EXPECT_NEAR(wrong[s] / double(n), p[s], 4.0 * sigma) << "prepared " << s;
  }
}

TEST(ShotModel, SeparationOnlyIsHalfErfc) {
  const ShotModel m{4.0, 0.0, 0.0, 0.0};
  const auto p = expected_flip_probabilities(m);
  EXPECT_DOUBLE_EQ(p[0], 0.5 * std::erfc(1.0));
  EXPECT_DOUBLE_EQ(p[1], p[0]);
}

TEST(ShotModel, SaturatedCouplingIsCoinFlip) {
  const auto p = expected_flip_probabilities(ShotModel{25.0, 0.2, 3.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(MeasurementError, AveragesBothStatesAndNeedsBoth) {
  QubitTally t;
  t.shots = {100, 200};
  t.wrong = {3, 10};
  EXPECT_DOUBLE_EQ(measurement_error(t), 0.5 * (0.03 + 0.05));
  t.shots[1] = 0;
  t.wrong[1] = 0;
  EXPECT_THROW(measurement_error(t), DomainError);
}

TEST(ShotTallies, AddStateEqualsRepeatedShotsAndMergeAdds) {
  const std::vector<std::uint8_t> prepared = {1, 0, 1};
  ShotTallies a(3), b(3);
  std::vector<std::uint64_t> ones = {0, 0, 0};
  std::mt19937_64 rng(2);
  for (int s = 0; s < 50; ++s) {
    std::vector<std::uint8_t> m(3);
    for (std::size_t i = 0; i < 3; ++i) {
      m[i] = static_cast<std::uint8_t>(rng() & 1u);
      ones[i] += m[i];
    }
    a.add_shot(prepared, m);
  }
  b.add_state(prepared, ones, 50);
  EXPECT_EQ(a, b);

  ShotTallies c(3);
  c.merge(a);
  c.merge(b);
  EXPECT_EQ(c.qubit(1).shots[0], 100u);
  EXPECT_EQ(c.cell(0, 1, 1, 0).shots, 100u);
  EXPECT_EQ(c.cell(0, 2, 1, 1).ones, 2 * ones[0]);
  EXPECT_THROW(c.merge(ShotTallies(2)), ReadoutError);
}

TEST(CrossFidelity, FourTermFormula) {
  ShotTallies t(2);
  // Qubit 0 reads: P(1|00)=0.1, P(1|10)=0.8, P(0|11)=0.3, P(0|01)=0.6.
  t.add_state(std::vector<std::uint8_t>{0, 0}, std::vector<std::uint64_t>{10, 0}, 100);
  t.add_state(std::vector<std::uint8_t>{1, 0}, std::vector<std::uint64_t>{80, 0}, 100);
  t.add_state(std::vector<std::uint8_t>{1, 1}, std::vector<std::uint64_t>{70, 100}, 100);
  t.add_state(std::vector<std::uint8_t>{0, 1}, std::vector<std::uint64_t>{40, 100}, 100);
  const auto f = cross_fidelity(t);
  EXPECT_NEAR(f.value(0, 1), 1.0 - 0.5 * (0.1 + 0.8 + 0.3 + 0.6), 1e-15);
  const double var = (0.1 * 0.9 + 0.8 * 0.2 + 0.3 * 0.7 + 0.6 * 0.4) / 100.0;
  EXPECT_NEAR(f.sigma(0, 1), 0.5 * std::sqrt(var), 1e-15);
  EXPECT_TRUE(f.defined(0, 1));
  EXPECT_FALSE(f.defined(0, 0));
  EXPECT_TRUE(std::isnan(f.value(1, 1)));
}

TEST(CrossFidelity, IndependentPerfectReadoutIsZero) {
  ShotTallies t(2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      t.add_state(std::vector<std::uint8_t>{std::uint8_t(a), std::uint8_t(b)},
                  std::vector<std::uint64_t>{a ? 10u : 0u, b ? 10u : 0u}, 10);
  const auto f = cross_fidelity(t);
  EXPECT_EQ(f.value(0, 1), 0.0);
  EXPECT_EQ(f.mean_abs_off_diagonal(), 0.0);
}

TEST(CrossFidelity, MissingConditionIsUndefined) {
  ShotTallies t(2);
  t.add_state(std::vector<std::uint8_t>{0, 0}, std::vector<std::uint64_t>{0, 0}, 10);
  const auto f = cross_fidelity(t);
  EXPECT_FALSE(f.defined(0, 1));
  EXPECT_TRUE(f.off_diagonal_abs().empty());
}

TEST(ErrorBudget, UnknownClosesTheSum) {
  const auto b = budget_from_components(0.006, 0.002, 0.004, 0.015, 0.001);
  EXPECT_NEAR(b.unknown, 0.003, 1e-15);
  EXPECT_FALSE(b.negative_unknown);
  const auto neg = budget_from_components(0.006, 0.002, 0.004, 0.005, 0.001);
  EXPECT_TRUE(neg.negative_unknown);
}

TEST(ErrorBudget, RelaxationEntersWithHalfWeight) {
  std::vector<CostBreakdown> bd(2);
  bd[0].separation = 0.01;
  bd[0].relaxation = 0.02;
  bd[1].separation = 0.03;
  bd[1].relaxation = 0.04;
  const std::vector<double> obs = {0.05, 0.07};
  const auto b = error_budget(bd, obs, 0.001);
  EXPECT_DOUBLE_EQ(b.separation, 0.02);
  EXPECT_DOUBLE_EQ(b.relaxation, 0.015);
  EXPECT_DOUBLE_EQ(b.observed, 0.06);
  EXPECT_DOUBLE_EQ(b.state_prep, 0.001);
  EXPECT_THROW(error_budget(bd, std::vector<double>{0.1}, 0.0), ReadoutError);
}

TEST(BenchmarkConfig, DefaultsAndValidation) {
  const BenchmarkConfig c;
  EXPECT_EQ(c.n_states, 200u);
  EXPECT_EQ(c.n_shots, 2000u);
  BenchmarkConfig bad;
  bad.n_shots = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.prep_error = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(subset_from_string("measure-only"), Subset::MeasureOnly);
  EXPECT_EQ(subset_from_string(to_string(Subset::AllQubits)), Subset::AllQubits);
  EXPECT_THROW(subset_from_string("some"), ConfigError);
}

TEST(RunBenchmark, SameSeedSameTalliesAnyThreadCount) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto res = synthetic_result(g, 6.0, 0.01, 0.002);
  auto cfg = small_cfg();
  const auto a = run_benchmark(g, res, cfg);
  cfg.threads = 3;
  const auto b = run_benchmark(g, res, cfg);
  EXPECT_EQ(a.tallies, b.tallies);
  cfg.seed = 6;
  const auto c = run_benchmark(g, res, cfg);
  EXPECT_FALSE(a.tallies == c.tallies);
  EXPECT_TRUE(a.crosstalk_proxy_active);
}

TEST(RunBenchmark, ReportsQubitsRowMajorAndMatchesPrediction) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto res = synthetic_result(g, 5.0, 0.02);
  auto cfg = small_cfg();
  cfg.n_states = 60;
  cfg.n_shots = 1000;
  const auto rep = run_benchmark(g, res, cfg);
  ASSERT_EQ(rep.qubits.size(), 17u);
  EXPECT_FALSE(rep.crosstalk_proxy_active);
  for (std::size_t i = 1; i < rep.qubits.size(); ++i) EXPECT_LT(rep.qubits[i - 1].id, rep.qubits[i].id);
  for (const auto& q : rep.qubits) {
    EXPECT_EQ(q.tally.shots[0] + q.tally.shots[1], 60u * 1000u);
    EXPECT_NEAR(q.error, q.predicted, 4.0 * q.sigma) << to_string(q.id);
  }
}

TEST(RunBenchmark, MeasureOnlySubset) {
  const DeviceGraph g = load_device_file(device_d3());
  auto cfg = small_cfg();
  cfg.subset = Subset::MeasureOnly;
  const auto rep = run_benchmark(g, synthetic_result(g, 6.0, 0.0), cfg);
  ASSERT_EQ(rep.qubits.size(), 8u);
  for (const auto& q : rep.qubits) EXPECT_EQ(g.at(q.id).id.role, Role::Measure);
  EXPECT_EQ(rep.fidelity.value.rows(), 8);
}

TEST(RunBenchmark, PrepErrorRaisesError) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto res = synthetic_result(g, 16.0, 0.0);
  auto cfg = small_cfg();
  const auto clean = run_benchmark(g, res, cfg);
  cfg.prep_error = 0.05;
  const auto dirty = run_benchmark(g, res, cfg);
  EXPECT_GT(dirty.budget.observed, clean.budget.observed + 0.03);
  EXPECT_EQ(dirty.budget.state_prep, 0.05);
}

TEST(RunBenchmark, RejectsIncompleteOrInfeasibleResult) {
  const DeviceGraph g = load_device_file(device_d3());
  auto res = synthetic_result(g, 6.0, 0.0);
  res.qubits.pop_back();
  EXPECT_THROW(run_benchmark(g, res, small_cfg()), ConfigError);
  res = synthetic_result(g, 6.0, 0.0);
  res.qubits[0].breakdown.feasible = false;
  EXPECT_THROW(run_benchmark(g, res, small_cfg()), ConfigError);
}
