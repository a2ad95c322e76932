#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "readout/errors.hpp"
#include "readout/results_io.hpp"
#include "readout/run_config.hpp"
#include "support.hpp"

using namespace readout;
using namespace readout::testing;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

OptimizationResult fake_result(const DeviceGraph& g) {
  OptimizationResult r;
  r.evaluations = 1234;
  std::size_t k = 0;
  for (const auto& id : g.ids()) {
    QubitResult q;
    q.id = g.at(id).id;
    q.params = ReadoutParams::with_total(units::ghz_to_rad_per_ns(5.5 + 0.0123456789 * k), 0.1 / 3.0, 240.0, 500.0);
    q.breakdown.separation = 1e-3 / (k + 1.0);
    q.breakdown.relaxation = 2.0 / 7.0 * 1e-3;
    q.breakdown.photon = 0.1 * std::sqrt(2.0);
    q.breakdown.snr = 30.0 + k;
    q.breakdown.t0 = 250.0 + 0.1 * k;
    q.breakdown.n_max = 3.3;
    q.breakdown.chi = -0.00123 * (k + 1);
    q.breakdown.total = 0.5 + k;
    q.traversal_index = k;
    q.n_specs = 4 * (k % 3);
    q.grid_index = {k, k + 1, k + 2};
    r.qubits.push_back(q);
    ++k;
  }
  return r;
}

}  // namespace

TEST(OptimizerConfig, ShippedFileLoadsAndConvertsUnits) {
  const auto cfg = load_optimizer_config_file(optimizer_cfg());
  EXPECT_EQ(cfg.model.total_time, 500.0);
  EXPECT_EQ(cfg.model.dt, 0.1);
  EXPECT_DOUBLE_EQ(cfg.model.pole_guard, units::kTwoPi * 0.010);
  EXPECT_DOUBLE_EQ(cfg.model.mist.b, 2.0 / units::kTwoPi);
  EXPECT_EQ(cfg.model.strategy, Strategy::AllModels);
  EXPECT_EQ(cfg.grid.n_freq * cfg.grid.n_amp * cfg.grid.n_tp, 96000u);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(cfg.collisions.nearest[c].width, units::mhz_to_rad_per_ns(30.0));
    // Resonance penalty 2 pi c / gamma = 1 nearest, 0.5 next-nearest.
    EXPECT_DOUBLE_EQ(units::kTwoPi * cfg.collisions.nearest[c].amplitude / cfg.collisions.nearest[c].width, 1.0);
    EXPECT_DOUBLE_EQ(
        units::kTwoPi * cfg.collisions.next_nearest[c].amplitude / cfg.collisions.next_nearest[c].width, 0.5);
  }
}

TEST(OptimizerConfig, EmptyObjectGivesDefaults) {
  const auto cfg = load_optimizer_config("{}");
  const CostModel m;
  EXPECT_EQ(cfg.model.total_time, m.total_time);
  EXPECT_EQ(cfg.model.dt, m.dt);
  EXPECT_EQ(cfg.grid.n_freq, GridSpec{}.n_freq);
  EXPECT_FALSE(cfg.start.has_value());
}

TEST(OptimizerConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(load_optimizer_config(R"({"totl_time_ns": 500})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"grid": {"amplitude": {"mn": 0.1}}})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"collisions": {"nearest": {"channels": {"bogus": {}}}}})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"dt_ns": 0})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"grid": {"pulse_length_ns": {"max": 600}}})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"weights": {"mist": -1}})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"strategy": "best"})"), ConfigError);
  EXPECT_THROW(load_optimizer_config(R"({"dt_ns": "fast"})"), ConfigError);
  EXPECT_THROW(load_optimizer_config("[1, 2]"), ConfigError);
  EXPECT_THROW(load_optimizer_config("{"), ConfigError);
  EXPECT_THROW(load_optimizer_config_file("/nonexistent/opt.json"), IoError);
}

TEST(OptimizerConfig, PerChannelOverrideAndStartQubit) {
  const auto cfg = load_optimizer_config(R"({
    "start_qubit": [2, 1],
    "collisions": {"nearest": {"width_MHz": 20, "channels": {"up11_02": {"resonance_penalty": 3}}}}
  })");
  ASSERT_TRUE(cfg.start.has_value());
  EXPECT_EQ(*cfg.start, (QubitId{2, 1}));
  const auto& s = cfg.collisions.nearest;
  EXPECT_DOUBLE_EQ(s[0].width, units::mhz_to_rad_per_ns(20.0));
  EXPECT_DOUBLE_EQ(units::kTwoPi * s[0].amplitude / s[0].width, 1.0);
  EXPECT_DOUBLE_EQ(units::kTwoPi * s[2].amplitude / s[2].width, 3.0);
}

TEST(OptimizerConfig, SerializeRoundTrip) {
  auto cfg = load_optimizer_config_file(optimizer_cfg());
  cfg.start = QubitId{0, 1};
  cfg.model.strategy = Strategy::PredictiveOnly;
  const auto back = load_optimizer_config(serialize_optimizer_config(cfg));
  EXPECT_EQ(back.model.strategy, Strategy::PredictiveOnly);
  EXPECT_EQ(back.start, cfg.start);
  EXPECT_EQ(back.grid.n_amp, cfg.grid.n_amp);
  EXPECT_DOUBLE_EQ(back.model.pole_guard, cfg.model.pole_guard);
  EXPECT_DOUBLE_EQ(back.model.mist.b, cfg.model.mist.b);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(back.collisions.next_nearest[c].width, cfg.collisions.next_nearest[c].width);
    EXPECT_DOUBLE_EQ(back.collisions.next_nearest[c].amplitude, cfg.collisions.next_nearest[c].amplitude);
  }
}

TEST(GridSpec, SpansBandAndScalesAmplitude) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto& e = g.entries()[0];
  GridSpec spec;
  spec.n_freq = 7;
  spec.n_amp = 3;
  spec.n_tp = 2;
  const auto grid = spec.for_qubit(e);
  EXPECT_EQ(grid.omega_points.front(), e.band.omega_min);
  EXPECT_EQ(grid.omega_points.back(), e.band.omega_max);
  EXPECT_DOUBLE_EQ(grid.amp_points.back(), spec.amp_max * e.physical.amp_ref);
  EXPECT_EQ(grid.tp_points, (std::vector<double>{spec.tp_min, spec.tp_max}));
}

TEST(ResultsJson, RoundTripIsExact) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto r = fake_result(g);
  const std::string text = results_to_json(r, g, Strategy::AllModels);
  const auto back = results_from_json(text);
  EXPECT_EQ(back.evaluations, r.evaluations);
  EXPECT_EQ(back.complete, r.complete);
  ASSERT_EQ(back.qubits.size(), r.qubits.size());
  for (std::size_t i = 0; i < r.qubits.size(); ++i) {
    EXPECT_EQ(back.qubits[i].id, r.qubits[i].id);
    EXPECT_EQ(back.qubits[i].id.role, r.qubits[i].id.role);
    EXPECT_EQ(back.qubits[i].params, r.qubits[i].params);
    EXPECT_EQ(back.qubits[i].breakdown, r.qubits[i].breakdown);
    EXPECT_EQ(back.qubits[i].grid_index, r.qubits[i].grid_index);
    EXPECT_EQ(back.qubits[i].n_specs, r.qubits[i].n_specs);
  }
  EXPECT_EQ(results_to_json(back, g, Strategy::AllModels), text);
}

TEST(ResultsJson, NonFiniteBecomesNull) {
  const DeviceGraph g = load_device_file(device_d3());
  auto r = fake_result(g);
  r.qubits[0].breakdown.feasible = false;
  r.qubits[0].breakdown.total = std::numeric_limits<double>::infinity();
  r.qubits[0].breakdown.snr = std::nan("");
  const auto doc = nlohmann::json::parse(results_to_json(r, g, Strategy::AllModels));
  EXPECT_TRUE(doc["qubits"][0]["cost"]["total"].is_null());
  EXPECT_TRUE(doc["qubits"][0]["cost"]["snr"].is_null());
  const auto back = results_from_json(doc.dump());
  EXPECT_TRUE(std::isinf(back.qubits[0].breakdown.total));
  EXPECT_TRUE(std::isnan(back.qubits[0].breakdown.snr));
}

TEST(ResultsJson, SchemaErrorsAreConfigErrors) {
  EXPECT_THROW(results_from_json("{}"), ConfigError);
  EXPECT_THROW(results_from_json("nope"), ConfigError);
  EXPECT_THROW(load_results_file("/nonexistent/results.json"), IoError);
}

TEST(ResultsCsv, OneRowPerQubitWithExpectedColumns) {
  const DeviceGraph g = load_device_file(device_d3());
  const std::string csv = results_to_csv(fake_result(g), g);
  EXPECT_EQ(count_lines(csv), 18u);
  const std::string h = header(csv);
  for (const char* col : {"row", "col", "role", "f_q_GHz", "amplitude", "t_p_ns", "t_r_ns", "chi_MHz",
                          "two_chi_over_kappa", "n_max", "separation", "relaxation", "photon", "mist", "coupling",
                          "total"})
    EXPECT_NE(h.find(col), std::string::npos) << col;
}

TEST(BenchmarkOutputs, ShapesOfTheFiles) {
  const DeviceGraph g = load_device_file(device_d3());
  auto res = fake_result(g);
  for (auto& q : res.qubits) q.breakdown.coupling = 0.0;
  BenchmarkConfig cfg;
  cfg.n_states = 16;
  cfg.n_shots = 50;
  cfg.subset = Subset::MeasureOnly;
  const auto rep = run_benchmark(g, res, cfg);
  EXPECT_EQ(count_lines(per_qubit_errors_csv(rep)), 9u);
  EXPECT_EQ(count_lines(cross_fidelity_csv(rep)), 1u + 8u * 7u);
  EXPECT_EQ(count_lines(error_budget_csv(rep)), 10u);
  const auto hist = cross_fidelity_histogram_csv(rep);
  EXPECT_EQ(header(hist), "abs_F,cumulative_fraction");
  const auto summary = nlohmann::json::parse(benchmark_summary_json(rep));
  EXPECT_EQ(summary["config"]["n_states"], 16);
  EXPECT_EQ(summary["qubits"].size(), 8u);
  EXPECT_FALSE(summary["crosstalk_proxy_active"].get<bool>());
}

TEST(TextFiles, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "readout_text_file_test.txt";
  write_text_file(path, "a,b\n1,2\n");
  EXPECT_EQ(read_text_file(path), "a,b\n1,2\n");
  std::filesystem::remove(path);
  EXPECT_THROW(write_text_file("/nonexistent/dir/x.txt", "x"), IoError);
}
