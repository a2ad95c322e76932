#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "readout/benchmark.hpp"
#include "readout/device.hpp"
#include "readout/error_models.hpp"
#include "readout/run_config.hpp"

namespace readout {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitModel = 4,
};

struct RunManifest {
  std::filesystem::path device;
  std::filesystem::path opt_config;  // optional for validate and benchmark
  std::optional<Strategy> strategy;  // overrides the config file
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path out = "out";
};

enum class SweepAxis { Frequency, Amplitude, Length };
SweepAxis sweep_axis_from_string(const std::string& text);

/// Axis values in config units: GHz, dimensionless amplitude, or ns. Unset
/// pinned values default to the middle of the band / grid range.
struct SweepRequest {
  QubitId qubit;
  SweepAxis axis = SweepAxis::Frequency;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 51;
  std::optional<double> f_GHz;
  std::optional<double> amplitude;
  std::optional<double> tp_ns;
};

struct SweepRow {
  double value = 0.0;
  ReadoutParams params;
  double amplitude = 0.0;
  CostBreakdown cost;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  ReadoutParams pinned;
  FieldTrajectory<double> trajectory;  // at the pinned point
};

/// Model terms along one axis with the other two parameters pinned. Throws
/// ConfigError for a range outside the qubit's band or (0, total].
SweepResult run_sweep(const DeviceGraph& graph, const OptimizerConfig& cfg, const SweepRequest& request);

std::string sweep_csv(const SweepResult& sweep);
/// Columns t_ns, re_beta0, im_beta0, re_beta1, im_beta1, n0, n1.
std::string trajectory_csv(const FieldTrajectory<double>& traj);

int cmd_optimize(const RunManifest& manifest, std::ostream& log);
int cmd_sweep(const RunManifest& manifest, const SweepRequest& request, std::ostream& log);
int cmd_benchmark(const RunManifest& manifest, const std::filesystem::path& results, BenchmarkConfig bench,
                  std::ostream& log);
int cmd_validate(const RunManifest& manifest, std::ostream& log);

}  // namespace readout
