#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "readout/device.hpp"
#include "readout/error_models.hpp"
#include "readout/snake.hpp"

namespace readout {

/// Grid axes in config units. Frequencies span each qubit's own search band;
/// amplitudes are dimensionless and scaled by the qubit's amp_ref.
struct GridSpec {
  std::size_t n_freq = 60;
  double amp_min = 0.05;
  double amp_max = 1.0;
  std::size_t n_amp = 40;
  double tp_min = 100.0;
  double tp_max = 480.0;
  std::size_t n_tp = 40;

  SearchGrid for_qubit(const DeviceGraph::Entry& entry) const;
};

struct OptimizerConfig {
  CostModel model;
  CollisionModel collisions = CollisionModel::defaults();
  GridSpec grid;
  std::optional<QubitId> start;
};

/// JSON optimizer config. Unknown keys are rejected so typos surface.
OptimizerConfig load_optimizer_config(std::string_view text);
OptimizerConfig load_optimizer_config_file(const std::filesystem::path& path);

/// Fully resolved config as JSON, loadable by load_optimizer_config.
std::string serialize_optimizer_config(const OptimizerConfig& cfg);

}  // namespace readout
