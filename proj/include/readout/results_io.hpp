#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "readout/benchmark.hpp"
#include "readout/device.hpp"
#include "readout/error_models.hpp"
#include "readout/snake.hpp"

namespace readout {

/// Results file: JSON keyed by qubit with chosen parameters and cost terms.
std::string results_to_json(const OptimizationResult& result, const DeviceGraph& graph, Strategy strategy);
OptimizationResult results_from_json(std::string_view text);
OptimizationResult load_results_file(const std::filesystem::path& path);

/// One row per qubit for plotting parameter maps.
std::string results_to_csv(const OptimizationResult& result, const DeviceGraph& graph);

std::string benchmark_summary_json(const BenchmarkReport& report);
std::string per_qubit_errors_csv(const BenchmarkReport& report);
std::string cross_fidelity_csv(const BenchmarkReport& report);
/// Integrated histogram of |F_ij| over defined off-diagonal entries.
std::string cross_fidelity_histogram_csv(const BenchmarkReport& report);
std::string error_budget_csv(const BenchmarkReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace readout
