#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readout/device.hpp"
#include "readout/error_models.hpp"
#include "readout/params.hpp"

namespace readout {

/// Candidate values for the brute-force scan. Amplitudes are drive amplitudes
/// B0 in sqrt(photons/ns).
struct SearchGrid {
  std::vector<double> omega_points;
  std::vector<double> amp_points;
  std::vector<double> tp_points;

  std::size_t size() const { return omega_points.size() * amp_points.size() * tp_points.size(); }

  /// Flat index -> (omega, amp, t_p) indices; t_p varies fastest.
  std::array<std::size_t, 3> unflatten(std::size_t flat) const;
  ReadoutParams point(std::size_t flat, double total_time) const;

  /// Throws ConfigError unless every axis is non-empty, ascending, and inside
  /// `band` / (0, total_time].
  void validate(const FrequencyBand& band, double total_time) const;
};

/// `n` evenly spaced values from lo to hi inclusive; {lo} for n == 1.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct QubitOptimum {
  ReadoutParams params;
  CostBreakdown breakdown;
  std::array<std::size_t, 3> grid_index{};
  std::size_t evaluations = 0;
  std::size_t n_specs = 0;
};

struct ScanOptions {
  unsigned threads = 1;
};

/// Exact grid minimum of the cost. Ties go to the lexicographically smallest
/// (omega, amp, t_p) index. Collision specs are only built for AllModels.
/// Throws InfeasibleError if every point is infeasible.
QubitOptimum optimize_qubit(const QubitPhysical& q, const SearchGrid& grid, std::span<const LockedNeighbor> locked,
                            const CostModel& model, const CollisionModel& collisions, ScanOptions options = {},
                            std::string_view name = "qubit");

/// Measure qubits first, then data qubits. Within each role the walk prefers
/// an unvisited diagonal neighbor (row-major first), otherwise the closest
/// unvisited qubit of that role (row-major tie-break).
std::vector<QubitId> traversal_order(const DeviceGraph& graph, std::optional<QubitId> start = std::nullopt);

struct QubitResult {
  QubitId id;
  ReadoutParams params;
  CostBreakdown breakdown;
  std::size_t traversal_index = 0;
  std::size_t n_specs = 0;
  std::array<std::size_t, 3> grid_index{};
};

struct OptimizationResult {
  std::vector<QubitResult> qubits;  // traversal order
  std::size_t evaluations = 0;
  bool complete = true;
  std::string error;

  const QubitResult* find(const QubitId& id) const;
};

struct DeviceOptions {
  unsigned threads = 1;
  std::optional<QubitId> start;
  std::function<void(const QubitResult&)> on_locked;
};

/// Locked neighbors (nearest and next-nearest) of `id` among `locked`.
std::vector<LockedNeighbor> locked_neighbors(const DeviceGraph& graph, const QubitId& id,
                                             std::span<const QubitResult> locked);

/// Greedy snake: optimize each qubit in traversal order against the collision
/// constraints of already-locked neighbors, then lock it. Infeasibility stops
/// the walk and returns the partial result with complete = false.
OptimizationResult optimize_device(const DeviceGraph& graph,
                                   const std::function<SearchGrid(const QubitId&)>& grid_for,
                                   const CostModel& model, const CollisionModel& collisions,
                                   const DeviceOptions& options = {});

}  // namespace readout
