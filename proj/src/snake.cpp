#include "readout/snake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "readout/parallel.hpp"

namespace readout {

std::array<std::size_t, 3> SearchGrid::unflatten(std::size_t flat) const {
  const std::size_t n_tp = tp_points.size();
  const std::size_t n_amp = amp_points.size();
  return {flat / (n_amp * n_tp), (flat / n_tp) % n_amp, flat % n_tp};
}

ReadoutParams SearchGrid::point(std::size_t flat, double total_time) const {
  const auto [i, j, k] = unflatten(flat);
  return ReadoutParams::with_total(omega_points[i], amp_points[j], tp_points[k], total_time);
}

void SearchGrid::validate(const FrequencyBand& band, double total_time) const {
  auto check_axis = [](const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw ConfigError(std::string("search grid axis '") + name + "' is empty");
    if (!std::is_sorted(axis.begin(), axis.end()))
      throw ConfigError(std::string("search grid axis '") + name + "' must be ascending");
  };
  check_axis(omega_points, "omega");
  check_axis(amp_points, "amplitude");
  check_axis(tp_points, "t_p");
  if (omega_points.front() < band.omega_min || omega_points.back() > band.omega_max)
    throw ConfigError("search grid frequencies leave the qubit's search band");
  if (amp_points.front() < 0.0) throw ConfigError("search grid amplitudes must be >= 0");
  if (!(tp_points.front() > 0.0) || tp_points.back() > total_time)
    throw ConfigError("search grid pulse lengths must lie in (0, total]");
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

QubitOptimum optimize_qubit(const QubitPhysical& q, const SearchGrid& grid, std::span<const LockedNeighbor> locked,
                            const CostModel& model, const CollisionModel& collisions, ScanOptions options,
                            std::string_view name) {
  std::vector<CollisionSpec> specs;
  if (model.strategy == Strategy::AllModels) specs = collision_specs(q, locked, collisions);

  const std::size_t n = grid.size();
  if (n == 0) throw ConfigError("empty search grid for " + std::string(name));
  std::vector<double> totals(n);
  parallel_blocks(n, options.threads, [&](std::size_t begin, std::size_t end) {
    CostEvaluator evaluator(model);
    for (std::size_t i = begin; i < end; ++i)
      totals[i] = evaluator.evaluate(q, grid.point(i, model.total_time), specs).total;
  });

  std::size_t best = n;
  double best_total = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (totals[i] < best_total) {
      best_total = totals[i];
      best = i;
    }
  }
  if (best == n)
    throw InfeasibleError("all " + std::to_string(n) + " grid points are infeasible for " + std::string(name));

  QubitOptimum out;
  out.params = grid.point(best, model.total_time);
  out.breakdown = evaluate_cost(q, out.params, model, specs);
  out.grid_index = grid.unflatten(best);
  out.evaluations = n;
  out.n_specs = specs.size();
  return out;
}

namespace {

long squared_distance(const QubitId& a, const QubitId& b) {
  const long dr = a.row - b.row;
  const long dc = a.col - b.col;
  return dr * dr + dc * dc;
}

// `pool` is row-major, so the first minimum found is the row-major tie-break.
void walk(std::vector<QubitId> pool, std::optional<QubitId> first, std::optional<QubitId> previous,
          std::vector<QubitId>& order) {
  if (pool.empty()) return;
  auto closest_to = [&](const QubitId& ref) {
    auto best = pool.begin();
    for (auto it = pool.begin(); it != pool.end(); ++it)
      if (squared_distance(*it, ref) < squared_distance(*best, ref)) best = it;
    return best;
  };

  auto current = pool.begin();
  if (first) {
    current = std::find(pool.begin(), pool.end(), *first);
  } else if (previous) {
    current = closest_to(*previous);
  }
  while (true) {
    const QubitId here = *current;
    order.push_back(here);
    pool.erase(current);
    if (pool.empty()) break;
    current = std::find_if(pool.begin(), pool.end(), [&](const QubitId& c) { return neighbor_order(here, c) == 2; });
    if (current == pool.end()) current = closest_to(here);
  }
}

}  // namespace

std::vector<QubitId> traversal_order(const DeviceGraph& graph, std::optional<QubitId> start) {
  std::vector<QubitId> measure;
  std::vector<QubitId> data;
  for (const auto& e : graph.entries()) (e.id.role == Role::Measure ? measure : data).push_back(e.id);

  std::optional<QubitId> measure_start;
  std::optional<QubitId> data_start;
  if (start) {
    const QubitId resolved = graph.at(*start).id;
    (resolved.role == Role::Measure ? measure_start : data_start) = resolved;
  }

  std::vector<QubitId> order;
  order.reserve(graph.size());
  walk(std::move(measure), measure_start, std::nullopt, order);
  std::optional<QubitId> last;
  if (!order.empty()) last = order.back();
  walk(std::move(data), data_start, last, order);
  return order;
}

const QubitResult* OptimizationResult::find(const QubitId& id) const {
  for (const auto& r : qubits)
    if (r.id == id) return &r;
  return nullptr;
}

std::vector<LockedNeighbor> locked_neighbors(const DeviceGraph& graph, const QubitId& id,
                                             std::span<const QubitResult> locked) {
  std::vector<LockedNeighbor> out;
  for (const auto& nb : neighbors(graph, id, NeighborOrder::Both)) {
    auto it = std::find_if(locked.begin(), locked.end(), [&](const QubitResult& r) { return r.id == nb; });
    if (it != locked.end()) out.push_back({graph.physical(nb), it->params, neighbor_order(id, nb)});
  }
  return out;
}

OptimizationResult optimize_device(const DeviceGraph& graph,
                                   const std::function<SearchGrid(const QubitId&)>& grid_for,
                                   const CostModel& model, const CollisionModel& collisions,
                                   const DeviceOptions& options) {
  OptimizationResult result;
  const auto order = traversal_order(graph, options.start);
  for (std::size_t step = 0; step < order.size(); ++step) {
    const QubitId& id = order[step];
    const auto locked = locked_neighbors(graph, id, result.qubits);
    try {
      const SearchGrid grid = grid_for(id);
      grid.validate(graph.band(id), model.total_time);
      const auto best = optimize_qubit(graph.physical(id), grid, locked, model, collisions,
                                       ScanOptions{options.threads}, "qubit " + to_string(id));
      result.evaluations += best.evaluations;
      result.qubits.push_back({id, best.params, best.breakdown, step, best.n_specs, best.grid_index});
      if (options.on_locked) options.on_locked(result.qubits.back());
    } catch (const ReadoutError& err) {
      result.complete = false;
      result.error = err.what();
      break;
    }
  }
  return result;
}

}  // namespace readout
