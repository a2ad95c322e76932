#include <gtest/gtest.h>

#include <limits>

#include "readout/errors.hpp"
#include "readout/run_config.hpp"
#include "readout/snake.hpp"
#include "support.hpp"

using namespace readout;
using namespace readout::testing;

namespace {

CostModel test_model(Strategy s = Strategy::AllModels) {
  CostModel m;
  m.strategy = s;
  m.mist = MistParams{2.0, 2.0 / units::kTwoPi};
  return m;
}

SearchGrid small_grid(double f_lo, double f_hi, std::size_t n = 5) {
  SearchGrid g;
  g.omega_points = linspace(units::ghz_to_rad_per_ns(f_lo), units::ghz_to_rad_per_ns(f_hi), n);
  g.amp_points = linspace(0.05, 0.5, 4);
  g.tp_points = linspace(100.0, 400.0, 4);
  return g;
}

DeviceGraph two_qubits() {
  std::vector<DeviceGraph::Entry> e;
  e.push_back({QubitId{0, 0, Role::Measure}, toy_qubit(4.6), band_GHz(5.4, 6.0)});
  e.push_back({QubitId{1, 1, Role::Data}, toy_qubit(4.8), band_GHz(5.5, 6.1)});
  return DeviceGraph(e);
}

}  // namespace

TEST(Linspace, EndpointsAndSingleton) {
  const auto v = linspace(1.0, 2.0, 5);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v.front(), 1.0);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_DOUBLE_EQ(v[2], 1.5);
  EXPECT_EQ(linspace(3.0, 9.0, 1), std::vector<double>{3.0});
  EXPECT_TRUE(linspace(0.0, 1.0, 0).empty());
}

TEST(SearchGrid, FlatIndexHasPulseLengthFastest) {
  SearchGrid g;
  g.omega_points = {1.0, 2.0};
  g.amp_points = {0.1, 0.2, 0.3};
  g.tp_points = {10.0, 20.0, 30.0, 40.0};
  EXPECT_EQ(g.size(), 24u);
  EXPECT_EQ(g.unflatten(0), (std::array<std::size_t, 3>{0, 0, 0}));
  EXPECT_EQ(g.unflatten(1), (std::array<std::size_t, 3>{0, 0, 1}));
  EXPECT_EQ(g.unflatten(4), (std::array<std::size_t, 3>{0, 1, 0}));
  EXPECT_EQ(g.unflatten(23), (std::array<std::size_t, 3>{1, 2, 3}));
  const auto p = g.point(13, 100.0);
  EXPECT_EQ(p, (ReadoutParams{2.0, 0.1, 20.0, 80.0}));
}

TEST(SearchGrid, Validation) {
  const FrequencyBand band{1.0, 3.0};
  SearchGrid g;
  g.omega_points = {1.0, 2.0};
  g.amp_points = {0.1};
  g.tp_points = {10.0};
  EXPECT_NO_THROW(g.validate(band, 100.0));
  g.omega_points = {1.0, 3.5};
  EXPECT_THROW(g.validate(band, 100.0), ConfigError);
  g.omega_points = {2.0, 1.0};
  EXPECT_THROW(g.validate(band, 100.0), ConfigError);
  g.omega_points = {1.0};
  g.tp_points = {150.0};
  EXPECT_THROW(g.validate(band, 100.0), ConfigError);
  g.tp_points = {};
  EXPECT_THROW(g.validate(band, 100.0), ConfigError);
}

TEST(Traversal, D3HandDerivedOrder) {
  const DeviceGraph g = load_device_file(device_d3());
  const auto order = traversal_order(g);
  const std::vector<QubitId> expected = {
      {0, 1}, {1, 2}, {2, 1}, {3, 0}, {3, 2}, {2, 3}, {1, 4}, {4, 3},  // measure
      {3, 3}, {2, 2}, {1, 1}, {0, 2}, {1, 3}, {2, 4}, {4, 2}, {3, 1}, {2, 0}};
  ASSERT_EQ(order.size(), expected.size());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], expected[i]) << "step " << i;
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(order[i].role, Role::Measure);
  for (std::size_t i = 8; i < order.size(); ++i) EXPECT_EQ(order[i].role, Role::Data);
}

TEST(Traversal, VisitsEveryQubitOnceFromAnyStart) {
  const DeviceGraph g = load_device_file(device_d3());
  for (const auto& id : g.ids()) {
    auto order = traversal_order(g, id);
    ASSERT_EQ(order.size(), g.size());
    if (g.at(id).id.role == Role::Measure) EXPECT_EQ(order.front(), id);
    std::sort(order.begin(), order.end());
    EXPECT_EQ(std::adjacent_find(order.begin(), order.end()), order.end());
  }
  EXPECT_ANY_THROW(traversal_order(g, QubitId{9, 9}));
}

TEST(OptimizeQubit, EqualsExhaustiveScan) {
  const auto q = toy_qubit(4.7);
  const SearchGrid grid = small_grid(5.5, 6.2, 7);
  const std::vector<LockedNeighbor> locked = {
      {toy_qubit(4.6), ReadoutParams::with_total(units::ghz_to_rad_per_ns(5.8), 0.3, 200.0, 500.0), 1}};
  const CostModel m = test_model();
  const auto specs = collision_specs(q, locked, CollisionModel::defaults());

  double best = std::numeric_limits<double>::infinity();
  ReadoutParams best_p;
  for (double w : grid.omega_points)
    for (double b : grid.amp_points)
      for (double tp : grid.tp_points) {
        const ReadoutParams p{w, b, tp, 500.0 - tp};
        const double c = evaluate_cost(q, p, m, specs).total;
        if (c < best) {
          best = c;
          best_p = p;
        }
      }
  const auto opt = optimize_qubit(q, grid, locked, m, CollisionModel::defaults());
  EXPECT_EQ(opt.params, best_p);
  EXPECT_EQ(opt.breakdown.total, best);
  EXPECT_EQ(opt.evaluations, grid.size());
  EXPECT_EQ(opt.n_specs, 4u);
}

TEST(OptimizeQubit, TiesGoToLowestFlatIndex) {
  // Zero drive: cost does not depend on amplitude or pulse length.
  const auto q = toy_qubit(4.7);
  SearchGrid grid = small_grid(5.5, 6.0, 3);
  grid.amp_points = {0.0, 0.0, 0.0};
  const auto opt = optimize_qubit(q, grid, {}, test_model(Strategy::PredictiveOnly), CollisionModel::defaults());
  EXPECT_EQ(opt.grid_index[1], 0u);
  EXPECT_EQ(opt.grid_index[2], 0u);
}

TEST(OptimizeQubit, ThreadCountDoesNotChangeResult) {
  const auto q = toy_qubit(4.7);
  const SearchGrid grid = small_grid(5.5, 6.2, 9);
  const auto a = optimize_qubit(q, grid, {}, test_model(), CollisionModel::defaults(), {1});
  const auto b = optimize_qubit(q, grid, {}, test_model(), CollisionModel::defaults(), {4});
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.breakdown, b.breakdown);
}

TEST(OptimizeQubit, PredictiveOnlyBuildsNoSpecs) {
  const auto q = toy_qubit(4.7);
  const std::vector<LockedNeighbor> locked = {
      {toy_qubit(4.6), ReadoutParams::with_total(units::ghz_to_rad_per_ns(5.8), 0.3, 200.0, 500.0), 1}};
  const auto opt = optimize_qubit(q, small_grid(5.5, 6.0), locked, test_model(Strategy::PredictiveOnly),
                                  CollisionModel::defaults());
  EXPECT_EQ(opt.n_specs, 0u);
  EXPECT_EQ(opt.breakdown.coupling, 0.0);
}

TEST(OptimizeQubit, AllInfeasibleThrows) {
  const auto q = toy_qubit(4.7);
  SearchGrid grid;
  grid.omega_points = {q.omega_r + 1e-4};  // inside the pole guard
  grid.amp_points = {0.1};
  grid.tp_points = {100.0};
  EXPECT_THROW(optimize_qubit(q, grid, {}, test_model(), CollisionModel::defaults(), {}, "q"), InfeasibleError);
}

TEST(OptimizeDevice, CountsEvaluationsAndLocksInOrder) {
  const DeviceGraph g = two_qubits();
  std::vector<QubitId> seen;
  DeviceOptions opts;
  opts.on_locked = [&](const QubitResult& r) { seen.push_back(r.id); };
  const auto res = optimize_device(
      g, [&](const QubitId& id) { return small_grid(id.row == 0 ? 5.4 : 5.5, id.row == 0 ? 6.0 : 6.1); },
      test_model(), CollisionModel::defaults(), opts);
  ASSERT_TRUE(res.complete);
  EXPECT_EQ(res.evaluations, 2 * 5 * 4 * 4u);
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], (QubitId{0, 0}));
  EXPECT_EQ(res.qubits[1].n_specs, 4u);  // the diagonal neighbor was locked first
  EXPECT_EQ(res.qubits[0].n_specs, 0u);
  EXPECT_EQ(res.find(QubitId{1, 1})->traversal_index, 1u);
  EXPECT_EQ(res.find(QubitId{5, 5}), nullptr);
}

TEST(OptimizeDevice, InfeasibleQubitStopsWithPartialResult) {
  const DeviceGraph g = two_qubits();
  auto grid_for = [&](const QubitId& id) {
    if (id.row == 1) {
      SearchGrid bad;
      bad.omega_points = {g.physical(id).omega_r + 1e-4};
      bad.amp_points = {0.1};
      bad.tp_points = {100.0};
      return bad;
    }
    return small_grid(5.4, 6.0);
  };
  std::vector<DeviceGraph::Entry> e = g.entries();
  e[1].band = band_GHz(4.0, 6.1);
  const DeviceGraph wide(e);
  const auto res = optimize_device(wide, grid_for, test_model(), CollisionModel::defaults());
  EXPECT_FALSE(res.complete);
  EXPECT_EQ(res.qubits.size(), 1u);
  EXPECT_NE(res.error.find("(1,1)"), std::string::npos);
}

TEST(OptimizeDevice, GridOutsideBandIsReportedNotThrown) {
  const DeviceGraph g = two_qubits();
  const auto res = optimize_device(
      g, [&](const QubitId&) { return small_grid(7.0, 7.5); }, test_model(), CollisionModel::defaults());
  EXPECT_FALSE(res.complete);
  EXPECT_TRUE(res.qubits.empty());
}

TEST(LockedNeighbors, OnlyLockedNearbyQubits) {
  const DeviceGraph g = load_device_file(device_d3());
  std::vector<QubitResult> locked;
  locked.push_back({QubitId{1, 2, Role::Measure}, {}, {}, 0, 0, {}});
  locked.push_back({QubitId{4, 3, Role::Measure}, {}, {}, 1, 0, {}});
  const auto nb = locked_neighbors(g, QubitId{2, 2}, locked);
  ASSERT_EQ(nb.size(), 1u);
  EXPECT_EQ(nb[0].order, 1);
  const auto diag = locked_neighbors(g, QubitId{2, 3}, locked);
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_EQ(diag[0].order, 2);
}
