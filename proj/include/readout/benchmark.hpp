#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "readout/device.hpp"
#include "readout/error_models.hpp"
#include "readout/snake.hpp"

namespace readout {

enum class Subset { AllQubits, MeasureOnly };

std::string_view to_string(Subset subset);
Subset subset_from_string(std::string_view text);

struct BenchmarkConfig {
  std::size_t n_states = 200;
  std::size_t n_shots = 2000;
  std::uint64_t seed = 0;
  double prep_error = 0.0;
  Subset subset = Subset::AllQubits;
  unsigned threads = 1;

  void validate() const;
};

/// Per-qubit inputs of the shot model.
struct ShotModel {
  double snr = 0.0;
  double relaxation = 0.0;  // probability a prepared |1> decays before T0
  double coupling = 0.0;    // outcome randomized with probability min(1, coupling)
  double prep_error = 0.0;  // prepared bit flipped with this probability

  static ShotModel from_breakdown(const CostBreakdown& b, double prep_error);
};

/// One shot: optional preparation flip, relaxation of |1>, then a Gaussian
/// decision variable with mean +sqrt(SNR)/2 for |0> and -sqrt(SNR)/2 for |1>
/// and standard deviation 1/sqrt(2), thresholded at zero. This reproduces
/// 0.5 erfc(sqrt(SNR)/2) per state. Last, the crosstalk proxy may replace the
/// outcome with a fair coin.
bool sample_shot(const ShotModel& model, bool prepared, std::mt19937_64& rng);

/// Exact misidentification probabilities {P(1|0), P(0|1)} of sample_shot.
std::array<double, 2> expected_flip_probabilities(const ShotModel& model);

/// Counts for one qubit, split by prepared bit.
struct QubitTally {
  std::array<std::uint64_t, 2> shots{};
  std::array<std::uint64_t, 2> wrong{};
};

/// (P(1|0) + P(0|1)) / 2. DomainError if either prepared value is absent.
double measurement_error(const QubitTally& tally);

/// Shot counts for every ordered qubit pair, conditioned on both prepared
/// bits, together with how often qubit i read 1.
class ShotTallies {
 public:
  explicit ShotTallies(std::size_t n_qubits);

  void add_shot(std::span<const std::uint8_t> prepared, std::span<const std::uint8_t> measured);
  /// `ones[i]` of `shots` repetitions of the same prepared state read 1 on qubit i.
  void add_state(std::span<const std::uint8_t> prepared, std::span<const std::uint64_t> ones, std::uint64_t shots);
  void merge(const ShotTallies& other);

  std::size_t n_qubits() const { return n_; }
  const QubitTally& qubit(std::size_t i) const { return qubit_[i]; }

  struct Cell {
    std::uint64_t shots = 0;
    std::uint64_t ones = 0;
  };
  /// Cell for qubit i given prepared bits (p_i, p_j).
  const Cell& cell(std::size_t i, std::size_t j, int p_i, int p_j) const {
    return pair_[((i * n_ + j) * 2 + static_cast<std::size_t>(p_i)) * 2 + static_cast<std::size_t>(p_j)];
  }

  friend bool operator==(const ShotTallies&, const ShotTallies&);

 private:
  Cell& cell_mut(std::size_t i, std::size_t j, int p_i, int p_j) {
    return pair_[((i * n_ + j) * 2 + static_cast<std::size_t>(p_i)) * 2 + static_cast<std::size_t>(p_j)];
  }

  std::size_t n_;
  std::vector<QubitTally> qubit_;
  std::vector<Cell> pair_;
};

/// F_ij = 1 - [P(1_i|0_i 0_j) + P(1_i|1_i 0_j) + P(0_i|1_i 1_j) + P(0_i|0_i 1_j)] / 2.
/// Entries with an empty conditioning cell are NaN and marked undefined.
struct CrossFidelityMatrix {
  Eigen::MatrixXd value;
  Eigen::MatrixXd sigma;  // binomial standard error
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> defined;

  /// Off-diagonal defined entries.
  std::vector<double> off_diagonal_abs() const;
  double mean_abs_off_diagonal() const;
  double mean_sigma_off_diagonal() const;
};

CrossFidelityMatrix cross_fidelity(const ShotTallies& tallies);

struct ErrorBudget {
  double separation = 0.0;
  double state_prep = 0.0;
  double relaxation = 0.0;
  double unknown = 0.0;
  double observed = 0.0;
  double sigma = 0.0;            // statistical uncertainty of `observed`
  bool negative_unknown = false;  // unknown < -3 sigma

  friend bool operator==(const ErrorBudget&, const ErrorBudget&) = default;
};

/// unknown = observed - (separation + state_prep + relaxation).
ErrorBudget budget_from_components(double separation, double state_prep, double relaxation, double observed,
                                   double sigma = 0.0);

/// Averages model terms over qubits. Relaxation only affects prepared |1>, so
/// it enters the symmetric measurement error with weight 1/2.
ErrorBudget error_budget(std::span<const CostBreakdown> breakdowns, std::span<const double> observed,
                         double prep_error, double sigma = 0.0);

struct QubitBenchmark {
  QubitId id;
  QubitTally tally;
  double p1_given_0 = 0.0;
  double p0_given_1 = 0.0;
  double error = 0.0;
  double sigma = 0.0;
  double predicted = 0.0;  // exact expectation under the shot model
  ErrorBudget budget;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<QubitBenchmark> qubits;  // row-major
  CrossFidelityMatrix fidelity;
  ErrorBudget budget;
  bool crosstalk_proxy_active = false;
  ShotTallies tallies{0};
};

/// Simulates simultaneous readout of `cfg.subset` using the optimized
/// parameters. Deterministic for a fixed seed regardless of thread count.
BenchmarkReport run_benchmark(const DeviceGraph& graph, const OptimizationResult& result,
                              const BenchmarkConfig& cfg);

}  // namespace readout
