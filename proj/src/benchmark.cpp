#include "readout/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "readout/errors.hpp"
#include "readout/parallel.hpp"

namespace readout {

std::string_view to_string(Subset subset) { return subset == Subset::MeasureOnly ? "measure-only" : "all"; }

Subset subset_from_string(std::string_view text) {
  if (text == "all" || text == "all-qubits") return Subset::AllQubits;
  if (text == "measure-only" || text == "measure") return Subset::MeasureOnly;
  throw ConfigError("unknown subset '" + std::string(text) + "' (expected all or measure-only)");
}

void BenchmarkConfig::validate() const {
  if (n_states == 0 || n_shots == 0) throw ConfigError("benchmark needs n_states > 0 and n_shots > 0");
  if (!(prep_error >= 0.0 && prep_error <= 1.0)) throw ConfigError("prep_error must be a probability");
}

ShotModel ShotModel::from_breakdown(const CostBreakdown& b, double prep_error) {
  return {b.snr, std::clamp(b.relaxation, 0.0, 1.0), std::max(0.0, b.coupling), prep_error};
}

bool sample_shot(const ShotModel& model, bool prepared, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  bool state = prepared;
  if (model.prep_error > 0.0 && uniform(rng) < model.prep_error) state = !state;
  if (state && model.relaxation > 0.0 && uniform(rng) < model.relaxation) state = false;

  const double mean = std::sqrt(model.snr) / 2.0;
  std::normal_distribution<double> noise(0.0, 1.0 / std::numbers::sqrt2);
  const double x = (state ? -mean : mean) + noise(rng);
  bool measured = x < 0.0;

  const double p_random = std::min(1.0, model.coupling);
  if (p_random > 0.0 && uniform(rng) < p_random) measured = uniform(rng) < 0.5;
  return measured;
}

std::array<double, 2> expected_flip_probabilities(const ShotModel& m) {
  const double s = 0.5 * std::erfc(std::sqrt(m.snr) / 2.0);
  const double c = std::min(1.0, m.coupling);
  // Probability the pre-threshold state is |1> for each prepared value.
  const double one_given_0 = m.prep_error * (1.0 - m.relaxation);
  const double one_given_1 = (1.0 - m.prep_error) * (1.0 - m.relaxation);
  const double read1_given_0 = one_given_0 * (1.0 - s) + (1.0 - one_given_0) * s;
  const double read1_given_1 = one_given_1 * (1.0 - s) + (1.0 - one_given_1) * s;
  return {(1.0 - c) * read1_given_0 + 0.5 * c, (1.0 - c) * (1.0 - read1_given_1) + 0.5 * c};
}

double measurement_error(const QubitTally& t) {
  if (t.shots[0] == 0 || t.shots[1] == 0)
    throw DomainError("measurement error needs shots for both prepared states");
  return 0.5 * (static_cast<double>(t.wrong[0]) / static_cast<double>(t.shots[0]) +
                static_cast<double>(t.wrong[1]) / static_cast<double>(t.shots[1]));
}

ShotTallies::ShotTallies(std::size_t n_qubits) : n_(n_qubits), qubit_(n_qubits), pair_(n_qubits * n_qubits * 4) {}

void ShotTallies::add_shot(std::span<const std::uint8_t> prepared, std::span<const std::uint8_t> measured) {
  std::vector<std::uint64_t> ones(n_);
  for (std::size_t i = 0; i < n_; ++i) ones[i] = measured[i] ? 1 : 0;
  add_state(prepared, ones, 1);
}

void ShotTallies::add_state(std::span<const std::uint8_t> prepared, std::span<const std::uint64_t> ones,
                            std::uint64_t shots) {
  for (std::size_t i = 0; i < n_; ++i) {
    const int p_i = prepared[i] ? 1 : 0;
    qubit_[i].shots[p_i] += shots;
    qubit_[i].wrong[p_i] += p_i == 0 ? ones[i] : shots - ones[i];
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      Cell& c = cell_mut(i, j, p_i, prepared[j] ? 1 : 0);
      c.shots += shots;
      c.ones += ones[i];
    }
  }
}

void ShotTallies::merge(const ShotTallies& other) {
  if (other.n_ != n_) throw ReadoutError("cannot merge tallies of different sizes");
  for (std::size_t i = 0; i < n_; ++i) {
    for (int p = 0; p < 2; ++p) {
      qubit_[i].shots[p] += other.qubit_[i].shots[p];
      qubit_[i].wrong[p] += other.qubit_[i].wrong[p];
    }
  }
  for (std::size_t k = 0; k < pair_.size(); ++k) {
    pair_[k].shots += other.pair_[k].shots;
    pair_[k].ones += other.pair_[k].ones;
  }
}

bool operator==(const ShotTallies& a, const ShotTallies& b) {
  if (a.n_ != b.n_) return false;
  for (std::size_t i = 0; i < a.n_; ++i)
    if (a.qubit_[i].shots != b.qubit_[i].shots || a.qubit_[i].wrong != b.qubit_[i].wrong) return false;
  for (std::size_t k = 0; k < a.pair_.size(); ++k)
    if (a.pair_[k].shots != b.pair_[k].shots || a.pair_[k].ones != b.pair_[k].ones) return false;
  return true;
}

CrossFidelityMatrix cross_fidelity(const ShotTallies& tallies) {
  const auto n = static_cast<Eigen::Index>(tallies.n_qubits());
  CrossFidelityMatrix out;
  out.value = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  out.sigma = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  out.defined = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);

  struct Term {
    int p_i, p_j;
    bool count_ones;  // P(1_i | ...) versus P(0_i | ...)
  };
  constexpr std::array<Term, 4> terms = {{{0, 0, true}, {1, 0, true}, {1, 1, false}, {0, 1, false}}};

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double sum = 0.0;
      double var = 0.0;
      bool ok = true;
      for (const auto& t : terms) {
        const auto& c = tallies.cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j), t.p_i, t.p_j);
        if (c.shots == 0) {
          ok = false;
          break;
        }
        const double p1 = static_cast<double>(c.ones) / static_cast<double>(c.shots);
        const double p = t.count_ones ? p1 : 1.0 - p1;
        sum += p;
        var += p * (1.0 - p) / static_cast<double>(c.shots);
      }
      if (!ok) continue;
      out.value(i, j) = 1.0 - 0.5 * sum;
      out.sigma(i, j) = 0.5 * std::sqrt(var);
      out.defined(i, j) = true;
    }
  }
  return out;
}

std::vector<double> CrossFidelityMatrix::off_diagonal_abs() const {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < value.rows(); ++i)
    for (Eigen::Index j = 0; j < value.cols(); ++j)
      if (i != j && defined(i, j)) out.push_back(std::abs(value(i, j)));
  return out;
}

double CrossFidelityMatrix::mean_abs_off_diagonal() const {
  const auto v = off_diagonal_abs();
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double CrossFidelityMatrix::mean_sigma_off_diagonal() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j)
      if (i != j && defined(i, j)) {
        sum += sigma(i, j);
        ++count;
      }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

ErrorBudget budget_from_components(double separation, double state_prep, double relaxation, double observed,
                                   double sigma) {
  ErrorBudget b;
  b.separation = separation;
  b.state_prep = state_prep;
  b.relaxation = relaxation;
  b.observed = observed;
  b.sigma = sigma;
  b.unknown = observed - (separation + state_prep + relaxation);
  b.negative_unknown = b.unknown < -3.0 * sigma;
  return b;
}

ErrorBudget error_budget(std::span<const CostBreakdown> breakdowns, std::span<const double> observed,
                         double prep_error, double sigma) {
  if (breakdowns.size() != observed.size())
    throw ReadoutError("error budget needs one observed error per breakdown");
  if (breakdowns.empty()) return budget_from_components(0.0, prep_error, 0.0, 0.0, sigma);
  double sep = 0.0;
  double relax = 0.0;
  double obs = 0.0;
  for (std::size_t i = 0; i < breakdowns.size(); ++i) {
    sep += breakdowns[i].separation;
    relax += 0.5 * breakdowns[i].relaxation;
    obs += observed[i];
  }
  const double n = static_cast<double>(breakdowns.size());
  return budget_from_components(sep / n, prep_error, relax / n, obs / n, sigma);
}

namespace {

std::mt19937_64 state_engine(std::uint64_t seed, std::size_t state) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

BenchmarkReport run_benchmark(const DeviceGraph& graph, const OptimizationResult& result,
                              const BenchmarkConfig& cfg) {
  cfg.validate();
  std::vector<QubitId> ids;
  std::vector<CostBreakdown> breakdowns;
  std::vector<ShotModel> models;
  for (const auto& e : graph.entries()) {
    if (cfg.subset == Subset::MeasureOnly && e.id.role != Role::Measure) continue;
    const QubitResult* r = result.find(e.id);
    if (r == nullptr) throw ConfigError("optimization result does not cover qubit " + to_string(e.id));
    if (!r->breakdown.feasible) throw ConfigError("qubit " + to_string(e.id) + " has an infeasible optimum");
    ids.push_back(e.id);
    breakdowns.push_back(r->breakdown);
    models.push_back(ShotModel::from_breakdown(r->breakdown, cfg.prep_error));
  }
  const std::size_t n = ids.size();

  const unsigned threads = std::max(1u, cfg.threads);
  const std::size_t blocks = std::min<std::size_t>(threads, cfg.n_states);
  std::vector<ShotTallies> partial(blocks, ShotTallies(n));
  parallel_blocks(blocks, threads, [&](std::size_t b_begin, std::size_t b_end) {
    for (std::size_t b = b_begin; b < b_end; ++b) {
      const std::size_t s_begin = cfg.n_states * b / blocks;
      const std::size_t s_end = cfg.n_states * (b + 1) / blocks;
      std::vector<std::uint8_t> prepared(n);
      std::vector<std::uint64_t> ones(n);
      for (std::size_t s = s_begin; s < s_end; ++s) {
        auto rng = state_engine(cfg.seed, s);
        std::uniform_int_distribution<int> bit(0, 1);
        for (auto& p : prepared) p = static_cast<std::uint8_t>(bit(rng));
        std::fill(ones.begin(), ones.end(), 0);
        for (std::size_t shot = 0; shot < cfg.n_shots; ++shot)
          for (std::size_t q = 0; q < n; ++q) ones[q] += sample_shot(models[q], prepared[q] != 0, rng) ? 1 : 0;
        partial[b].add_state(prepared, ones, cfg.n_shots);
      }
    }
  });

  BenchmarkReport report;
  report.config = cfg;
  report.tallies = ShotTallies(n);
  for (const auto& p : partial) report.tallies.merge(p);

  std::vector<double> observed;
  double var_sum = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    QubitBenchmark qb;
    qb.id = ids[q];
    qb.tally = report.tallies.qubit(q);
    const auto& t = qb.tally;
    qb.p1_given_0 = t.shots[0] ? static_cast<double>(t.wrong[0]) / static_cast<double>(t.shots[0]) : 0.0;
    qb.p0_given_1 = t.shots[1] ? static_cast<double>(t.wrong[1]) / static_cast<double>(t.shots[1]) : 0.0;
    qb.error = (t.shots[0] && t.shots[1]) ? measurement_error(t) : std::numeric_limits<double>::quiet_NaN();
    const auto binomial_var = [](double p, std::uint64_t shots) {
      return shots ? p * (1.0 - p) / static_cast<double>(shots) : 0.0;
    };
    const double var = 0.25 * (binomial_var(qb.p1_given_0, t.shots[0]) + binomial_var(qb.p0_given_1, t.shots[1]));
    qb.sigma = std::sqrt(var);
    const auto flips = expected_flip_probabilities(models[q]);
    qb.predicted = 0.5 * (flips[0] + flips[1]);
    const CostBreakdown one[1] = {breakdowns[q]};
    const double obs[1] = {qb.error};
    qb.budget = error_budget(one, obs, cfg.prep_error, qb.sigma);
    var_sum += var;
    observed.push_back(qb.error);
    if (models[q].coupling > 0.0) report.crosstalk_proxy_active = true;
    report.qubits.push_back(qb);
  }
  report.fidelity = cross_fidelity(report.tallies);
  const double sigma = n ? std::sqrt(var_sum) / static_cast<double>(n) : 0.0;
  report.budget = error_budget(breakdowns, observed, cfg.prep_error, sigma);
  return report;
}

}  // namespace readout
