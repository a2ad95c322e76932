#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace readout {

enum class Role { Data, Measure };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

/// Grid position plus surface-code role. Identity and ordering are by
/// position only (row-major); the role rides along.
struct QubitId {
  int row = 0;
  int col = 0;
  Role role = Role::Data;

  friend bool operator==(const QubitId& a, const QubitId& b) {
    return a.row == b.row && a.col == b.col;
  }
  friend std::strong_ordering operator<=>(const QubitId& a, const QubitId& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

std::string to_string(const QubitId& id);

/// Piecewise-linear relaxation rate Gamma_1(omega_q). No extrapolation.
class Gamma1Table {
 public:
  Gamma1Table() = default;
  /// `omega` strictly increasing (rad/ns), `rate` >= 0 (1/ns), at least two nodes.
  Gamma1Table(Eigen::VectorXd omega, Eigen::VectorXd rate);

  /// Throws DomainError outside [min_omega(), max_omega()].
  double operator()(double omega_q) const;
  /// Non-throwing variant for hot loops.
  std::optional<double> lookup(double omega_q) const noexcept;
  /// Same value as lookup(); `hint` is the last interval used and makes
  /// slowly varying queries O(1).
  std::optional<double> lookup(double omega_q, Eigen::Index& hint) const noexcept;

  double min_omega() const { return omega_(0); }
  double max_omega() const { return omega_(omega_.size() - 1); }
  const Eigen::VectorXd& omega() const { return omega_; }
  const Eigen::VectorXd& rate() const { return rate_; }

 private:
  Eigen::VectorXd omega_;
  Eigen::VectorXd rate_;
};

/// Fixed circuit parameters of one qubit and its readout resonator, in
/// internal units (rad/ns, 1/ns).
struct QubitPhysical {
  double alpha = 0.0;    // anharmonicity, < 0
  double g_eff = 0.0;    // frequency-independent coupling efficiency
  double omega_r = 0.0;  // bare resonator frequency
  double eta = 1.0;      // measurement efficiency in (0, 1]
  double kappa = 0.0;    // resonator linewidth, > 0
  Gamma1Table gamma1;
  double amp_ref = 1.0;  // config amplitude -> sqrt(photons/ns)
};

struct FrequencyBand {
  double omega_min = 0.0;
  double omega_max = 0.0;
  bool contains(double omega) const { return omega >= omega_min && omega <= omega_max; }
};

/// Qubits on a square grid. Topology follows from integer coordinates:
/// orthogonal distance one is nearest, diagonal distance one is next-nearest.
/// Immutable after construction.
class DeviceGraph {
 public:
  struct Entry {
    QubitId id;
    QubitPhysical physical;
    FrequencyBand band;
  };

  DeviceGraph() = default;
  /// Validates every invariant; throws ConfigError naming the qubit and field.
  explicit DeviceGraph(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Row-major.
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<QubitId> ids() const;

  bool contains(int row, int col) const;
  std::size_t index_of(const QubitId& id) const;
  const Entry& at(const QubitId& id) const { return entries_[index_of(id)]; }
  const QubitPhysical& physical(const QubitId& id) const { return at(id).physical; }
  const FrequencyBand& band(const QubitId& id) const { return at(id).band; }

 private:
  std::vector<Entry> entries_;
  std::map<std::pair<int, int>, std::size_t> index_;
};

enum class NeighborOrder { Nearest, NextNearest, Both };

/// Neighbors of `id` in row-major order. Throws ConfigError for an unknown id.
std::vector<QubitId> neighbors(const DeviceGraph& graph, const QubitId& id, NeighborOrder order);

/// 1 for orthogonal neighbors, 2 for diagonal neighbors, 0 otherwise.
int neighbor_order(const QubitId& a, const QubitId& b);

/// g = g_eff * sqrt(omega_r * omega_q) / 2.
double coupling_strength(const QubitPhysical& q, double omega_q);

/// Linear interpolation in the Gamma_1 table; DomainError outside it.
double relaxation_rate(const QubitPhysical& q, double omega_q);

/// Parses the JSON device schema (see README) and converts to internal units.
DeviceGraph load_device(std::string_view config_text);
DeviceGraph load_device_file(const std::filesystem::path& path);

/// Inverse of load_device.
std::string serialize_device(const DeviceGraph& graph);

}  // namespace readout
