#include "readout/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "readout/errors.hpp"
#include "readout/units.hpp"

namespace readout {

using nlohmann::json;

std::string_view to_string(Role role) { return role == Role::Measure ? "measure" : "data"; }

Role role_from_string(std::string_view text) {
  if (text == "measure") return Role::Measure;
  if (text == "data") return Role::Data;
  throw ConfigError("unknown qubit role '" + std::string(text) + "' (expected 'data' or 'measure')");
}

std::string to_string(const QubitId& id) {
  return "(" + std::to_string(id.row) + "," + std::to_string(id.col) + ")";
}

Gamma1Table::Gamma1Table(Eigen::VectorXd omega, Eigen::VectorXd rate)
    : omega_(std::move(omega)), rate_(std::move(rate)) {
  if (omega_.size() != rate_.size()) throw ConfigError("gamma1_table: frequency/rate length mismatch");
  if (omega_.size() < 2) throw ConfigError("gamma1_table: needs at least 2 entries");
  for (Eigen::Index i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_(i)) || !std::isfinite(rate_(i)))
      throw ConfigError("gamma1_table: non-finite entry");
    if (rate_(i) < 0.0) throw ConfigError("gamma1_table: negative rate");
    if (i > 0 && !(omega_(i) > omega_(i - 1)))
      throw ConfigError("gamma1_table: frequencies must be strictly increasing");
  }
}

std::optional<double> Gamma1Table::lookup(double omega_q) const noexcept {
  const Eigen::Index n = omega_.size();
  if (n < 2 || !(omega_q >= omega_(0)) || !(omega_q <= omega_(n - 1))) return std::nullopt;
  const double* begin = omega_.data();
  const double* it = std::upper_bound(begin, begin + n, omega_q);
  Eigen::Index hi = std::min<Eigen::Index>(it - begin, n - 1);
  Eigen::Index lo = hi - 1;
  if (omega_q == omega_(hi)) return rate_(hi);
  if (omega_q == omega_(lo)) return rate_(lo);
  const double frac = (omega_q - omega_(lo)) / (omega_(hi) - omega_(lo));
  return rate_(lo) + frac * (rate_(hi) - rate_(lo));
}

std::optional<double> Gamma1Table::lookup(double omega_q, Eigen::Index& hint) const noexcept {
  const Eigen::Index n = omega_.size();
  if (n < 2 || !(omega_q >= omega_(0)) || !(omega_q <= omega_(n - 1))) return std::nullopt;
  Eigen::Index lo = std::clamp<Eigen::Index>(hint, 0, n - 2);
  while (lo > 0 && omega_q < omega_(lo)) --lo;
  while (lo < n - 2 && omega_q >= omega_(lo + 1)) ++lo;
  hint = lo;
  const Eigen::Index hi = lo + 1;
  if (omega_q == omega_(hi)) return rate_(hi);
  if (omega_q == omega_(lo)) return rate_(lo);
  const double frac = (omega_q - omega_(lo)) / (omega_(hi) - omega_(lo));
  return rate_(lo) + frac * (rate_(hi) - rate_(lo));
}

double Gamma1Table::operator()(double omega_q) const {
  if (auto r = lookup(omega_q)) return *r;
  std::ostringstream msg;
  msg << "relaxation rate requested at " << units::rad_per_ns_to_ghz(omega_q)
      << " GHz, outside table span [" << units::rad_per_ns_to_ghz(min_omega()) << ", "
      << units::rad_per_ns_to_ghz(max_omega()) << "] GHz";
  throw DomainError(msg.str());
}

namespace {

void validate_entry(const DeviceGraph::Entry& e) {
  const std::string who = "qubit " + to_string(e.id) + ": ";
  const auto& p = e.physical;
  auto fail = [&](const std::string& what) { throw ConfigError(who + what); };
  if (!(p.alpha < 0.0)) fail("alpha must be < 0");
  if (!(p.kappa > 0.0)) fail("kappa must be > 0");
  if (!(p.eta > 0.0 && p.eta <= 1.0)) fail("eta must be in (0, 1]");
  if (!(p.g_eff >= 0.0) || !std::isfinite(p.g_eff)) fail("g_eff must be finite and >= 0");
  if (!(p.omega_r > 0.0) || !std::isfinite(p.omega_r)) fail("omega_r must be > 0");
  if (!(p.amp_ref > 0.0) || !std::isfinite(p.amp_ref)) fail("amp_ref must be > 0");
  if (p.gamma1.omega().size() < 2) fail("gamma1_table needs at least 2 entries");
  if (!(e.band.omega_min <= e.band.omega_max)) fail("search_band min exceeds max");
  if (!(e.band.omega_min > 0.0)) fail("search_band must be positive");
  if (e.band.omega_min < p.gamma1.min_omega() || e.band.omega_max > p.gamma1.max_omega())
    fail("search_band must lie within the gamma1_table frequency span");
}

}  // namespace

DeviceGraph::DeviceGraph(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    validate_entry(entries_[i]);
    auto [it, inserted] = index_.emplace(std::pair{entries_[i].id.row, entries_[i].id.col}, i);
    if (!inserted) throw ConfigError("qubit " + to_string(entries_[i].id) + ": duplicate coordinates");
  }
}

std::vector<QubitId> DeviceGraph::ids() const {
  std::vector<QubitId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.id);
  return out;
}

bool DeviceGraph::contains(int row, int col) const { return index_.contains({row, col}); }

std::size_t DeviceGraph::index_of(const QubitId& id) const {
  auto it = index_.find({id.row, id.col});
  if (it == index_.end()) throw ConfigError("unknown qubit " + to_string(id));
  return it->second;
}

int neighbor_order(const QubitId& a, const QubitId& b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  if (dr + dc == 1) return 1;
  if (dr == 1 && dc == 1) return 2;
  return 0;
}

std::vector<QubitId> neighbors(const DeviceGraph& graph, const QubitId& id, NeighborOrder order) {
  graph.index_of(id);
  std::vector<QubitId> out;
  // Offsets already in row-major order.
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const bool diagonal = dr != 0 && dc != 0;
      if (order == NeighborOrder::Nearest && diagonal) continue;
      if (order == NeighborOrder::NextNearest && !diagonal) continue;
      if (graph.contains(id.row + dr, id.col + dc))
        out.push_back(graph.at(QubitId{id.row + dr, id.col + dc}).id);
    }
  }
  return out;
}

double coupling_strength(const QubitPhysical& q, double omega_q) {
  return q.g_eff * std::sqrt(q.omega_r * omega_q) / 2.0;
}

double relaxation_rate(const QubitPhysical& q, double omega_q) { return q.gamma1(omega_q); }

namespace {

template <typename T>
T require(const json& obj, const char* key, const std::string& who) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(who + "missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(who + "field '" + key + "' has the wrong type");
  }
}

DeviceGraph::Entry parse_qubit(const json& jq) {
  if (!jq.is_object()) throw ConfigError("each qubit entry must be an object");
  const int row = require<int>(jq, "row", "qubit: ");
  const int col = require<int>(jq, "col", "qubit: ");
  const std::string who = "qubit " + to_string(QubitId{row, col}) + ": ";

  DeviceGraph::Entry e;
  e.id = QubitId{row, col, role_from_string(require<std::string>(jq, "role", who))};
  auto& p = e.physical;
  p.alpha = units::ghz_to_rad_per_ns(require<double>(jq, "alpha_GHz", who));
  p.g_eff = require<double>(jq, "g_eff", who);
  p.omega_r = units::ghz_to_rad_per_ns(require<double>(jq, "f_r_GHz", who));
  p.eta = require<double>(jq, "eta", who);
  p.kappa = units::mhz_to_rad_per_ns(require<double>(jq, "kappa_MHz", who));
  p.amp_ref = require<double>(jq, "amp_ref", who);

  const auto band = require<std::vector<double>>(jq, "search_band_GHz", who);
  if (band.size() != 2) throw ConfigError(who + "search_band_GHz must be [min, max]");
  e.band = {units::ghz_to_rad_per_ns(band[0]), units::ghz_to_rad_per_ns(band[1])};

  const auto table = require<std::vector<std::vector<double>>>(jq, "gamma1_table", who);
  Eigen::VectorXd omega(static_cast<Eigen::Index>(table.size()));
  Eigen::VectorXd rate(static_cast<Eigen::Index>(table.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != 2) throw ConfigError(who + "gamma1_table rows must be [f_GHz, rate_per_us]");
    omega(static_cast<Eigen::Index>(i)) = units::ghz_to_rad_per_ns(table[i][0]);
    rate(static_cast<Eigen::Index>(i)) = units::per_us_to_per_ns(table[i][1]);
  }
  try {
    p.gamma1 = Gamma1Table(std::move(omega), std::move(rate));
  } catch (const ConfigError& err) {
    throw ConfigError(who + err.what());
  }
  return e;
}

}  // namespace

DeviceGraph load_device(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text.begin(), config_text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("device config parse error: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("qubits") || !doc["qubits"].is_array())
    throw ConfigError("device config must be an object with a 'qubits' array");
  if (doc["qubits"].empty()) throw ConfigError("device config has no qubits");
  std::vector<DeviceGraph::Entry> entries;
  for (const auto& jq : doc["qubits"]) entries.push_back(parse_qubit(jq));
  return DeviceGraph(std::move(entries));
}

DeviceGraph load_device_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open device config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_device(buf.str());
}

std::string serialize_device(const DeviceGraph& graph) {
  json qubits = json::array();
  for (const auto& e : graph.entries()) {
    const auto& p = e.physical;
    json table = json::array();
    for (Eigen::Index i = 0; i < p.gamma1.omega().size(); ++i)
      table.push_back({units::rad_per_ns_to_ghz(p.gamma1.omega()(i)),
                       units::per_ns_to_per_us(p.gamma1.rate()(i))});
    qubits.push_back({
        {"row", e.id.row},
        {"col", e.id.col},
        {"role", to_string(e.id.role)},
        {"alpha_GHz", units::rad_per_ns_to_ghz(p.alpha)},
        {"g_eff", p.g_eff},
        {"f_r_GHz", units::rad_per_ns_to_ghz(p.omega_r)},
        {"eta", p.eta},
        {"kappa_MHz", units::rad_per_ns_to_mhz(p.kappa)},
        {"amp_ref", p.amp_ref},
        {"search_band_GHz",
         {units::rad_per_ns_to_ghz(e.band.omega_min), units::rad_per_ns_to_ghz(e.band.omega_max)}},
        {"gamma1_table", table},
    });
  }
  return json{{"qubits", qubits}}.dump(2) + "\n";
}

}  // namespace readout
