#include "readout/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "readout/errors.hpp"
#include "readout/units.hpp"

namespace readout {

using nlohmann::json;

SearchGrid GridSpec::for_qubit(const DeviceGraph::Entry& entry) const {
  SearchGrid g;
  g.omega_points = linspace(entry.band.omega_min, entry.band.omega_max, n_freq);
  g.amp_points = linspace(amp_min * entry.physical.amp_ref, amp_max * entry.physical.amp_ref, n_amp);
  g.tp_points = linspace(tp_min, tp_max, n_tp);
  return g;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  static const json empty = json::object();
  auto it = obj.find(key);
  if (it == obj.end()) return empty;
  if (!it->is_object()) throw ConfigError(where + ": '" + key + "' must be an object");
  return *it;
}

CollisionShape read_shape(const json& obj, CollisionShape base, const std::string& where) {
  reject_unknown(obj, {"width_MHz", "resonance_penalty", "amplitude"}, where);
  double width_mhz = units::rad_per_ns_to_mhz(base.width);
  read_opt(obj, "width_MHz", width_mhz, where);
  const double width = units::mhz_to_rad_per_ns(width_mhz);
  // Keep the resonance penalty 2 pi c / gamma when only the width changes.
  double penalty = base.width > 0.0 ? units::kTwoPi * base.amplitude / base.width : 0.0;
  read_opt(obj, "resonance_penalty", penalty, where);
  double amplitude = penalty * width / units::kTwoPi;
  read_opt(obj, "amplitude", amplitude, where);
  if (!(width > 0.0)) throw ConfigError(where + ": width must be > 0");
  if (!(amplitude >= 0.0)) throw ConfigError(where + ": amplitude must be >= 0");
  return {width, amplitude};
}

void read_order(const json& obj, std::array<CollisionShape, 4>& shapes, const std::string& where) {
  reject_unknown(obj, {"width_MHz", "resonance_penalty", "amplitude", "channels"}, where);
  json shared = obj;
  shared.erase("channels");
  for (auto& s : shapes) s = read_shape(shared, s, where);
  const json& channels = object_at(obj, "channels", where);
  for (const auto& [name, value] : channels.items()) {
    bool found = false;
    for (std::size_t c = 0; c < 4; ++c) {
      if (name == to_string(kCollisionChannels[c])) {
        shapes[c] = read_shape(value, shapes[c], where + "." + name);
        found = true;
      }
    }
    if (!found) throw ConfigError(where + ": unknown collision channel '" + name + "'");
  }
}

}  // namespace

OptimizerConfig load_optimizer_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("optimizer config parse error: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("optimizer config must be a JSON object");
  reject_unknown(doc,
                 {"total_time_ns", "dt_ns", "pole_guard_MHz", "strategy", "grid", "weights", "mist", "collisions",
                  "start_qubit"},
                 "optimizer config");

  OptimizerConfig cfg;
  auto& m = cfg.model;
  read_opt(doc, "total_time_ns", m.total_time, "optimizer config");
  read_opt(doc, "dt_ns", m.dt, "optimizer config");
  double guard_mhz = units::rad_per_ns_to_mhz(m.pole_guard);
  read_opt(doc, "pole_guard_MHz", guard_mhz, "optimizer config");
  m.pole_guard = units::mhz_to_rad_per_ns(guard_mhz);
  if (doc.contains("strategy")) m.strategy = strategy_from_string(doc["strategy"].get<std::string>());
  if (!(m.total_time > 0.0)) throw ConfigError("total_time_ns must be > 0");
  if (!(m.dt > 0.0)) throw ConfigError("dt_ns must be > 0");
  if (!(m.pole_guard >= 0.0)) throw ConfigError("pole_guard_MHz must be >= 0");

  const json& grid = object_at(doc, "grid", "optimizer config");
  reject_unknown(grid, {"n_freq", "amplitude", "pulse_length_ns"}, "grid");
  read_opt(grid, "n_freq", cfg.grid.n_freq, "grid");
  const json& amp = object_at(grid, "amplitude", "grid");
  reject_unknown(amp, {"min", "max", "n"}, "grid.amplitude");
  read_opt(amp, "min", cfg.grid.amp_min, "grid.amplitude");
  read_opt(amp, "max", cfg.grid.amp_max, "grid.amplitude");
  read_opt(amp, "n", cfg.grid.n_amp, "grid.amplitude");
  const json& tp = object_at(grid, "pulse_length_ns", "grid");
  reject_unknown(tp, {"min", "max", "n"}, "grid.pulse_length_ns");
  read_opt(tp, "min", cfg.grid.tp_min, "grid.pulse_length_ns");
  read_opt(tp, "max", cfg.grid.tp_max, "grid.pulse_length_ns");
  read_opt(tp, "n", cfg.grid.n_tp, "grid.pulse_length_ns");
  if (cfg.grid.n_freq == 0 || cfg.grid.n_amp == 0 || cfg.grid.n_tp == 0)
    throw ConfigError("grid axes need at least one point");
  if (cfg.grid.amp_min < 0.0 || cfg.grid.amp_max < cfg.grid.amp_min) throw ConfigError("grid.amplitude range invalid");
  if (!(cfg.grid.tp_min > 0.0) || cfg.grid.tp_max < cfg.grid.tp_min || cfg.grid.tp_max > m.total_time)
    throw ConfigError("grid.pulse_length_ns must lie in (0, total_time_ns]");

  const json& weights = object_at(doc, "weights", "optimizer config");
  reject_unknown(weights, {"separation", "relaxation", "photon", "mist", "coupling"}, "weights");
  read_opt(weights, "separation", m.weights.separation, "weights");
  read_opt(weights, "relaxation", m.weights.relaxation, "weights");
  read_opt(weights, "photon", m.weights.photon, "weights");
  read_opt(weights, "mist", m.weights.mist, "weights");
  read_opt(weights, "coupling", m.weights.coupling, "weights");
  for (double w : {m.weights.separation, m.weights.relaxation, m.weights.photon, m.weights.mist, m.weights.coupling})
    if (!(w >= 0.0)) throw ConfigError("weights must be >= 0");

  const json& mist = object_at(doc, "mist", "optimizer config");
  reject_unknown(mist, {"a", "b_per_GHz", "ceiling", "sharpness"}, "mist");
  read_opt(mist, "a", m.mist.a, "mist");
  double b_per_ghz = m.mist.b * units::kTwoPi;
  read_opt(mist, "b_per_GHz", b_per_ghz, "mist");
  m.mist.b = b_per_ghz / units::kTwoPi;
  read_opt(mist, "ceiling", m.mist_ceiling, "mist");
  read_opt(mist, "sharpness", m.mist_sharpness, "mist");
  if (!(m.mist.a > 0.0)) throw ConfigError("mist.a must be > 0");
  if (!(m.mist_sharpness > 0.0)) throw ConfigError("mist.sharpness must be > 0");
  if (!(m.mist_ceiling >= 0.0)) throw ConfigError("mist.ceiling must be >= 0");

  const json& coll = object_at(doc, "collisions", "optimizer config");
  reject_unknown(coll, {"nearest", "next_nearest"}, "collisions");
  read_order(object_at(coll, "nearest", "collisions"), cfg.collisions.nearest, "collisions.nearest");
  read_order(object_at(coll, "next_nearest", "collisions"), cfg.collisions.next_nearest, "collisions.next_nearest");

  if (doc.contains("start_qubit") && !doc["start_qubit"].is_null()) {
    const auto rc = doc["start_qubit"].get<std::vector<int>>();
    if (rc.size() != 2) throw ConfigError("start_qubit must be [row, col]");
    cfg.start = QubitId{rc[0], rc[1]};
  }
  return cfg;
}

OptimizerConfig load_optimizer_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open optimizer config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_optimizer_config(buf.str());
}

std::string serialize_optimizer_config(const OptimizerConfig& cfg) {
  const auto& m = cfg.model;
  auto shapes_json = [](const std::array<CollisionShape, 4>& shapes) {
    json channels = json::object();
    for (std::size_t c = 0; c < 4; ++c)
      channels[std::string(to_string(kCollisionChannels[c]))] = {
          {"width_MHz", units::rad_per_ns_to_mhz(shapes[c].width)}, {"amplitude", shapes[c].amplitude}};
    return json{{"channels", channels}};
  };
  json doc = {
      {"total_time_ns", m.total_time},
      {"dt_ns", m.dt},
      {"pole_guard_MHz", units::rad_per_ns_to_mhz(m.pole_guard)},
      {"strategy", std::string(to_string(m.strategy))},
      {"grid",
       {{"n_freq", cfg.grid.n_freq},
        {"amplitude", {{"min", cfg.grid.amp_min}, {"max", cfg.grid.amp_max}, {"n", cfg.grid.n_amp}}},
        {"pulse_length_ns", {{"min", cfg.grid.tp_min}, {"max", cfg.grid.tp_max}, {"n", cfg.grid.n_tp}}}}},
      {"weights",
       {{"separation", m.weights.separation},
        {"relaxation", m.weights.relaxation},
        {"photon", m.weights.photon},
        {"mist", m.weights.mist},
        {"coupling", m.weights.coupling}}},
      {"mist",
       {{"a", m.mist.a},
        {"b_per_GHz", m.mist.b * units::kTwoPi},
        {"ceiling", m.mist_ceiling},
        {"sharpness", m.mist_sharpness}}},
      {"collisions", {{"nearest", shapes_json(cfg.collisions.nearest)},
                      {"next_nearest", shapes_json(cfg.collisions.next_nearest)}}},
  };
  if (cfg.start) doc["start_qubit"] = {cfg.start->row, cfg.start->col};
  return doc.dump(2) + "\n";
}

}  // namespace readout
