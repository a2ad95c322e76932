#include "readout/results_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "readout/errors.hpp"
#include "readout/units.hpp"

namespace readout {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json breakdown_json(const CostBreakdown& b) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"separation", num(b.separation)},
          {"relaxation", num(b.relaxation)},
          {"photon", num(b.photon)},
          {"mist", num(b.mist)},
          {"coupling", num(b.coupling)},
          {"snr", num(b.snr)},
          {"t0_ns", num(b.t0)},
          {"n_max", num(b.n_max)},
          {"chi_rad_per_ns", num(b.chi)},
          {"chi_MHz", num(units::rad_per_ns_to_mhz(b.chi))},
          {"total", num(b.total)},
          {"feasible", b.feasible}};
}

double num_or_nan(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nan("");
  return it->get<double>();
}

}  // namespace

std::string results_to_json(const OptimizationResult& result, const DeviceGraph& graph, Strategy strategy) {
  json qubits = json::array();
  for (const auto& r : result.qubits) {
    const auto& p = r.params;
    qubits.push_back({{"row", r.id.row},
                      {"col", r.id.col},
                      {"role", to_string(r.id.role)},
                      {"traversal_index", r.traversal_index},
                      {"f_q_GHz", units::rad_per_ns_to_ghz(p.omega_q)},
                      {"omega_q_rad_per_ns", p.omega_q},
                      {"B0", p.B0},
                      {"amplitude", p.B0 / graph.physical(r.id).amp_ref},
                      {"t_p_ns", p.t_p},
                      {"t_r_ns", p.t_r},
                      {"n_specs", r.n_specs},
                      {"grid_index", r.grid_index},
                      {"cost", breakdown_json(r.breakdown)}});
  }
  json doc = {{"version", READOUT_VERSION},
              {"strategy", std::string(to_string(strategy))},
              {"evaluations", result.evaluations},
              {"complete", result.complete},
              {"error", result.error},
              {"qubits", qubits}};
  return doc.dump(2) + "\n";
}

OptimizationResult results_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("results file parse error: ") + err.what());
  }
  OptimizationResult out;
  try {
    out.evaluations = doc.at("evaluations").get<std::size_t>();
    out.complete = doc.at("complete").get<bool>();
    out.error = doc.value("error", std::string{});
    for (const auto& jq : doc.at("qubits")) {
      QubitResult r;
      r.id = QubitId{jq.at("row").get<int>(), jq.at("col").get<int>(),
                     role_from_string(jq.at("role").get<std::string>())};
      r.traversal_index = jq.at("traversal_index").get<std::size_t>();
      r.params.omega_q = jq.at("omega_q_rad_per_ns").get<double>();
      r.params.B0 = jq.at("B0").get<double>();
      r.params.t_p = jq.at("t_p_ns").get<double>();
      r.params.t_r = jq.at("t_r_ns").get<double>();
      r.n_specs = jq.at("n_specs").get<std::size_t>();
      r.grid_index = jq.at("grid_index").get<std::array<std::size_t, 3>>();
      const json& c = jq.at("cost");
      auto& b = r.breakdown;
      b.separation = num_or_nan(c, "separation");
      b.relaxation = num_or_nan(c, "relaxation");
      b.photon = num_or_nan(c, "photon");
      b.mist = num_or_nan(c, "mist");
      b.coupling = num_or_nan(c, "coupling");
      b.snr = num_or_nan(c, "snr");
      b.t0 = num_or_nan(c, "t0_ns");
      b.n_max = num_or_nan(c, "n_max");
      b.chi = num_or_nan(c, "chi_rad_per_ns");
      b.feasible = c.at("feasible").get<bool>();
      b.total = b.feasible ? num_or_nan(c, "total") : std::numeric_limits<double>::infinity();
      out.qubits.push_back(r);
    }
  } catch (const json::exception& err) {
    throw ConfigError(std::string("results file schema error: ") + err.what());
  }
  return out;
}

OptimizationResult load_results_file(const std::filesystem::path& path) {
  return results_from_json(read_text_file(path));
}

std::string results_to_csv(const OptimizationResult& result, const DeviceGraph& graph) {
  std::ostringstream out;
  out << "row,col,role,traversal_index,f_q_GHz,amplitude,B0,t_p_ns,t_r_ns,chi_MHz,two_chi_over_kappa,n_max,"
         "separation,relaxation,photon,mist,coupling,snr,t0_ns,total,n_specs\n";
  for (const auto& r : result.qubits) {
    const auto& q = graph.physical(r.id);
    const auto& b = r.breakdown;
    out << r.id.row << ',' << r.id.col << ',' << to_string(r.id.role) << ',' << r.traversal_index << ','
        << fmt(units::rad_per_ns_to_ghz(r.params.omega_q)) << ',' << fmt(r.params.B0 / q.amp_ref) << ','
        << fmt(r.params.B0) << ',' << fmt(r.params.t_p) << ',' << fmt(r.params.t_r) << ','
        << fmt(units::rad_per_ns_to_mhz(b.chi)) << ',' << fmt(2.0 * std::abs(b.chi) / q.kappa) << ','
        << fmt(b.n_max) << ',' << fmt(b.separation) << ',' << fmt(b.relaxation) << ',' << fmt(b.photon) << ','
        << fmt(b.mist) << ',' << fmt(b.coupling) << ',' << fmt(b.snr) << ',' << fmt(b.t0) << ','
        << fmt(b.total) << ',' << r.n_specs << '\n';
  }
  return out.str();
}

namespace {

json budget_json(const ErrorBudget& b) {
  return {{"separation", b.separation}, {"state_prep", b.state_prep}, {"relaxation", b.relaxation},
          {"unknown", b.unknown},       {"observed", b.observed},     {"sigma", b.sigma},
          {"negative_unknown", b.negative_unknown}};
}

}  // namespace

std::string benchmark_summary_json(const BenchmarkReport& report) {
  const auto& cfg = report.config;
  json qubits = json::array();
  for (const auto& q : report.qubits) {
    qubits.push_back({{"row", q.id.row},
                      {"col", q.id.col},
                      {"role", to_string(q.id.role)},
                      {"p1_given_0", q.p1_given_0},
                      {"p0_given_1", q.p0_given_1},
                      {"error", std::isfinite(q.error) ? json(q.error) : json(nullptr)},
                      {"sigma", q.sigma},
                      {"predicted", q.predicted}});
  }
  double mean_error = 0.0;
  for (const auto& q : report.qubits) mean_error += q.error;
  if (!report.qubits.empty()) mean_error /= static_cast<double>(report.qubits.size());
  json doc = {{"version", READOUT_VERSION},
              {"config",
               {{"n_states", cfg.n_states},
                {"n_shots", cfg.n_shots},
                {"seed", cfg.seed},
                {"prep_error", cfg.prep_error},
                {"subset", std::string(to_string(cfg.subset))},
                {"threads", cfg.threads}}},
              {"mean_error", std::isfinite(mean_error) ? json(mean_error) : json(nullptr)},
              {"mean_abs_cross_fidelity", report.fidelity.mean_abs_off_diagonal()},
              {"mean_cross_fidelity_sigma", report.fidelity.mean_sigma_off_diagonal()},
              {"crosstalk_proxy_active", report.crosstalk_proxy_active},
              {"crosstalk_note",
               "crosstalk is simulated as independent per-shot outcome randomization with probability "
               "min(1, coupling penalty); it is a crude proxy"},
              {"budget", budget_json(report.budget)},
              {"qubits", qubits}};
  return doc.dump(2) + "\n";
}

std::string per_qubit_errors_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "row,col,role,shots_0,shots_1,p1_given_0,p0_given_1,error,sigma,predicted\n";
  for (const auto& q : report.qubits) {
    out << q.id.row << ',' << q.id.col << ',' << to_string(q.id.role) << ',' << q.tally.shots[0] << ','
        << q.tally.shots[1] << ',' << fmt(q.p1_given_0) << ',' << fmt(q.p0_given_1) << ',' << fmt(q.error) << ','
        << fmt(q.sigma) << ',' << fmt(q.predicted) << '\n';
  }
  return out.str();
}

std::string cross_fidelity_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "i_row,i_col,j_row,j_col,F,sigma,defined\n";
  const auto& f = report.fidelity;
  for (std::size_t i = 0; i < report.qubits.size(); ++i) {
    for (std::size_t j = 0; j < report.qubits.size(); ++j) {
      if (i == j) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      out << report.qubits[i].id.row << ',' << report.qubits[i].id.col << ',' << report.qubits[j].id.row << ','
          << report.qubits[j].id.col << ',' << fmt(f.value(ii, jj)) << ',' << fmt(f.sigma(ii, jj)) << ','
          << (f.defined(ii, jj) ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string cross_fidelity_histogram_csv(const BenchmarkReport& report) {
  auto values = report.fidelity.off_diagonal_abs();
  std::sort(values.begin(), values.end());
  std::ostringstream out;
  out << "abs_F,cumulative_fraction\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    out << fmt(values[k]) << ',' << fmt(static_cast<double>(k + 1) / static_cast<double>(values.size())) << '\n';
  return out.str();
}

std::string error_budget_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "scope,separation,state_prep,relaxation,unknown,observed,sigma,negative_unknown\n";
  auto row = [&](const std::string& scope, const ErrorBudget& b) {
    out << scope << ',' << fmt(b.separation) << ',' << fmt(b.state_prep) << ',' << fmt(b.relaxation) << ','
        << fmt(b.unknown) << ',' << fmt(b.observed) << ',' << fmt(b.sigma) << ',' << (b.negative_unknown ? 1 : 0)
        << '\n';
  };
  row("mean", report.budget);
  for (const auto& q : report.qubits) row("r" + std::to_string(q.id.row) + "c" + std::to_string(q.id.col), q.budget);
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace readout
