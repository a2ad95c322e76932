#include "readout/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "readout/errors.hpp"
#include "readout/results_io.hpp"
#include "readout/snake.hpp"
#include "readout/units.hpp"

namespace readout {

using nlohmann::json;

SweepAxis sweep_axis_from_string(const std::string& text) {
  if (text == "frequency") return SweepAxis::Frequency;
  if (text == "amplitude") return SweepAxis::Amplitude;
  if (text == "length") return SweepAxis::Length;
  throw ConfigError("unknown sweep axis '" + text + "' (expected frequency, amplitude or length)");
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& err) {
    log << "error: io: " << err.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& err) {
    log << "error: config: " << err.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& err) {
    log << "error: infeasible: " << err.what() << '\n';
    return kExitModel;
  } catch (const ReadoutError& err) {
    log << "error: model: " << err.what() << '\n';
    return kExitModel;
  } catch (const std::exception& err) {
    log << "error: " << err.what() << '\n';
    return kExitModel;
  }
}

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

OptimizerConfig resolve_config(const RunManifest& m) {
  OptimizerConfig cfg = m.opt_config.empty() ? OptimizerConfig{} : load_optimizer_config_file(m.opt_config);
  if (m.strategy) cfg.model.strategy = *m.strategy;
  return cfg;
}

json manifest_json(const std::string& command, const RunManifest& m, const DeviceGraph& graph,
                   const OptimizerConfig& cfg) {
  return {{"command", command},
          {"version", READOUT_VERSION},
          {"device_path", m.device.string()},
          {"opt_config_path", m.opt_config.string()},
          {"strategy", std::string(to_string(cfg.model.strategy))},
          {"seed", m.seed},
          {"threads", m.threads},
          {"device", json::parse(serialize_device(graph))},
          {"optimizer_config", json::parse(serialize_optimizer_config(cfg))}};
}

std::string summary_text(const OptimizationResult& result, const DeviceGraph& graph, Strategy strategy,
                         double seconds) {
  std::ostringstream out;
  out << "strategy: " << to_string(strategy) << "\n";
  out << "evaluations: " << result.evaluations << "\n";
  out << "wall_time_s: " << fmt(seconds) << "\n";
  out << "complete: " << (result.complete ? "yes" : "no") << "\n";
  if (!result.complete) out << "error: " << result.error << "\n";
  out << "\n step  qubit    role     f_q[GHz]  amp      t_p[ns]  t_r[ns]  n_max    sep        relax      "
         "photon     mist       coupling   total\n";
  for (const auto& r : result.qubits) {
    const auto& b = r.breakdown;
    char line[512];
    std::snprintf(line, sizeof line,
                  " %4zu  %-7s  %-7s  %8.4f  %7.4f  %7.1f  %7.1f  %7.2f  %.3e  %.3e  %.3e  %.3e  %.3e  %.3e\n",
                  r.traversal_index, to_string(r.id).c_str(), std::string(to_string(r.id.role)).c_str(),
                  units::rad_per_ns_to_ghz(r.params.omega_q), r.params.B0 / graph.physical(r.id).amp_ref,
                  r.params.t_p, r.params.t_r, b.n_max, b.separation, b.relaxation, b.photon, b.mist, b.coupling,
                  b.total);
    out << line;
  }
  return out.str();
}

}  // namespace

int cmd_optimize(const RunManifest& m, std::ostream& log) {
  return guarded(log, [&] {
    const DeviceGraph graph = load_device_file(m.device);
    const OptimizerConfig cfg = resolve_config(m);
    for (const auto& e : graph.entries()) cfg.grid.for_qubit(e).validate(e.band, cfg.model.total_time);
    ensure_out_dir(m.out);

    DeviceOptions options;
    options.threads = m.threads;
    options.start = cfg.start;
    options.on_locked = [&](const QubitResult& r) {
      log << "locked " << to_string(r.id) << " (" << to_string(r.id.role) << ") f_q="
          << fmt(units::rad_per_ns_to_ghz(r.params.omega_q)) << " GHz total=" << fmt(r.breakdown.total) << '\n';
    };
    const auto t_start = std::chrono::steady_clock::now();
    const OptimizationResult result = optimize_device(
        graph, [&](const QubitId& id) { return cfg.grid.for_qubit(graph.at(id)); }, cfg.model, cfg.collisions,
        options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    write_text_file(m.out / "results.json", results_to_json(result, graph, cfg.model.strategy));
    write_text_file(m.out / "results.csv", results_to_csv(result, graph));
    write_text_file(m.out / "summary.txt", summary_text(result, graph, cfg.model.strategy, seconds));
    write_text_file(m.out / "manifest.json", manifest_json("optimize", m, graph, cfg).dump(2) + "\n");
    log << "evaluations: " << result.evaluations << "\nwall_time_s: " << fmt(seconds) << '\n';
    if (!result.complete) {
      log << "error: infeasible: " << result.error << '\n';
      return kExitModel;
    }
    return kExitOk;
  });
}

SweepResult run_sweep(const DeviceGraph& graph, const OptimizerConfig& cfg, const SweepRequest& req) {
  const auto& entry = graph.at(req.qubit);
  const auto& q = entry.physical;
  const double total = cfg.model.total_time;
  if (req.points == 0) throw ConfigError("sweep needs at least one point");
  if (req.to < req.from) throw ConfigError("sweep range must be ascending");

  ReadoutParams pinned;
  pinned.omega_q = req.f_GHz ? units::ghz_to_rad_per_ns(*req.f_GHz)
                             : 0.5 * (entry.band.omega_min + entry.band.omega_max);
  const double amp = req.amplitude ? *req.amplitude : 0.5 * (cfg.grid.amp_min + cfg.grid.amp_max);
  pinned.B0 = amp * q.amp_ref;
  pinned.t_p = req.tp_ns ? *req.tp_ns : 0.5 * (cfg.grid.tp_min + cfg.grid.tp_max);
  pinned.t_r = total - pinned.t_p;

  auto check_point = [&](const ReadoutParams& p) {
    if (!entry.band.contains(p.omega_q))
      throw ConfigError("sweep frequency " + fmt(units::rad_per_ns_to_ghz(p.omega_q)) +
                        " GHz is outside the search band of qubit " + to_string(entry.id));
    if (p.B0 < 0.0) throw ConfigError("sweep amplitude must be >= 0");
    if (!(p.t_p > 0.0) || p.t_p > total) throw ConfigError("sweep pulse length must lie in (0, total]");
  };
  check_point(pinned);

  const std::vector<double> values =
      req.from == req.to ? std::vector<double>{req.from} : linspace(req.from, req.to, req.points);
  SweepResult out;
  out.pinned = pinned;
  CostEvaluator evaluator(cfg.model);
  for (double v : values) {
    ReadoutParams p = pinned;
    switch (req.axis) {
      case SweepAxis::Frequency: p.omega_q = units::ghz_to_rad_per_ns(v); break;
      case SweepAxis::Amplitude: p.B0 = v * q.amp_ref; break;
      case SweepAxis::Length:
        p.t_p = v;
        p.t_r = total - v;
        break;
    }
    check_point(p);
    out.rows.push_back({v, p, p.B0 / q.amp_ref, evaluator.evaluate(q, p, {})});
  }
  out.trajectory = field_pair(q, pinned, cfg.model.dt, cfg.model.pole_guard);
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "value,f_q_GHz,amplitude,B0,t_p_ns,t_r_ns,chi_MHz,snr,separation,relaxation,photon,n_max,mist,coupling,"
         "total,feasible\n";
  for (const auto& r : sweep.rows) {
    const auto& c = r.cost;
    out << fmt(r.value) << ',' << fmt(units::rad_per_ns_to_ghz(r.params.omega_q)) << ',' << fmt(r.amplitude) << ','
        << fmt(r.params.B0) << ',' << fmt(r.params.t_p) << ',' << fmt(r.params.t_r) << ','
        << fmt(units::rad_per_ns_to_mhz(c.chi)) << ',' << fmt(c.snr) << ',' << fmt(c.separation) << ','
        << fmt(c.relaxation) << ',' << fmt(c.photon) << ',' << fmt(c.n_max) << ',' << fmt(c.mist) << ','
        << fmt(c.coupling) << ',' << fmt(c.total) << ',' << (c.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const FieldTrajectory<double>& traj) {
  std::ostringstream out;
  out << "t_ns,re_beta0,im_beta0,re_beta1,im_beta1,n0,n1\n";
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    const auto b0 = traj.beta0(k);
    const auto b1 = traj.beta1(k);
    out << fmt(traj.time(k)) << ',' << fmt(b0.real()) << ',' << fmt(b0.imag()) << ',' << fmt(b1.real()) << ','
        << fmt(b1.imag()) << ',' << fmt(std::norm(b0)) << ',' << fmt(std::norm(b1)) << '\n';
  }
  return out.str();
}

int cmd_sweep(const RunManifest& m, const SweepRequest& request, std::ostream& log) {
  return guarded(log, [&] {
    const DeviceGraph graph = load_device_file(m.device);
    const OptimizerConfig cfg = resolve_config(m);
    const SweepResult sweep = run_sweep(graph, cfg, request);
    ensure_out_dir(m.out);
    write_text_file(m.out / "sweep.csv", sweep_csv(sweep));
    write_text_file(m.out / "trajectory.csv", trajectory_csv(sweep.trajectory));
    json manifest = manifest_json("sweep", m, graph, cfg);
    const char* axis = request.axis == SweepAxis::Frequency   ? "frequency"
                       : request.axis == SweepAxis::Amplitude ? "amplitude"
                                                              : "length";
    manifest["sweep"] = {{"qubit", {request.qubit.row, request.qubit.col}},
                         {"axis", axis},
                         {"from", request.from},
                         {"to", request.to},
                         {"points", request.points},
                         {"pinned_f_q_GHz", units::rad_per_ns_to_ghz(sweep.pinned.omega_q)},
                         {"pinned_B0", sweep.pinned.B0},
                         {"pinned_t_p_ns", sweep.pinned.t_p}};
    write_text_file(m.out / "manifest.json", manifest.dump(2) + "\n");
    log << "sweep rows: " << sweep.rows.size() << '\n';
    return kExitOk;
  });
}

int cmd_benchmark(const RunManifest& m, const std::filesystem::path& results_path, BenchmarkConfig bench,
                  std::ostream& log) {
  return guarded(log, [&] {
    const DeviceGraph graph = load_device_file(m.device);
    const OptimizerConfig cfg = resolve_config(m);
    const OptimizationResult result = load_results_file(results_path);
    if (result.qubits.size() != graph.size())
      throw ConfigError("results file covers " + std::to_string(result.qubits.size()) + " qubits, device has " +
                        std::to_string(graph.size()));
    for (const auto& r : result.qubits) {
      if (!graph.contains(r.id.row, r.id.col))
        throw ConfigError("results file names qubit " + to_string(r.id) + " which is not in the device");
      if (graph.at(r.id).id.role != r.id.role)
        throw ConfigError("results file role differs from device for qubit " + to_string(r.id));
    }
    bench.seed = m.seed;
    bench.threads = m.threads;
    bench.validate();
    const BenchmarkReport report = run_benchmark(graph, result, bench);

    ensure_out_dir(m.out);
    write_text_file(m.out / "benchmark_report.json", benchmark_summary_json(report));
    write_text_file(m.out / "per_qubit_errors.csv", per_qubit_errors_csv(report));
    write_text_file(m.out / "cross_fidelity.csv", cross_fidelity_csv(report));
    write_text_file(m.out / "cross_fidelity_hist.csv", cross_fidelity_histogram_csv(report));
    write_text_file(m.out / "error_budget.csv", error_budget_csv(report));
    json manifest = manifest_json("benchmark", m, graph, cfg);
    manifest["results_path"] = results_path.string();
    manifest["benchmark"] = {{"n_states", bench.n_states},
                             {"n_shots", bench.n_shots},
                             {"prep_error", bench.prep_error},
                             {"subset", std::string(to_string(bench.subset))}};
    write_text_file(m.out / "manifest.json", manifest.dump(2) + "\n");

    log << "benchmarked qubits: " << report.qubits.size() << "\nmean error: " << fmt(report.budget.observed)
        << "\nmean |F_ij|: " << fmt(report.fidelity.mean_abs_off_diagonal()) << '\n';
    return kExitOk;
  });
}

int cmd_validate(const RunManifest& m, std::ostream& log) {
  return guarded(log, [&] {
    const DeviceGraph graph = load_device_file(m.device);
    const OptimizerConfig cfg = resolve_config(m);
    std::size_t measure = 0;
    for (const auto& e : graph.entries()) {
      if (e.id.role == Role::Measure) ++measure;
      cfg.grid.for_qubit(e).validate(e.band, cfg.model.total_time);
    }
    const std::size_t per_qubit = cfg.grid.n_freq * cfg.grid.n_amp * cfg.grid.n_tp;
    log << "device ok: " << graph.size() << " qubits (" << measure << " measure, " << graph.size() - measure
        << " data)\n";
    log << "grid points per qubit: " << per_qubit << ", total evaluations: " << per_qubit * graph.size() << '\n';
    log << "strategy: " << to_string(cfg.model.strategy) << '\n';
    return kExitOk;
  });
}

}  // namespace readout
