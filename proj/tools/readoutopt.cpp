// readoutopt: readout error models, snake optimizer and benchmark simulator.
//
//   readoutopt validate  --device dev.json [--opt-config opt.json]
//   readoutopt optimize  --device dev.json --opt-config opt.json --out runs/a
//   readoutopt sweep     --device dev.json --qubit 1 2 --axis frequency --from 5.9 --to 6.3
//   readoutopt benchmark --device dev.json --results runs/a/results.json --seed 7
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "readout/commands.hpp"
#include "readout/errors.hpp"

using namespace readout;

int main(int argc, char** argv) {
  CLI::App app{"Readout parameter optimization for coupled superconducting qubits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", READOUT_VERSION);

  RunManifest manifest;
  std::string strategy;
  auto add_common = [&](CLI::App* sub, bool need_opt) {
    sub->add_option("--device", manifest.device, "Device description (JSON)")->required();
    auto* opt = sub->add_option("--opt-config", manifest.opt_config, "Optimizer config (JSON)");
    if (need_opt) opt->required();
    sub->add_option("--strategy", strategy, "all-models or predictive-only (overrides config)");
    sub->add_option("--seed", manifest.seed, "RNG seed");
    sub->add_option("--threads", manifest.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", manifest.out, "Output directory");
  };

  auto* validate = app.add_subcommand("validate", "Check device and optimizer configs");
  add_common(validate, false);

  auto* optimize = app.add_subcommand("optimize", "Run the snake optimizer over the device");
  add_common(optimize, true);

  auto* sweep = app.add_subcommand("sweep", "Evaluate model terms along one parameter axis");
  add_common(sweep, false);
  SweepRequest req;
  std::vector<int> qubit;
  std::string axis;
  sweep->add_option("--qubit", qubit, "Qubit row col")->expected(2)->required();
  sweep->add_option("--axis", axis, "frequency, amplitude or length")->required();
  sweep->add_option("--from", req.from, "Axis start (GHz, dimensionless or ns)")->required();
  sweep->add_option("--to", req.to, "Axis end")->required();
  sweep->add_option("--points", req.points, "Number of points");
  sweep->add_option("--f-GHz", req.f_GHz, "Pinned qubit frequency");
  sweep->add_option("--amplitude", req.amplitude, "Pinned dimensionless amplitude");
  sweep->add_option("--tp-ns", req.tp_ns, "Pinned pulse length");

  auto* bench = app.add_subcommand("benchmark", "Monte Carlo readout benchmark of optimized parameters");
  add_common(bench, false);
  BenchmarkConfig bcfg;
  std::filesystem::path results;
  std::string subset = "all";
  bench->add_option("--results", results, "results.json from optimize")->required();
  bench->add_option("--states", bcfg.n_states, "Random initial states");
  bench->add_option("--shots", bcfg.n_shots, "Shots per state");
  bench->add_option("--prep-error", bcfg.prep_error, "State preparation flip probability");
  bench->add_option("--subset", subset, "all or measure-only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!strategy.empty()) manifest.strategy = strategy_from_string(strategy);
    if (*sweep) {
      req.qubit = QubitId{qubit[0], qubit[1], Role::Data};
      req.axis = sweep_axis_from_string(axis);
    }
    if (*bench) bcfg.subset = subset_from_string(subset);
  } catch (const ConfigError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*validate) return cmd_validate(manifest, std::cout);
  if (*optimize) return cmd_optimize(manifest, std::cout);
  if (*sweep) return cmd_sweep(manifest, req, std::cout);
  return cmd_benchmark(manifest, results, bcfg, std::cout);
}
