#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "readout/device.hpp"
#include "readout/units.hpp"

namespace readout::testing {

inline std::filesystem::path source_dir() { return READOUT_SOURCE_DIR; }
inline std::filesystem::path device_d3() { return source_dir() / "configs" / "device_d3.json"; }
inline std::filesystem::path optimizer_cfg() { return source_dir() / "configs" / "optimizer.json"; }

/// Flat relaxation rate over a wide frequency span.
inline Gamma1Table flat_gamma1(double rate_per_us = 0.05, double f_lo_GHz = 3.0, double f_hi_GHz = 9.0) {
  Eigen::VectorXd omega(2);
  Eigen::VectorXd rate(2);
  omega << units::ghz_to_rad_per_ns(f_lo_GHz), units::ghz_to_rad_per_ns(f_hi_GHz);
  rate << units::per_us_to_per_ns(rate_per_us), units::per_us_to_per_ns(rate_per_us);
  return Gamma1Table(omega, rate);
}

inline QubitPhysical toy_qubit(double f_r_GHz = 4.7, double kappa_MHz = 4.0, double g_eff = 0.037,
                               double alpha_GHz = -0.2, double eta = 0.4) {
  QubitPhysical q;
  q.alpha = units::ghz_to_rad_per_ns(alpha_GHz);
  q.g_eff = g_eff;
  q.omega_r = units::ghz_to_rad_per_ns(f_r_GHz);
  q.eta = eta;
  q.kappa = units::mhz_to_rad_per_ns(kappa_MHz);
  q.gamma1 = flat_gamma1();
  q.amp_ref = 0.6;
  return q;
}

inline FrequencyBand band_GHz(double lo, double hi) {
  return {units::ghz_to_rad_per_ns(lo), units::ghz_to_rad_per_ns(hi)};
}

/// Closed-form solution of the driven, damped field for a square pulse of
/// length t_p followed by free decay, sampled at k dt.
inline Eigen::VectorXcd square_pulse_exact(double B0, double delta, double kappa, double t_p, double total,
                                           double dt) {
  const std::complex<double> lambda(-kappa / 2.0, delta);
  const std::complex<double> drive = std::sqrt(kappa) * B0;
  const auto n = static_cast<Eigen::Index>(std::llround(total / dt));
  Eigen::VectorXcd out(n + 1);
  const std::complex<double> at_tp = drive / lambda * (std::exp(lambda * t_p) - 1.0);
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    out(k) = t <= t_p ? drive / lambda * (std::exp(lambda * t) - 1.0) : at_tp * std::exp(lambda * (t - t_p));
  }
  return out;
}

}  // namespace readout::testing
