#pragma once

namespace readout {

/// The optimizable readout triple plus the ringdown it implies under a fixed
/// total readout time.
struct ReadoutParams {
  double omega_q = 0.0;  // qubit frequency during readout, rad/ns
  double B0 = 0.0;       // drive amplitude, sqrt(photons/ns)
  double t_p = 0.0;      // pulse length, ns
  double t_r = 0.0;      // ringdown length, ns

  double total() const { return t_p + t_r; }

  static ReadoutParams with_total(double omega_q, double B0, double t_p, double total) {
    return {omega_q, B0, t_p, total - t_p};
  }

  friend bool operator==(const ReadoutParams&, const ReadoutParams&) = default;
};

}  // namespace readout
