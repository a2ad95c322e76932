#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "readout/device.hpp"
#include "readout/errors.hpp"
#include "readout/params.hpp"
#include "readout/quadrature.hpp"
#include "readout/resonator.hpp"
#include "readout/units.hpp"

namespace readout {

/// Constants of the photon-number ceiling n_th = x - sqrt(x), x = a exp(b (omega_q - omega_r)).
struct MistParams {
  double a = 1.0;
  double b = 0.0;  // 1/(rad/ns)
};

enum class CollisionChannel { Swap01_10, Up11_20, Up11_02, Hi12_21 };
inline constexpr std::array<CollisionChannel, 4> kCollisionChannels = {
    CollisionChannel::Swap01_10, CollisionChannel::Up11_20, CollisionChannel::Up11_02,
    CollisionChannel::Hi12_21};

std::string_view to_string(CollisionChannel channel);

/// One Lorentzian term of the coupling penalty.
struct CollisionSpec {
  CollisionChannel channel = CollisionChannel::Swap01_10;
  double center = 0.0;     // rad/ns
  double width = 0.0;      // FWHM, rad/ns
  double amplitude = 0.0;  // dimensionless
};

/// Width and amplitude of the Lorentzian for one channel.
struct CollisionShape {
  double width = 0.0;
  double amplitude = 0.0;
};

/// Lorentzian shapes per channel, separately for nearest and next-nearest
/// neighbors.
struct CollisionModel {
  std::array<CollisionShape, 4> nearest{};
  std::array<CollisionShape, 4> next_nearest{};

  /// 2*pi*30 MHz wide, resonance penalty 1 for nearest neighbors, half that
  /// for next-nearest neighbors.
  static CollisionModel defaults();
};

struct CostWeights {
  double separation = 1.0;
  double relaxation = 1.0;
  double photon = 1.0;
  double mist = 1.0;
  double coupling = 1.0;
};

enum class Strategy { PredictiveOnly, AllModels };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view text);

/// Everything evaluate_cost needs besides the qubit, the candidate and the
/// collision specs.
struct CostModel {
  CostWeights weights;
  MistParams mist;
  double mist_ceiling = 1.0;
  double mist_sharpness = 0.05;  // logistic width relative to n_th
  Strategy strategy = Strategy::AllModels;
  double total_time = 500.0;  // ns
  double dt = 0.1;            // ns
  double pole_guard = units::mhz_to_rad_per_ns(10.0);
};

struct CostBreakdown {
  double separation = 0.0;
  double relaxation = 0.0;
  double photon = 0.0;
  double mist = 0.0;
  double coupling = 0.0;
  double snr = 0.0;
  double t0 = 0.0;
  double n_max = 0.0;
  double chi = 0.0;
  double total = 0.0;
  bool feasible = true;
  std::string infeasible_reason;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

/// A neighbor whose parameters are already locked, with its grid distance
/// (1 = nearest, 2 = next-nearest).
struct LockedNeighbor {
  QubitPhysical physical;
  ReadoutParams params;
  int order = 1;
};

// ---------------------------------------------------------------------------
// Separation (signal-to-noise) model.

/// SNR = 2 eta kappa |int dbeta w|^2 / int |w|^2 for an arbitrary window w.
template <typename Scalar>
Scalar windowed_snr(const FieldTrajectory<Scalar>& traj, const ComplexSamples<Scalar>& window, Scalar eta,
                    Scalar kappa) {
  const ComplexSamples<Scalar> weighted = (traj.beta0 - traj.beta1).cwiseProduct(window);
  const Eigen::Index n = weighted.size();
  if (n < 2) return Scalar(0);
  const std::complex<Scalar> overlap =
      traj.dt * (weighted.sum() - Scalar(0.5) * (weighted(0) + weighted(n - 1)));
  const Scalar norm = trapezoid(window.cwiseAbs2(), traj.dt);
  if (norm == Scalar(0)) return Scalar(0);
  return Scalar(2) * eta * kappa * std::norm(overlap) / norm;
}

/// Matched filter w = dbeta^*: SNR = 2 eta kappa int |dbeta|^2.
template <typename Scalar>
Scalar snr(const FieldTrajectory<Scalar>& traj, Scalar eta, Scalar kappa) {
  return Scalar(2) * eta * kappa * trapezoid((traj.beta0 - traj.beta1).cwiseAbs2(), traj.dt);
}

/// 0.5 * erfc(sqrt(SNR) / 2). DomainError for negative SNR.
double separation_error(double snr);

/// Earliest time at which a running integral reaches half of its final value,
/// linearly interpolated between samples.
template <typename Derived>
typename Derived::Scalar half_crossing_time(const Eigen::MatrixBase<Derived>& cumulative,
                                            typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = cumulative.size();
  if (n == 0 || !(cumulative(n - 1) > Scalar(0))) throw DomainError("half-SNR time undefined for zero SNR");
  const Scalar half = cumulative(n - 1) / Scalar(2);
  Eigen::Index k = 0;
  while (cumulative(k) < half) ++k;
  if (k == 0) return Scalar(0);
  const Scalar lo = cumulative(k - 1);
  const Scalar hi = cumulative(k);
  return dt * (Scalar(k - 1) + (half - lo) / (hi - lo));
}

/// T0: earliest time at which the cumulative SNR reaches half its final value.
template <typename Scalar>
Scalar half_snr_time(const FieldTrajectory<Scalar>& traj, Scalar eta, Scalar kappa) {
  RealSamples<Scalar> cumulative;
  cumulative_trapezoid(((traj.beta0 - traj.beta1).cwiseAbs2() * (Scalar(2) * eta * kappa)).eval(), traj.dt,
                       cumulative);
  return half_crossing_time(cumulative, traj.dt);
}

// ---------------------------------------------------------------------------
// Relaxation, MIST and coupling models.

/// Integral of Gamma_1(omega_q(t)) over [0, t0] by the trapezoid rule on the
/// sample grid, with a partial last interval. DomainError if a needed sample
/// lies outside the Gamma_1 table or t0 is beyond the samples.
double relaxation_error(const Eigen::Ref<const Eigen::VectorXd>& stark, double dt, const Gamma1Table& gamma1,
                        double t0);

/// n_th = x - sqrt(x) with x = a exp(b (omega_q - omega_r)); DomainError for
/// omega_q <= omega_r.
double mist_threshold(double omega_q, double omega_r, const MistParams& p);

/// Logistic step ceiling / (1 + exp(-(n_max - n_th) / (sharpness n_th))).
double mist_penalty(double n_max, double n_th, double sharpness = 0.05, double ceiling = 1.0);

/// Four collision centers per locked neighbor j, with self anharmonicity
/// alpha_i: omega_j, omega_j + alpha_j, omega_j - alpha_i, omega_j + alpha_j - alpha_i.
std::vector<CollisionSpec> collision_specs(const QubitPhysical& self, std::span<const LockedNeighbor> locked,
                                           const CollisionModel& model);

/// Sum of Lorentzians c (gamma/2) pi / ((omega_q - center)^2 + gamma^2/4).
double coupling_error(double omega_q, std::span<const CollisionSpec> specs);

// ---------------------------------------------------------------------------
// Aggregate cost.

/// Reusable scratch space so repeated evaluations do not reallocate the
/// trajectories. One instance per thread.
class CostEvaluator {
 public:
  explicit CostEvaluator(const CostModel& model) : model_(model) {}

  /// Deterministic for fixed inputs. A domain error anywhere (dispersive pole,
  /// step size, Stark shift leaving the Gamma_1 table) yields total = +inf.
  CostBreakdown evaluate(const QubitPhysical& q, const ReadoutParams& params,
                         std::span<const CollisionSpec> specs);

  const CostModel& model() const { return model_; }
  const FieldTrajectory<double>& last_trajectory() const { return traj_; }

 private:
  CostModel model_;
  FieldTrajectory<double> traj_;
  Eigen::VectorXd cumulative_;
  Eigen::VectorXd stark_;
};

CostBreakdown evaluate_cost(const QubitPhysical& q, const ReadoutParams& params, const CostModel& model,
                            std::span<const CollisionSpec> specs = {});

}  // namespace readout
