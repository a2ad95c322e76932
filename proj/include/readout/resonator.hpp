#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "readout/device.hpp"
#include "readout/errors.hpp"
#include "readout/params.hpp"

namespace readout {

template <typename Scalar>
using ComplexSamples = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealSamples = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Constant drive `amplitude` until time `end`.
template <typename Scalar>
struct DriveSegment {
  Scalar end;
  Scalar amplitude;
};

/// Rectangular readout pulse: B0 on [0, t_p), then free ringdown for t_r.
template <typename Scalar>
struct PulseShape {
  Scalar B0 = 0;
  Scalar t_p = 0;
  Scalar t_r = 0;

  Scalar total() const { return t_p + t_r; }

  static PulseShape with_total(Scalar B0, Scalar t_p, Scalar total) { return {B0, t_p, total - t_p}; }

  std::vector<DriveSegment<Scalar>> segments() const { return {{t_p, B0}, {t_p + t_r, Scalar(0)}}; }
};

/// Resonator fields for both prepared qubit states on a shared uniform grid
/// t_k = k * dt, k = 0..N.
template <typename Scalar>
struct FieldTrajectory {
  Scalar dt = 0;
  ComplexSamples<Scalar> beta0;  // prepared |0>, drive detuning +chi
  ComplexSamples<Scalar> beta1;  // prepared |1>, drive detuning -chi
  Scalar chi = 0;

  Eigen::Index size() const { return beta0.size(); }
  Scalar time(Eigen::Index k) const { return dt * Scalar(k); }
  Scalar duration() const { return dt * Scalar(size() - 1); }
};

/// Dispersive shift chi(omega_q) for coupling g. Poles at omega_q = omega_r
/// and omega_q - omega_r = -alpha; within `guard` of either is a DomainError.
template <typename Scalar>
Scalar dispersive_shift(Scalar g, Scalar alpha, Scalar omega_q, Scalar omega_r, Scalar guard) {
  const Scalar detuning = omega_q - omega_r;
  if (std::abs(detuning) < guard || std::abs(detuning + alpha) < guard || detuning == Scalar(0) ||
      detuning + alpha == Scalar(0)) {
    std::ostringstream msg;
    msg << "dispersive shift pole: omega_q - omega_r = " << detuning << " rad/ns with alpha = " << alpha;
    throw DomainError(msg.str());
  }
  return g * g * alpha / (detuning * detuning * (Scalar(1) + alpha / detuning)) *
         (Scalar(1) - detuning / omega_q);
}

inline double dispersive_shift(const QubitPhysical& q, double omega_q, double guard = 0.0) {
  return dispersive_shift(coupling_strength(q, omega_q), q.alpha, omega_q, q.omega_r, guard);
}

namespace detail {

/// Classical RK4 applied to d(beta)/dt = sqrt(kappa) B + lambda beta with B
/// constant over the step collapses to beta <- R(z) beta + h Q(z) sqrt(kappa) B,
/// z = lambda h, with R the RK4 stability polynomial.
template <typename Scalar>
struct Rk4LinearStep {
  std::complex<Scalar> growth;  // R(z)
  std::complex<Scalar> drive;   // h Q(z)

  Rk4LinearStep(std::complex<Scalar> lambda, Scalar h) {
    const std::complex<Scalar> z = lambda * h;
    const std::complex<Scalar> q =
        Scalar(1) + z * (Scalar(1) / Scalar(2) + z * (Scalar(1) / Scalar(6) + z / Scalar(24)));
    growth = Scalar(1) + z * q;
    drive = h * q;
  }
};

template <typename Scalar>
void check_step(Scalar dt, Scalar delta, Scalar kappa) {
  if (!(dt > Scalar(0))) throw StepSizeError("time step must be positive");
  if (!(kappa > Scalar(0))) throw DomainError("resonator linewidth must be positive");
  Scalar limit = Scalar(1) / kappa;
  if (delta != Scalar(0)) limit = std::min(limit, Scalar(1) / std::abs(delta));
  limit /= Scalar(10);
  if (dt > limit * (Scalar(1) + Scalar(1e-12))) {
    std::ostringstream msg;
    msg << "time step " << dt << " ns exceeds min(1/kappa, 1/|delta|)/10 = " << limit << " ns";
    throw StepSizeError(msg.str());
  }
}

}  // namespace detail

namespace detail {

// Advances N independent branches (same drive, different detuning) in one
// loop so their recurrences overlap in the pipeline. Each branch sees exactly
// the same operations as a single-branch solve.
template <typename Scalar, std::size_t N, typename OutDerived>
void solve_branches(std::span<const DriveSegment<Scalar>> drive, const std::array<Scalar, N>& delta, Scalar kappa,
                    Scalar dt, const std::array<Eigen::MatrixBase<OutDerived>*, N>& out) {
  for (Scalar d : delta) check_step(dt, d, kappa);
  if (drive.empty()) throw DomainError("drive envelope has no segments");
  const Scalar total = drive.back().end;
  const Scalar steps_real = total / dt;
  const Eigen::Index steps = static_cast<Eigen::Index>(std::llround(steps_real));
  if (steps < 1 || std::abs(steps_real - Scalar(steps)) > Scalar(1e-6)) {
    std::ostringstream msg;
    msg << "total duration " << total << " ns is not a positive multiple of dt = " << dt << " ns";
    throw StepSizeError(msg.str());
  }

  const Scalar sqrt_kappa = std::sqrt(kappa);
  std::array<std::complex<Scalar>, N> lambda;
  std::array<std::complex<Scalar>, N> growth;
  std::array<std::complex<Scalar>, N> gain;
  std::array<std::complex<Scalar>, N> beta;
  std::array<std::complex<Scalar>*, N> dst;
  for (std::size_t b = 0; b < N; ++b) {
    lambda[b] = std::complex<Scalar>(-kappa / Scalar(2), delta[b]);
    const Rk4LinearStep<Scalar> full(lambda[b], dt);
    growth[b] = full.growth;
    gain[b] = full.drive;
    beta[b] = std::complex<Scalar>(0, 0);
    out[b]->derived().resize(steps + 1);
    dst[b] = out[b]->derived().data();
    dst[b][0] = beta[b];
  }
  const Scalar eps = dt * Scalar(1e-9);

  std::size_t seg = 0;
  Eigen::Index k = 0;
  while (k < steps) {
    const Scalar t = dt * Scalar(k);
    while (seg + 1 < drive.size() && drive[seg].end <= t + eps) ++seg;
    // Run of whole steps that stay inside the current segment.
    Eigen::Index run_end = steps;
    if (seg + 1 < drive.size()) {
      run_end = k;
      while (run_end < steps && drive[seg].end >= dt * Scalar(run_end + 1) - eps) ++run_end;
    }
    const Scalar b_in = sqrt_kappa * drive[seg].amplitude;
    std::array<std::complex<Scalar>, N> push;
    for (std::size_t b = 0; b < N; ++b) push[b] = gain[b] * b_in;
    for (; k < run_end; ++k) {
      for (std::size_t b = 0; b < N; ++b) {
        beta[b] = growth[b] * beta[b] + push[b];
        dst[b][k + 1] = beta[b];
      }
    }
    if (k == steps) break;

    // Step k straddles one or more segment ends: split it there.
    Scalar ts = dt * Scalar(k);
    const Scalar t_next = dt * Scalar(k + 1);
    std::size_t s = seg;
    while (ts < t_next - eps) {
      while (s + 1 < drive.size() && drive[s].end <= ts + eps) ++s;
      const Scalar stop = (s + 1 < drive.size()) ? std::min(drive[s].end, t_next) : t_next;
      for (std::size_t b = 0; b < N; ++b) {
        const Rk4LinearStep<Scalar> part(lambda[b], stop - ts);
        beta[b] = part.growth * beta[b] + part.drive * (sqrt_kappa * drive[s].amplitude);
      }
      ts = stop;
    }
    for (std::size_t b = 0; b < N; ++b) dst[b][k + 1] = beta[b];
    ++k;
  }
}

}  // namespace detail

/// Fixed-step RK4 solution of d(beta)/dt = sqrt(kappa) B(t) + (i delta - kappa/2) beta,
/// beta(0) = 0, for a piecewise-constant drive. Steps that straddle a drive
/// discontinuity are split there so the sample grid stays uniform.
template <typename Scalar, typename OutDerived>
void solve_field_into(std::span<const DriveSegment<Scalar>> drive, Scalar delta, Scalar kappa, Scalar dt,
                      Eigen::MatrixBase<OutDerived>& out) {
  detail::solve_branches<Scalar, 1, OutDerived>(drive, {delta}, kappa, dt, {&out});
}

template <typename Scalar>
ComplexSamples<Scalar> solve_field(const PulseShape<Scalar>& pulse, Scalar delta, Scalar kappa, Scalar dt) {
  if (!(pulse.t_p > Scalar(0)) || !(pulse.t_r >= Scalar(0)))
    throw DomainError("pulse needs t_p > 0 and t_r >= 0");
  const auto segments = pulse.segments();
  ComplexSamples<Scalar> out;
  solve_field_into(std::span<const DriveSegment<Scalar>>(segments), delta, kappa, dt, out);
  return out;
}

/// Solves both prepared-state branches at drive detuning +chi / -chi, which
/// centres the drive between the two dressed resonator frequencies.
inline void field_pair_into(FieldTrajectory<double>& out, const QubitPhysical& q, const ReadoutParams& params,
                            double dt, double pole_guard = 0.0) {
  if (!(params.t_p > 0.0) || !(params.t_r >= 0.0)) throw DomainError("pulse needs t_p > 0 and t_r >= 0");
  const double chi = dispersive_shift(q, params.omega_q, pole_guard);
  const DriveSegment<double> segments[2] = {{params.t_p, params.B0}, {params.t_p + params.t_r, 0.0}};
  const std::span<const DriveSegment<double>> drive(segments);
  out.dt = dt;
  out.chi = chi;
  detail::solve_branches<double, 2, ComplexSamples<double>>(drive, {chi, -chi}, q.kappa, dt, {&out.beta0, &out.beta1});
}

inline FieldTrajectory<double> field_pair(const QubitPhysical& q, const ReadoutParams& params, double dt,
                                          double pole_guard = 0.0) {
  FieldTrajectory<double> out;
  field_pair_into(out, q, params, dt, pole_guard);
  return out;
}

/// Photon numbers |beta|^2 sample by sample.
template <typename Derived>
auto photon_number(const Eigen::MatrixBase<Derived>& beta) {
  return beta.cwiseAbs2();
}

/// AC-Stark shifted qubit frequency, linear in the |1> branch photon number.
template <typename Scalar>
RealSamples<Scalar> stark_trajectory(Scalar omega_q0, Scalar chi, const FieldTrajectory<Scalar>& traj) {
  return (Scalar(2) * chi * traj.beta1.cwiseAbs2().array() + omega_q0).matrix();
}

template <typename Scalar>
Scalar max_photon(const FieldTrajectory<Scalar>& traj) {
  if (traj.size() == 0) return Scalar(0);
  return std::max(traj.beta0.cwiseAbs2().maxCoeff(), traj.beta1.cwiseAbs2().maxCoeff());
}

/// Mean photon number left at the end of the readout window.
template <typename Scalar>
Scalar residual_photon(const FieldTrajectory<Scalar>& traj) {
  if (traj.size() == 0) return Scalar(0);
  const Eigen::Index last = traj.size() - 1;
  return (std::norm(traj.beta0(last)) + std::norm(traj.beta1(last))) / Scalar(2);
}

}  // namespace readout
