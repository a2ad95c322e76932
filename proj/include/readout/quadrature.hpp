#pragma once

#include <Eigen/Core>

namespace readout {

/// Composite trapezoid rule on a uniform grid.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::MatrixBase<Derived>& y, typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = y.size();
  if (n < 2) return Scalar(0);
  return dt * (y.sum() - Scalar(0.5) * (y(0) + y(n - 1)));
}

/// Running trapezoid integral; out(0) = 0, out(k) = integral over [0, k*dt].
template <typename Derived, typename OutDerived>
void cumulative_trapezoid(const Eigen::MatrixBase<Derived>& y, typename Derived::Scalar dt,
                          Eigen::MatrixBase<OutDerived>& out) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = y.size();
  out.derived().resize(n);
  if (n == 0) return;
  out(0) = Scalar(0);
  const Scalar half_dt = Scalar(0.5) * dt;
  for (Eigen::Index k = 1; k < n; ++k) out(k) = out(k - 1) + half_dt * (y(k - 1) + y(k));
}

}  // namespace readout
