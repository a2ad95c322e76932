#include "readout/error_models.hpp"

#include <cmath>
#include <sstream>

namespace readout {

std::string_view to_string(CollisionChannel channel) {
  switch (channel) {
    case CollisionChannel::Swap01_10: return "swap01_10";
    case CollisionChannel::Up11_20: return "up11_20";
    case CollisionChannel::Up11_02: return "up11_02";
    case CollisionChannel::Hi12_21: return "hi12_21";
  }
  return "?";
}

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::AllModels ? "all-models" : "predictive-only";
}

Strategy strategy_from_string(std::string_view text) {
  if (text == "all-models" || text == "all" || text == "AllModels") return Strategy::AllModels;
  if (text == "predictive-only" || text == "predictive" || text == "PredictiveOnly")
    return Strategy::PredictiveOnly;
  throw ConfigError("unknown strategy '" + std::string(text) + "' (expected all-models or predictive-only)");
}

CollisionModel CollisionModel::defaults() {
  const double width = units::mhz_to_rad_per_ns(30.0);
  // Resonance value of one Lorentzian is 2 pi c / gamma.
  const double unit_amplitude = width / units::kTwoPi;
  CollisionModel m;
  for (std::size_t i = 0; i < 4; ++i) {
    m.nearest[i] = {width, unit_amplitude};
    m.next_nearest[i] = {width, 0.5 * unit_amplitude};
  }
  return m;
}

double separation_error(double snr) {
  if (snr < 0.0 || std::isnan(snr)) throw DomainError("separation error needs SNR >= 0");
  return 0.5 * std::erfc(std::sqrt(snr) / 2.0);
}

double relaxation_error(const Eigen::Ref<const Eigen::VectorXd>& stark, double dt, const Gamma1Table& gamma1,
                        double t0) {
  if (!(t0 >= 0.0)) throw DomainError("relaxation window must be non-negative");
  if (t0 == 0.0) return 0.0;
  const Eigen::Index n = stark.size();
  const double pos = t0 / dt;
  Eigen::Index full = static_cast<Eigen::Index>(std::floor(pos));
  double frac = pos - static_cast<double>(full);
  if (full >= n - 1) {
    if (full > n - 1 || frac > 1e-9) throw DomainError("relaxation window extends past the trajectory");
    full = n - 1;
    frac = 0.0;
  }
  Eigen::Index hint = 0;
  auto rate = [&](Eigen::Index k) {
    if (auto r = gamma1.lookup(stark(k), hint)) return *r;
    return gamma1(stark(k));  // throws with the offending frequency
  };
  double sum = 0.0;
  double prev = rate(0);
  for (Eigen::Index k = 1; k <= full; ++k) {
    const double cur = rate(k);
    sum += 0.5 * dt * (prev + cur);
    prev = cur;
  }
  if (frac > 0.0) {
    const double next = rate(full + 1);
    const double tail = frac * dt;
    const double at_t0 = prev + frac * (next - prev);
    sum += 0.5 * tail * (prev + at_t0);
  }
  return sum;
}

double mist_threshold(double omega_q, double omega_r, const MistParams& p) {
  if (!(omega_q > omega_r)) throw DomainError("MIST threshold is only defined for omega_q > omega_r");
  const double x = p.a * std::exp(p.b * (omega_q - omega_r));
  return x - std::sqrt(x);
}

double mist_penalty(double n_max, double n_th, double sharpness, double ceiling) {
  if (!(n_th > 0.0)) return ceiling;
  return ceiling / (1.0 + std::exp(-(n_max - n_th) / (sharpness * n_th)));
}

std::vector<CollisionSpec> collision_specs(const QubitPhysical& self, std::span<const LockedNeighbor> locked,
                                           const CollisionModel& model) {
  std::vector<CollisionSpec> specs;
  specs.reserve(4 * locked.size());
  for (const auto& n : locked) {
    if (n.order != 1 && n.order != 2) continue;
    const auto& shapes = n.order == 1 ? model.nearest : model.next_nearest;
    const double w_j = n.params.omega_q;
    const double a_j = n.physical.alpha;
    const double a_i = self.alpha;
    const std::array<double, 4> centers = {w_j, w_j + a_j, w_j - a_i, w_j + a_j - a_i};
    for (std::size_t c = 0; c < 4; ++c)
      specs.push_back({kCollisionChannels[c], centers[c], shapes[c].width, shapes[c].amplitude});
  }
  return specs;
}

double coupling_error(double omega_q, std::span<const CollisionSpec> specs) {
  double sum = 0.0;
  for (const auto& s : specs) {
    const double d = omega_q - s.center;
    sum += s.amplitude * (s.width / 2.0) * std::numbers::pi / (d * d + s.width * s.width / 4.0);
  }
  return sum;
}

namespace {

CostBreakdown infeasible(CostBreakdown b, const char* reason) {
  b.feasible = false;
  b.total = std::numeric_limits<double>::infinity();
  b.infeasible_reason = reason;
  return b;
}

}  // namespace

CostBreakdown CostEvaluator::evaluate(const QubitPhysical& q, const ReadoutParams& params,
                                      std::span<const CollisionSpec> specs) {
  CostBreakdown out;
  try {
    field_pair_into(traj_, q, params, model_.dt, model_.pole_guard);
  } catch (const DomainError& err) {
    return infeasible(out, err.what());
  }
  out.chi = traj_.chi;

  const double scale = 2.0 * q.eta * q.kappa;
  cumulative_trapezoid((traj_.beta0 - traj_.beta1).cwiseAbs2(), traj_.dt, cumulative_);
  cumulative_ *= scale;
  out.snr = cumulative_(cumulative_.size() - 1);
  out.separation = separation_error(out.snr);
  out.t0 = out.snr > 0.0 ? half_crossing_time(cumulative_, traj_.dt) : 0.0;

  // Stark-shifted frequency is only needed up to T0.
  try {
    const Eigen::Index needed =
        std::min<Eigen::Index>(traj_.size(), static_cast<Eigen::Index>(std::floor(out.t0 / traj_.dt)) + 2);
    stark_ = (2.0 * traj_.chi * traj_.beta1.head(needed).cwiseAbs2().array() + params.omega_q).matrix();
    out.relaxation = relaxation_error(stark_, traj_.dt, q.gamma1, out.t0);
  } catch (const DomainError& err) {
    return infeasible(out, err.what());
  }

  out.photon = residual_photon(traj_);
  out.n_max = max_photon(traj_);

  if (model_.strategy == Strategy::AllModels) {
    if (params.omega_q > q.omega_r) {
      const double n_th = mist_threshold(params.omega_q, q.omega_r, model_.mist);
      out.mist = mist_penalty(out.n_max, n_th, model_.mist_sharpness, model_.mist_ceiling);
    } else {
      out.mist = model_.mist_ceiling;
    }
    out.coupling = coupling_error(params.omega_q, specs);
  }

  const auto& w = model_.weights;
  out.total = w.separation * out.separation + w.relaxation * out.relaxation + w.photon * out.photon +
              w.mist * out.mist + w.coupling * out.coupling;
  return out;
}

CostBreakdown evaluate_cost(const QubitPhysical& q, const ReadoutParams& params, const CostModel& model,
                            std::span<const CollisionSpec> specs) {
  CostEvaluator evaluator(model);
  return evaluator.evaluate(q, params, specs);
}

}  // namespace readout
