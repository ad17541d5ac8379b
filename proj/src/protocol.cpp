#include "wva/protocol.hpp"

#include <cmath>
#include <numbers>

namespace wva {

std::pair<MeterState, double> postselect(const PureState& state, double theta) {
  if (!(theta > 0.0) || theta > std::numbers::pi / 2.0) {
    throw ConfigError("params.theta_postselect: must lie in (0, pi/2]");
  }
  const int nc = state.layout.fock_cutoff;
  const double c = std::cos(theta), s = std::sin(theta);
  // <theta_down| psi> over the spin factor: s * up-block + c * down-block.
  Vector meter = s * state.amplitudes.segment(0, nc) + c * state.amplitudes.segment(nc, nc);
  const double p = meter.squaredNorm();
  if (p < 1e-30) {
    throw ZeroProbability("post-selection probability " + std::to_string(p) +
                          " below 1e-30");
  }
  meter /= std::sqrt(p);
  return {MeterState{state.layout, std::move(meter)}, p};
}

namespace {

KickResult kick_from(const ExperimentParams& p, const Operator& u_eff,
                     const MeterState& meter_in, int kick_index, double cumulative_p) {
  const PureState in = with_spin(kSpinUp, meter_in);
  PureState evolved{p.layout, u_eff.entries * in.amplitudes};
  auto [meter, pf] = postselect(evolved, p.theta_postselect);
  const double a_w = p.weak_value();
  KickResult r{std::move(meter), pf, cumulative_p * pf, a_w,
               double(kick_index) * p.zassenhaus_z * p.gamma() * a_w, kick_index};
  return r;
}

}  // namespace

KickResult single_kick(const ExperimentParams& p) {
  p.validate();
  const double margin = weak_regime_margin(p);
  if (margin >= 0.1) {
    throw WeakRegimeViolation("weak-coupling margin gamma*|A_w|*spread = " +
                              std::to_string(margin) + " >= 0.1");
  }
  const Operator u = effective_unitary(p, p.zassenhaus_z);
  return kick_from(p, u, meter_vacuum(p.layout), 1, 1.0);
}

std::vector<KickResult> flywheel_trajectory(const ExperimentParams& p, int n_kicks) {
  p.validate();
  if (n_kicks < 1) throw ConfigError("flywheel.n_kicks: must be >= 1");
  const double margin = weak_regime_margin(p);
  if (margin >= 0.1) {
    throw WeakRegimeViolation("weak-coupling margin gamma*|A_w|*spread = " +
                              std::to_string(margin) + " >= 0.1");
  }
  const double alpha_n = std::abs(double(n_kicks) * p.zassenhaus_z * p.gamma() * p.weak_value());
  if (alpha_n * alpha_n > p.layout.fock_cutoff / 4.0) {
    throw TruncationOverflow("flywheel amplitude |N alpha_1|^2 = " +
                             std::to_string(alpha_n * alpha_n) + " exceeds fock_cutoff/4");
  }

  const Operator u = effective_unitary(p, p.zassenhaus_z);
  std::vector<KickResult> out;
  MeterState meter = meter_vacuum(p.layout);
  double cumulative = 1.0;
  for (int k = 1; k <= n_kicks; ++k) {
    KickResult r = kick_from(p, u, meter, k, cumulative);
    cumulative = r.cumulative_p;
    meter = r.meter_state;
    out.push_back(std::move(r));
  }
  return out;
}

KickResult flywheel(const ExperimentParams& p, int n_kicks) {
  auto traj = flywheel_trajectory(p, n_kicks);
  return traj.back();
}

double oracle_kick_fidelity(const ExperimentParams& p, const MeterState& start, int steps) {
  const Operator u_eff = effective_unitary(p, p.zassenhaus_z);
  const PureState in = with_spin(kSpinUp, start);
  auto [m_eff, p_eff] = postselect(PureState{p.layout, u_eff.entries * in.amplitudes},
                                   p.theta_postselect);
  auto [m_or, p_or] = postselect(oracle_apply(p, steps, in), p.theta_postselect);
  (void)p_eff;
  (void)p_or;
  return fidelity(m_eff, m_or);
}

}  // namespace wva
