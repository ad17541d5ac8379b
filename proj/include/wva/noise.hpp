#pragma once

// Open-system dynamics of the kicked ion: qubit thermal damping (and an
// optional qubit dephasing channel) under the interaction Hamiltonian, with
// periodic instantaneous pulses, a fidelity-vs-time data product, and a
// bisection calibration of the unknown noise rate.

#include <utility>
#include <vector>

#include "wva/model.hpp"

namespace wva {

struct NoiseParams {
  double damp_rate = 0.0;      // Gamma, qubit thermal damping rate (rad/s)
  double nbar = 0.0;           // bath occupation
  double dephase_rate = 0.0;   // qubit dephasing rate (rad/s), sigma_z channel
  double integrator_step = 0.0;  // seconds; 0 resolves to t*/1e4

  double resolved_step(const ExperimentParams& p) const;
  void validate(const ExperimentParams& p) const;
};

// exp(-i pi sigma_z / 2) = diag(-i, i)
Eigen::Matrix2cd pi_z_pulse();

struct PDDSchedule {
  int pulse_count = 0;
  double window = 0.0;  // seconds; 0 resolves to 1.1125 * t*
  Eigen::Matrix2cd pulse_spin = pi_z_pulse();

  double resolved_window(const ExperimentParams& p) const;
  // Midpoints of equal subintervals: t_j = (j + 1/2) window / pulse_count.
  std::vector<double> pulse_times(const ExperimentParams& p) const;
};

struct TrajectoryPoint {
  double t;
  DensityOp rho;
};

// Integrates
//   drho/dt = -i [V_I(t), rho] + G(n+1) D[sigma-] rho + G n D[sigma+] rho
//             + G_phi (sigma_z rho sigma_z - rho)
// by fixed-step RK4, applying the pulse unitary instantaneously at the
// schedule times. Trace, Hermiticity and positivity are checked at every
// sample point; a breach throws NonPhysicalState.
std::vector<TrajectoryPoint> lindblad_evolve(const DensityOp& initial,
                                             const ExperimentParams& p,
                                             const NoiseParams& noise,
                                             const PDDSchedule& schedule, double t_end,
                                             int n_samples = 65);

// Closed-system pure evolution of |up,0> at the given times (no noise, no
// pulses); the fidelity target.
std::vector<PureState> closed_system_states(const ExperimentParams& p,
                                            const std::vector<double>& times,
                                            double step);

// (t, fidelity) sampled uniformly on [0, window], fidelity taken against the
// closed-system target started from |up,0>.
std::vector<std::pair<double, double>> fidelity_curve(const ExperimentParams& p,
                                                      const NoiseParams& noise,
                                                      const PDDSchedule& schedule,
                                                      int samples);

struct DegradedKick {
  MeterDensity meter;        // post-selected meter state at t*
  double p_f;                // post-selection probability
  Complex mean_a;            // <a> of the meter
  double amplification;      // |mean_a| / |z gamma|, the achieved weak value
  double ideal_weak_value;   // cot(theta)
};

// One kick evolved as an open system: the effective kick generator spread
// uniformly over [0, t*] plus the configured bath (and pulses, if any),
// followed by the usual post-selection. Reports how much of the ideal
// amplification survives the noise.
DegradedKick degraded_kick(const ExperimentParams& p, const NoiseParams& noise,
                           const PDDSchedule& schedule);

enum class NoiseChannel { damping, dephasing };

// Bisection on the chosen rate (nbar fixed at 0) until the pulse-free fidelity
// at t_eval matches target_fidelity within 1e-4. Throws CalibrationFailed if
// no rate in [1e-3, 1e6] rad/s brackets the target.
NoiseParams calibrate_damping(double target_fidelity, const ExperimentParams& p,
                              double t_eval, NoiseChannel channel = NoiseChannel::damping,
                              double integrator_step = 0.0);

}  // namespace wva
