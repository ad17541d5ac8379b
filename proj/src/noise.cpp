#include "wva/noise.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace wva {

double NoiseParams::resolved_step(const ExperimentParams& p) const {
  return integrator_step > 0.0 ? integrator_step : p.t_star / 1e4;
}

void NoiseParams::validate(const ExperimentParams& p) const {
  if (damp_rate < 0.0) throw ConfigError("noise.damp_rate: must be >= 0");
  if (nbar < 0.0) throw ConfigError("noise.nbar: must be >= 0");
  if (dephase_rate < 0.0) throw ConfigError("noise.dephase_rate: must be >= 0");
  if (resolved_step(p) > p.t_star / 1e3) {
    throw ConfigError("noise.integrator_step: must be <= t_star / 1e3");
  }
}

Eigen::Matrix2cd pi_z_pulse() {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  u(kSpinUp, kSpinUp) = Complex(0.0, -1.0);
  u(kSpinDown, kSpinDown) = Complex(0.0, 1.0);
  return u;
}

double PDDSchedule::resolved_window(const ExperimentParams& p) const {
  return window > 0.0 ? window : 1.1125 * p.t_star;
}

std::vector<double> PDDSchedule::pulse_times(const ExperimentParams& p) const {
  std::vector<double> times;
  if (pulse_count <= 0) return times;
  const double w = resolved_window(p);
  const double spacing = w / double(pulse_count);
  times.reserve(pulse_count);
  for (int j = 0; j < pulse_count; ++j) times.push_back((double(j) + 0.5) * spacing);
  return times;
}

namespace {

struct MasterEq {
  Matrix v0, v1;  // V(t) = v0 + omega * t * v1
  double omega;
  Matrix sm, sp, sz;
  Matrix sp_sm, sm_sp;
  double g_down, g_up, g_phi;

  // coherent part: the interaction Hamiltonian to first order in the detuning
  MasterEq(const ExperimentParams& p, const NoiseParams& n)
      : MasterEq(p, n, Matrix(), false) {}

  // coherent part: a fixed Hamiltonian
  MasterEq(const ExperimentParams& p, const NoiseParams& n, Matrix h_const)
      : MasterEq(p, n, std::move(h_const), true) {}

 private:
  MasterEq(const ExperimentParams& p, const NoiseParams& n, Matrix h_const,
           bool constant_h) {
    const HilbertLayout& L = p.layout;
    const Matrix id_m = Matrix::Identity(L.fock_cutoff, L.fock_cutoff);
    if (constant_h) {
      v0 = std::move(h_const);
      v1 = Matrix::Zero(L.total_dim(), L.total_dim());
      omega = 0.0;
    } else {
      const Matrix a = fock_annihilation(L.fock_cutoff);
      const Matrix sp_a = Eigen::kroneckerProduct(spin_sigma_plus(), a);
      const Matrix sm_ad =
          Eigen::kroneckerProduct(spin_sigma_minus(), Matrix(a.adjoint()));
      v0 = p.lambda_coupling * (sp_a + sm_ad);
      v1 = p.lambda_coupling * Complex(0.0, 1.0) * (sm_ad - sp_a);
      omega = p.omega_g_effective();
    }
    sm = Eigen::kroneckerProduct(spin_sigma_minus(), id_m);
    sp = Eigen::kroneckerProduct(spin_sigma_plus(), id_m);
    sz = Eigen::kroneckerProduct(spin_sigma_z(), id_m);
    sp_sm = sp * sm;
    sm_sp = sm * sp;
    g_down = n.damp_rate * (n.nbar + 1.0);
    g_up = n.damp_rate * n.nbar;
    g_phi = n.dephase_rate;
  }

 public:

  Matrix rhs(double t, const Matrix& rho) const {
    const Matrix v = v0 + (omega * t) * v1;
    Matrix d = Complex(0.0, -1.0) * (v * rho - rho * v);
    if (g_down > 0.0) {
      d += g_down * (sm * rho * sp - 0.5 * (sp_sm * rho + rho * sp_sm));
    }
    if (g_up > 0.0) {
      d += g_up * (sp * rho * sm - 0.5 * (sm_sp * rho + rho * sm_sp));
    }
    if (g_phi > 0.0) {
      d += g_phi * (sz * rho * sz - rho);
    }
    return d;
  }

  void rk4(double t0, double t1, double max_step, Matrix& rho) const {
    if (t1 <= t0) return;
    const int n = std::max(1, int(std::ceil((t1 - t0) / max_step)));
    const double h = (t1 - t0) / double(n);
    for (int i = 0; i < n; ++i) {
      const double t = t0 + i * h;
      const Matrix k1 = rhs(t, rho);
      const Matrix k2 = rhs(t + 0.5 * h, Matrix(rho + 0.5 * h * k1));
      const Matrix k3 = rhs(t + 0.5 * h, Matrix(rho + 0.5 * h * k2));
      const Matrix k4 = rhs(t + h, Matrix(rho + h * k3));
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
};

struct SchroedingerEq {
  Matrix v0, v1;
  double omega;

  explicit SchroedingerEq(const ExperimentParams& p) {
    const Matrix a = fock_annihilation(p.layout.fock_cutoff);
    const Matrix sp_a = Eigen::kroneckerProduct(spin_sigma_plus(), a);
    const Matrix sm_ad = Eigen::kroneckerProduct(spin_sigma_minus(), Matrix(a.adjoint()));
    v0 = p.lambda_coupling * (sp_a + sm_ad);
    v1 = p.lambda_coupling * Complex(0.0, 1.0) * (sm_ad - sp_a);
    omega = p.omega_g_effective();
  }

  Vector rhs(double t, const Vector& psi) const {
    return Complex(0.0, -1.0) * (v0 * psi + (omega * t) * (v1 * psi));
  }

  void rk4(double t0, double t1, double max_step, Vector& psi) const {
    if (t1 <= t0) return;
    const int n = std::max(1, int(std::ceil((t1 - t0) / max_step)));
    const double h = (t1 - t0) / double(n);
    for (int i = 0; i < n; ++i) {
      const double t = t0 + i * h;
      const Vector k1 = rhs(t, psi);
      const Vector k2 = rhs(t + 0.5 * h, Vector(psi + 0.5 * h * k1));
      const Vector k3 = rhs(t + 0.5 * h, Vector(psi + 0.5 * h * k2));
      const Vector k4 = rhs(t + h, Vector(psi + h * k3));
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
};

}  // namespace

std::vector<TrajectoryPoint> lindblad_evolve(const DensityOp& initial,
                                             const ExperimentParams& p,
                                             const NoiseParams& noise,
                                             const PDDSchedule& schedule, double t_end,
                                             int n_samples) {
  p.validate();
  noise.validate(p);
  if (initial.layout != p.layout) throw LayoutMismatch("lindblad_evolve: layouts differ");
  if (n_samples < 2) throw ConfigError("lindblad: need at least 2 sample points");
  if (std::abs(initial.entries.trace().real() - 1.0) > 1e-8) {
    throw NonPhysicalState("initial density matrix is not trace one");
  }

  const double h = noise.resolved_step(p);
  const MasterEq eq(p, noise);
  const Matrix pulse = Eigen::kroneckerProduct(
      schedule.pulse_spin, Matrix::Identity(p.layout.fock_cutoff, p.layout.fock_cutoff));

  std::vector<double> samples(n_samples);
  for (int i = 0; i < n_samples; ++i) samples[i] = t_end * double(i) / double(n_samples - 1);
  std::vector<double> pulses = schedule.pulse_times(p);
  pulses.erase(std::remove_if(pulses.begin(), pulses.end(),
                              [&](double t) { return t >= t_end; }),
               pulses.end());

  std::vector<TrajectoryPoint> out;
  out.reserve(n_samples);
  Matrix rho = initial.entries;
  double t = 0.0;
  size_t next_pulse = 0;
  for (double ts : samples) {
    while (next_pulse < pulses.size() && pulses[next_pulse] <= ts) {
      eq.rk4(t, pulses[next_pulse], h, rho);
      t = pulses[next_pulse];
      rho = pulse * rho * pulse.adjoint();
      ++next_pulse;
    }
    eq.rk4(t, ts, h, rho);
    t = ts;
    DensityOp snapshot{p.layout, rho};
    try {
      validate_density(snapshot, 1e-6, 1e-6, 1e-6);
    } catch (const NonPhysicalState& e) {
      throw NonPhysicalState(std::string(e.what()) +
                             " at t = " + std::to_string(ts) +
                             "; integrator step too coarse");
    }
    out.push_back({ts, std::move(snapshot)});
  }
  return out;
}

std::vector<PureState> closed_system_states(const ExperimentParams& p,
                                            const std::vector<double>& times,
                                            double step) {
  const SchroedingerEq eq(p);
  Vector psi = with_spin(kSpinUp, meter_vacuum(p.layout)).amplitudes;
  std::vector<PureState> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double ts : times) {
    eq.rk4(t, ts, step, psi);
    t = ts;
    Vector copy = psi / psi.norm();
    out.push_back(PureState{p.layout, std::move(copy)});
  }
  return out;
}

std::vector<std::pair<double, double>> fidelity_curve(const ExperimentParams& p,
                                                      const NoiseParams& noise,
                                                      const PDDSchedule& schedule,
                                                      int samples) {
  if (samples < 2) throw ConfigError("decohere.samples: need at least 2");
  const double window = schedule.resolved_window(p);
  const DensityOp rho0 = outer(with_spin(kSpinUp, meter_vacuum(p.layout)));
  const auto traj = lindblad_evolve(rho0, p, noise, schedule, window, samples);

  std::vector<double> times;
  times.reserve(traj.size());
  for (const auto& pt : traj) times.push_back(pt.t);
  const auto targets = closed_system_states(p, times, noise.resolved_step(p));

  std::vector<std::pair<double, double>> out;
  out.reserve(traj.size());
  for (size_t i = 0; i < traj.size(); ++i) {
    out.emplace_back(traj[i].t, fidelity(targets[i], traj[i].rho));
  }
  return out;
}

DegradedKick degraded_kick(const ExperimentParams& p, const NoiseParams& noise,
                           const PDDSchedule& schedule) {
  p.validate();
  noise.validate(p);
  const HilbertLayout& L = p.layout;
  const int nc = L.fock_cutoff;

  // Hermitian generator spreading the effective kick uniformly over [0, t*]:
  // exp(-i H t*) equals the effective kick unitary.
  const Matrix a = fock_annihilation(nc);
  const Matrix flip = Eigen::kroneckerProduct(spin_sigma_plus(), a) -
                      Eigen::kroneckerProduct(spin_sigma_minus(), Matrix(a.adjoint()));
  const Matrix h = Complex(0.0, -1.0) * (p.zassenhaus_z * p.gamma() / p.t_star) * flip;

  const MasterEq eq(p, noise, h);
  const double step = noise.resolved_step(p);
  const Matrix pulse = Eigen::kroneckerProduct(schedule.pulse_spin,
                                               Matrix::Identity(nc, nc));
  std::vector<double> pulses = schedule.pulse_times(p);
  pulses.erase(std::remove_if(pulses.begin(), pulses.end(),
                              [&](double t) { return t >= p.t_star; }),
               pulses.end());

  Matrix rho = outer(with_spin(kSpinUp, meter_vacuum(L))).entries;
  double t = 0.0;
  for (double tp : pulses) {
    eq.rk4(t, tp, step, rho);
    t = tp;
    rho = pulse * rho * pulse.adjoint();
  }
  eq.rk4(t, p.t_star, step, rho);
  validate_density(DensityOp{L, rho}, 1e-6, 1e-6, 1e-6);

  // <theta_down| rho |theta_down> over the spin factor
  const double s = std::sin(p.theta_postselect), c = std::cos(p.theta_postselect);
  Matrix meter = s * s * rho.topLeftCorner(nc, nc) + c * c * rho.bottomRightCorner(nc, nc) +
                 s * c * (rho.topRightCorner(nc, nc) + rho.bottomLeftCorner(nc, nc));
  const double pf = meter.trace().real();
  if (pf < 1e-30) throw ZeroProbability("degraded kick: post-selection underflow");
  meter /= pf;

  DegradedKick out{MeterDensity{L, std::move(meter)}, pf, 0.0, 0.0, p.weak_value()};
  out.mean_a = meter_mean_a(out.meter);
  out.amplification = std::abs(out.mean_a) / std::abs(p.zassenhaus_z * p.gamma());
  return out;
}

namespace {

double pulse_free_fidelity(const ExperimentParams& p, const NoiseParams& noise,
                           double t_eval) {
  const DensityOp rho0 = outer(with_spin(kSpinUp, meter_vacuum(p.layout)));
  const auto traj = lindblad_evolve(rho0, p, noise, PDDSchedule{}, t_eval, 2);
  const auto target = closed_system_states(p, {t_eval}, noise.resolved_step(p));
  return fidelity(target[0], traj.back().rho);
}

}  // namespace

NoiseParams calibrate_damping(double target_fidelity, const ExperimentParams& p,
                              double t_eval, NoiseChannel channel,
                              double integrator_step) {
  p.validate();
  if (!(target_fidelity > 0.0) || target_fidelity > 1.0) {
    throw ConfigError("noise.calibrate_target: must lie in (0, 1]");
  }
  auto with_rate = [&](double rate) {
    NoiseParams n;
    n.integrator_step = integrator_step;
    if (channel == NoiseChannel::damping) {
      n.damp_rate = rate;
    } else {
      n.dephase_rate = rate;
    }
    return n;
  };
  if (target_fidelity >= 1.0) return with_rate(0.0);  // exact lower bracket edge

  auto eval = [&](double rate) {
    NoiseParams n = with_rate(rate);
    // the probe step must resolve the decay timescale or RK4 goes unstable
    // during the bracket scan at large rates
    const double stable = 0.4 / std::max(rate, 1.0);
    n.integrator_step = std::min(n.resolved_step(p), stable);
    return pulse_free_fidelity(p, n, t_eval);
  };

  // Scan upward to bracket the first crossing, then bisect.
  const double lo_edge = 1e-3, hi_edge = 1e6;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  double rate = lo_edge;
  double prev_rate = 0.0;
  while (rate <= hi_edge * 1.0000001) {
    const double f = eval(rate);
    if (std::abs(f - target_fidelity) <= 1e-4) return with_rate(rate);
    if (f < target_fidelity) {
      lo = prev_rate;
      hi = rate;
      bracketed = true;
      break;
    }
    prev_rate = rate;
    rate *= std::sqrt(10.0);
  }
  if (!bracketed) {
    throw CalibrationFailed("no rate in [1e-3, 1e6] rad/s reaches pulse-free fidelity " +
                            std::to_string(target_fidelity));
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = eval(mid);
    if (std::abs(f - target_fidelity) <= 1e-4) return with_rate(mid);
    if (f > target_fidelity) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= 1e-12 * std::max(1.0, hi)) break;
  }
  throw CalibrationFailed("bisection did not reach the target fidelity within 1e-4");
}

}  // namespace wva
