#include "wva/model.hpp"

#include <cmath>
#include <numbers>

namespace wva {

StrengthEstimates strength_estimates(const PhysicalConstants& c) {
  StrengthEstimates e{};
  e.omega_g_rad_s = c.g_earth_m_s2 / c.c_m_s;
  e.energy_eV = c.hbar_eV_s * e.omega_g_rad_s;
  e.field_tesla = e.energy_eV / c.mu_bohr_eV_T;
  const double omega_earth = 2.0 * std::numbers::pi / c.sidereal_day_s;
  e.mashhoon_ratio = omega_earth * c.c_m_s / c.g_earth_m_s2;
  return e;
}

double field_to_omega(double b_tesla, const PhysicalConstants& c) {
  if (b_tesla < 0.0) throw NegativeField("field must be non-negative");
  return c.mu_bohr_eV_T * b_tesla / c.hbar_eV_s;
}

double omega_to_field(double omega_rad_s, const PhysicalConstants& c) {
  if (omega_rad_s < 0.0) throw NegativeField("frequency must be non-negative");
  return c.hbar_eV_s * omega_rad_s / c.mu_bohr_eV_T;
}

ExperimentParams default_params() {
  ExperimentParams p;
  p.omega_g = strength_estimates().omega_g_rad_s;
  return p;
}

void ExperimentParams::validate() const {
  layout.validate();
  if (!(lambda_coupling > 0.0)) {
    throw ConfigError("params.lambda_coupling: must be > 0");
  }
  if (!(t_star > 0.0)) throw ConfigError("params.t_star: must be > 0");
  const double detuning = std::abs(omega_g_effective() * t_star);
  if (!(detuning < 1e-2)) {
    throw ConfigError("params.omega_g: |omega_g * t_star| = " + std::to_string(detuning) +
                      " breaks the first-order expansion guard (< 1e-2)");
  }
  if (!(theta_postselect > 0.0) || theta_postselect > std::numbers::pi / 2.0) {
    throw ConfigError("params.theta_postselect: must lie in (0, pi/2]");
  }
  if (!std::isfinite(zassenhaus_z)) throw ConfigError("params.zassenhaus_z: must be finite");
}

namespace {

Operator jc_with_phases(const ExperimentParams& p, Complex plus_phase, Complex minus_phase) {
  const HilbertLayout& L = p.layout;
  const Matrix a = fock_annihilation(L.fock_cutoff);
  const Operator sp_a = embed(L, spin_sigma_plus(), a);
  const Operator sm_adag = embed(L, spin_sigma_minus(), Matrix(a.adjoint()));
  Matrix v = p.lambda_coupling * (plus_phase * sp_a.entries + minus_phase * sm_adag.entries);
  return Operator{L, std::move(v)};
}

}  // namespace

Operator interaction_hamiltonian(const ExperimentParams& p, double t) {
  p.validate();
  const double delta = p.omega_g_effective() * t;
  return jc_with_phases(p, Complex(1.0, -delta), Complex(1.0, delta));
}

Operator interaction_hamiltonian_exact(const ExperimentParams& p, double t) {
  p.validate();
  const double delta = p.omega_g_effective() * t;
  return jc_with_phases(p, std::polar(1.0, -delta), std::polar(1.0, delta));
}

double weak_regime_margin(const ExperimentParams& p, double meter_spread) {
  if (!(p.theta_postselect > 0.0)) {
    throw ConfigError("params.theta_postselect: must be > 0");
  }
  return p.gamma() * std::abs(p.weak_value()) * meter_spread;
}

}  // namespace wva
