#pragma once

// Product-expansion bookkeeping for the single-kick propagator, the reduced
// effective unitary, and a brute-force time-ordered propagator used to
// adjudicate the kick coefficient numerically.

#include <vector>

#include "wva/model.hpp"

namespace wva {

struct ZassenhausOrder {
  int order;                  // odd order k in {1,3,5,7,9,11}
  double coefficient;         // reduced scalar term acting on |up,0>, incl. sign
  double prefactor_over_gamma; // scalar multiplying operator_form, in units of gamma
  Operator operator_form;     // the bracketed operator of that order
};

struct ZassenhausSeries {
  std::vector<ZassenhausOrder> orders;
  double z_sum;              // sum of the reduced coefficients
  double truncation_ratio;   // |c11 (lambda t*)^11 / 11!| / |c1 lambda t*|
  double lambda_t_star;
};

// Requires the identity-Rabi condition lambda * t_star = pi within 1e-9;
// throws OffResonance otherwise.
ZassenhausSeries build_series(const ExperimentParams& p);

// The two even-order product factors (orders 2 and 4). Both are diagonal, so
// they act on any basis ket as a pure phase.
std::vector<Operator> even_order_unitaries(const ExperimentParams& p);

// exp( -(z/2) lambda t* omega_g t* (sigma+ a - sigma- a_dag) ). The generator
// is anti-Hermitian, so the result is unitary.
Operator effective_unitary(const ExperimentParams& p, double z);
Operator effective_unitary(const ExperimentParams& p, const ZassenhausSeries& s);

// Time-ordered midpoint product Prod_j exp(-i V(t_j) dt / hbar) over [0, t*]
// using the exact-phase interaction. Each factor is evaluated exactly through
// the identity V(t) = D(wt) V0 D(wt)^dag with D diagonal, so one generic
// matrix exponential serves all steps. With check_convergence the product is
// recomputed at doubled step count and must agree to 1e-10 max-norm.
Operator oracle_propagator(const ExperimentParams& p, int steps,
                           bool check_convergence = false);

// The same product applied to one state instead of the identity; O(dim^2)
// per step instead of O(dim^3).
PureState oracle_apply(const ExperimentParams& p, int steps, const PureState& initial);

// <down,1| U_oracle |up,0>
Complex oracle_kick_amplitude(const ExperimentParams& p, int steps);

struct PlateauPoint {
  double omega_g_t_star;
  Complex kick;   // raw matrix element <down,1|U|up,0>
  Complex ratio;  // kick / gamma
};

struct ZAdjudication {
  std::vector<PlateauPoint> plateau;
  double z_estimate;              // median real part of the plateau ratio
  double flatness;                // relative spread of |ratio| across the grid
  bool plateau_flat;              // flatness within +-1%
  double reference_z;
  double series_z;
  bool matches_reference;         // |z_estimate - reference_z| <= 1e-2 |reference_z|
  double kick_scaling_exponent;   // log-log slope of |kick| vs omega_g t*
};

// Runs the oracle across a grid of scaled detunings and extracts the kick
// coefficient. The grid entries are values of omega_g * t_star.
ZAdjudication adjudicate_z(const ExperimentParams& base,
                           const std::vector<double>& omega_g_t_star_grid, int steps);

}  // namespace wva
