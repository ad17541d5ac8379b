#pragma once

// The measurement protocol: prepare |up,0>, evolve under the effective kick
// unitary, post-select the qubit on |theta_down>, keep the meter, reset the
// qubit by an ideal carrier rotation, and iterate to accumulate kicks.

#include <utility>
#include <vector>

#include "wva/zassenhaus.hpp"

namespace wva {

struct KickResult {
  MeterState meter_state;   // meter factor after post-selection, normalized
  double p_f;               // post-selection probability of this kick
  double cumulative_p;      // product of per-kick p_f up to this kick
  double weak_value;        // A_w = cot(theta)
  Complex predicted_alpha;  // (z/2) lambda t* omega_g t* A_w per kick, times kick_index
  int kick_index;           // 1-based
};

// Partial inner product of the spin factor with
// |theta_down> = cos(theta)|down> + sin(theta)|up>, renormalized.
// Returns the meter state and the success probability. Throws ZeroProbability
// when the overlap norm falls below 1e-30.
std::pair<MeterState, double> postselect(const PureState& state, double theta);

// One kick from the vacuum meter. Requires weak_regime_margin < 0.1.
KickResult single_kick(const ExperimentParams& p);

// n_kicks iterations with ideal instantaneous qubit reset between kicks.
// Requires |n_kicks * alpha_1|^2 <= fock_cutoff / 4.
KickResult flywheel(const ExperimentParams& p, int n_kicks);

// Per-kick records of the same run.
std::vector<KickResult> flywheel_trajectory(const ExperimentParams& p, int n_kicks);

// Diagnostic: redo one kick from the given meter state with the brute-force
// propagator instead of the effective unitary and return the fidelity between
// the two post-selected meter states. The reduction behind the effective
// unitary was derived on the vacuum meter, so this gap is measured, not
// assumed zero.
double oracle_kick_fidelity(const ExperimentParams& p, const MeterState& start, int steps);

}  // namespace wva
