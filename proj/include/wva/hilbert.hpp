#pragma once

// Dense complex linear algebra over the composite qubit (x) truncated-Fock space.
//
// Basis ordering convention, fixed everywhere in this library:
//   index = spin_index * fock_cutoff + fock_index
// with spin_index 0 = |up>, 1 = |down>. Composite operators are built as
// kron(spin_factor, meter_factor) so the spin factor is the slower index.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>

#include "wva/errors.hpp"

namespace wva {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kSpinUp = 0;
inline constexpr int kSpinDown = 1;

struct HilbertLayout {
  int fock_cutoff = 32;  // number of retained Fock levels, >= 2

  int total_dim() const { return 2 * fock_cutoff; }
  int index(int spin, int fock) const { return spin * fock_cutoff + fock; }
  void validate() const;
  bool operator==(const HilbertLayout& o) const { return fock_cutoff == o.fock_cutoff; }
  bool operator!=(const HilbertLayout& o) const { return !(*this == o); }
};

// Dense operator on the composite space. `entries` may be dimensionless or
// carry rad/s depending on the construction site.
struct Operator {
  HilbertLayout layout;
  Matrix entries;
};

// Normalized state vector on the composite space.
struct PureState {
  HilbertLayout layout;
  Vector amplitudes;  // length total_dim
};

// Pure state of the vibrational (meter) factor alone, length fock_cutoff.
struct MeterState {
  HilbertLayout layout;
  Vector amplitudes;
};

// Density matrix on the composite space.
struct DensityOp {
  HilbertLayout layout;
  Matrix entries;
};

// Density matrix of the meter factor alone.
struct MeterDensity {
  HilbertLayout layout;
  Matrix entries;
};

// The operator alphabet: annihilation/creation, number, spin ladder and Pauli
// operators, each embedded in the composite space.
struct ElementaryOps {
  Operator a, a_dag, number;
  Operator sigma_plus, sigma_minus, sigma_z, sigma_x;
  Operator identity;

  std::map<std::string, const Operator*> as_table() const;
};

ElementaryOps build_elementary_ops(const HilbertLayout& layout);

// Single-factor matrices (not embedded).
Matrix fock_annihilation(int fock_cutoff);  // a|n> = sqrt(n)|n-1>, a_dag|cut-1> = 0
Matrix fock_number(int fock_cutoff);
Eigen::Matrix2cd spin_sigma_plus();
Eigen::Matrix2cd spin_sigma_minus();
Eigen::Matrix2cd spin_sigma_z();
Eigen::Matrix2cd spin_sigma_x();

// Tensor-product embeddings into the composite space.
Operator embed_spin(const HilbertLayout& layout, const Eigen::Matrix2cd& s);
Operator embed_meter(const HilbertLayout& layout, const Matrix& m);
Operator embed(const HilbertLayout& layout, const Eigen::Matrix2cd& s, const Matrix& m);

// --- state constructors -------------------------------------------------------

PureState basis_state(const HilbertLayout& layout, int spin, int fock);
PureState make_pure(const HilbertLayout& layout, Vector amplitudes);  // normalizes
MeterState meter_vacuum(const HilbertLayout& layout);

// Truncated coherent state on the meter factor, renormalized after truncation.
// Requires |alpha|^2 <= fock_cutoff/4; throws TruncationOverflow otherwise.
MeterState coherent_state(const HilbertLayout& layout, Complex alpha);

// |spin> (x) |meter>
PureState with_spin(int spin, const MeterState& meter);

DensityOp outer(const PureState& psi);
MeterDensity outer(const MeterState& phi);

// --- operations ---------------------------------------------------------------

// Matrix exponential (scaling-and-squaring Pade via Eigen). Throws NonFinite on
// NaN/Inf input.
Operator expm(const Operator& op);
Matrix expm_dense(const Matrix& m);

double fidelity(const PureState& target, const DensityOp& rho);  // <t|rho|t>
double fidelity(const PureState& a, const PureState& b);         // |<a|b>|^2
double fidelity(const MeterState& target, const MeterDensity& rho);
double fidelity(const MeterState& a, const MeterState& b);

Complex expectation(const Operator& op, const PureState& psi);
Complex expectation(const Operator& op, const DensityOp& rho);
Complex meter_mean_a(const MeterState& phi);    // <a> on the meter factor
double meter_mean_n(const MeterState& phi);     // <n>
Complex meter_mean_a(const MeterDensity& rho);
double meter_mean_n(const MeterDensity& rho);

PureState apply(const Operator& op, const PureState& psi);  // normalized result

// Reduced meter density matrix (partial trace over the spin factor).
MeterDensity partial_trace_spin(const DensityOp& rho);

// --- checks -------------------------------------------------------------------

bool is_hermitian(const Operator& op, double tol = 1e-12);
bool is_unitary(const Operator& op, double tol = 1e-10);
double max_abs(const Matrix& m);

// Density-matrix validity: Hermitian within herm_tol, trace 1 within trace_tol,
// smallest eigenvalue >= -eig_tol. Throws NonPhysicalState on breach.
void validate_density(const DensityOp& rho, double herm_tol = 1e-10,
                      double trace_tol = 1e-8, double eig_tol = 1e-8);

}  // namespace wva
