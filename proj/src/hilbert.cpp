#include "wva/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace wva {

void HilbertLayout::validate() const {
  if (fock_cutoff < 2) {
    throw ConfigError("params.fock_cutoff: must be >= 2, got " + std::to_string(fock_cutoff));
  }
}

std::map<std::string, const Operator*> ElementaryOps::as_table() const {
  return {{"a", &a},         {"a_dag", &a_dag},         {"n", &number},
          {"sigma_plus", &sigma_plus}, {"sigma_minus", &sigma_minus},
          {"sigma_z", &sigma_z},       {"sigma_x", &sigma_x},
          {"identity", &identity}};
}

Matrix fock_annihilation(int fock_cutoff) {
  Matrix a = Matrix::Zero(fock_cutoff, fock_cutoff);
  for (int n = 1; n < fock_cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix fock_number(int fock_cutoff) {
  Matrix n = Matrix::Zero(fock_cutoff, fock_cutoff);
  for (int k = 0; k < fock_cutoff; ++k) n(k, k) = double(k);
  return n;
}

Eigen::Matrix2cd spin_sigma_plus() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(kSpinUp, kSpinDown) = 1.0;  // |up><down|
  return s;
}

Eigen::Matrix2cd spin_sigma_minus() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(kSpinDown, kSpinUp) = 1.0;  // |down><up|
  return s;
}

Eigen::Matrix2cd spin_sigma_z() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(kSpinUp, kSpinUp) = 1.0;
  s(kSpinDown, kSpinDown) = -1.0;
  return s;
}

Eigen::Matrix2cd spin_sigma_x() {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  s(kSpinUp, kSpinDown) = 1.0;
  s(kSpinDown, kSpinUp) = 1.0;
  return s;
}

Operator embed(const HilbertLayout& layout, const Eigen::Matrix2cd& s, const Matrix& m) {
  layout.validate();
  if (m.rows() != layout.fock_cutoff || m.cols() != layout.fock_cutoff) {
    throw LayoutMismatch("meter factor has wrong dimension for layout");
  }
  Matrix out = Eigen::kroneckerProduct(s, m);
  return Operator{layout, std::move(out)};
}

Operator embed_spin(const HilbertLayout& layout, const Eigen::Matrix2cd& s) {
  return embed(layout, s, Matrix::Identity(layout.fock_cutoff, layout.fock_cutoff));
}

Operator embed_meter(const HilbertLayout& layout, const Matrix& m) {
  return embed(layout, Eigen::Matrix2cd::Identity(), m);
}

ElementaryOps build_elementary_ops(const HilbertLayout& layout) {
  layout.validate();
  const Matrix a = fock_annihilation(layout.fock_cutoff);
  ElementaryOps ops{
      embed_meter(layout, a),
      embed_meter(layout, a.adjoint()),
      embed_meter(layout, fock_number(layout.fock_cutoff)),
      embed_spin(layout, spin_sigma_plus()),
      embed_spin(layout, spin_sigma_minus()),
      embed_spin(layout, spin_sigma_z()),
      embed_spin(layout, spin_sigma_x()),
      Operator{layout, Matrix::Identity(layout.total_dim(), layout.total_dim())}};
  return ops;
}

PureState basis_state(const HilbertLayout& layout, int spin, int fock) {
  layout.validate();
  Vector v = Vector::Zero(layout.total_dim());
  v(layout.index(spin, fock)) = 1.0;
  return PureState{layout, std::move(v)};
}

PureState make_pure(const HilbertLayout& layout, Vector amplitudes) {
  layout.validate();
  if (amplitudes.size() != layout.total_dim()) {
    throw LayoutMismatch("state vector has wrong dimension for layout");
  }
  if (!amplitudes.allFinite()) throw NonFinite("state vector contains NaN/Inf");
  const double norm = amplitudes.norm();
  if (norm <= 0.0) throw NonFinite("cannot normalize a zero state vector");
  amplitudes /= norm;
  return PureState{layout, std::move(amplitudes)};
}

MeterState meter_vacuum(const HilbertLayout& layout) {
  layout.validate();
  Vector v = Vector::Zero(layout.fock_cutoff);
  v(0) = 1.0;
  return MeterState{layout, std::move(v)};
}

MeterState coherent_state(const HilbertLayout& layout, Complex alpha) {
  layout.validate();
  const double n_mean = std::norm(alpha);
  if (n_mean > layout.fock_cutoff / 4.0) {
    throw TruncationOverflow("coherent amplitude |alpha|^2 = " + std::to_string(n_mean) +
                             " exceeds fock_cutoff/4 = " +
                             std::to_string(layout.fock_cutoff / 4.0));
  }
  Vector v(layout.fock_cutoff);
  Complex term = 1.0;  // alpha^n / sqrt(n!)
  v(0) = term;
  for (int n = 1; n < layout.fock_cutoff; ++n) {
    term *= alpha / std::sqrt(double(n));
    v(n) = term;
  }
  v /= v.norm();
  return MeterState{layout, std::move(v)};
}

PureState with_spin(int spin, const MeterState& meter) {
  Vector v = Vector::Zero(meter.layout.total_dim());
  v.segment(spin * meter.layout.fock_cutoff, meter.layout.fock_cutoff) = meter.amplitudes;
  return PureState{meter.layout, std::move(v)};
}

DensityOp outer(const PureState& psi) {
  return DensityOp{psi.layout, psi.amplitudes * psi.amplitudes.adjoint()};
}

MeterDensity outer(const MeterState& phi) {
  return MeterDensity{phi.layout, phi.amplitudes * phi.amplitudes.adjoint()};
}

Matrix expm_dense(const Matrix& m) {
  if (!m.allFinite()) throw NonFinite("matrix exponential of non-finite input");
  return m.exp();
}

Operator expm(const Operator& op) { return Operator{op.layout, expm_dense(op.entries)}; }

double fidelity(const PureState& target, const DensityOp& rho) {
  if (target.layout != rho.layout) throw LayoutMismatch("fidelity: layouts differ");
  const Complex f = target.amplitudes.adjoint() * rho.entries * target.amplitudes;
  return std::max(0.0, f.real());
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.layout != b.layout) throw LayoutMismatch("fidelity: layouts differ");
  return std::norm(Complex(a.amplitudes.adjoint() * b.amplitudes));
}

double fidelity(const MeterState& target, const MeterDensity& rho) {
  if (target.layout != rho.layout) throw LayoutMismatch("fidelity: layouts differ");
  const Complex f = target.amplitudes.adjoint() * rho.entries * target.amplitudes;
  return std::max(0.0, f.real());
}

double fidelity(const MeterState& a, const MeterState& b) {
  if (a.layout != b.layout) throw LayoutMismatch("fidelity: layouts differ");
  return std::norm(Complex(a.amplitudes.adjoint() * b.amplitudes));
}

Complex expectation(const Operator& op, const PureState& psi) {
  if (op.layout != psi.layout) throw LayoutMismatch("expectation: layouts differ");
  return Complex(psi.amplitudes.adjoint() * op.entries * psi.amplitudes);
}

Complex expectation(const Operator& op, const DensityOp& rho) {
  if (op.layout != rho.layout) throw LayoutMismatch("expectation: layouts differ");
  return (op.entries * rho.entries).trace();
}

Complex meter_mean_a(const MeterState& phi) {
  Complex mean = 0.0;
  for (int n = 1; n < phi.layout.fock_cutoff; ++n) {
    mean += std::conj(phi.amplitudes(n - 1)) * std::sqrt(double(n)) * phi.amplitudes(n);
  }
  return mean;
}

double meter_mean_n(const MeterState& phi) {
  double mean = 0.0;
  for (int n = 0; n < phi.layout.fock_cutoff; ++n) mean += n * std::norm(phi.amplitudes(n));
  return mean;
}

Complex meter_mean_a(const MeterDensity& rho) {
  return (fock_annihilation(rho.layout.fock_cutoff) * rho.entries).trace();
}

double meter_mean_n(const MeterDensity& rho) {
  return (fock_number(rho.layout.fock_cutoff) * rho.entries).trace().real();
}

PureState apply(const Operator& op, const PureState& psi) {
  if (op.layout != psi.layout) throw LayoutMismatch("apply: layouts differ");
  return make_pure(psi.layout, op.entries * psi.amplitudes);
}

MeterDensity partial_trace_spin(const DensityOp& rho) {
  const int nc = rho.layout.fock_cutoff;
  Matrix out = rho.entries.topLeftCorner(nc, nc) + rho.entries.bottomRightCorner(nc, nc);
  return MeterDensity{rho.layout, std::move(out)};
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Operator& op, double tol) {
  const double scale = std::max(max_abs(op.entries), 1e-300);
  return max_abs(Matrix(op.entries - op.entries.adjoint())) <= tol * scale;
}

bool is_unitary(const Operator& op, double tol) {
  const int d = int(op.entries.rows());
  return max_abs(Matrix(op.entries.adjoint() * op.entries - Matrix::Identity(d, d))) <= tol;
}

void validate_density(const DensityOp& rho, double herm_tol, double trace_tol, double eig_tol) {
  if (!rho.entries.allFinite()) {
    throw NonPhysicalState("density matrix contains NaN/Inf entries");
  }
  const double scale = std::max(max_abs(rho.entries), 1e-300);
  if (max_abs(Matrix(rho.entries - rho.entries.adjoint())) > herm_tol * scale) {
    throw NonPhysicalState("density matrix is not Hermitian within tolerance");
  }
  const double tr = rho.entries.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw NonPhysicalState("density matrix trace " + std::to_string(tr) +
                           " deviates from 1 beyond tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      Matrix(0.5 * (rho.entries + rho.entries.adjoint())), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -eig_tol) {
    throw NonPhysicalState("density matrix has eigenvalue " +
                           std::to_string(es.eigenvalues().minCoeff()) +
                           " below the positivity tolerance");
  }
}

}  // namespace wva
