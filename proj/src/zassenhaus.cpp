#include "wva/zassenhaus.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wva {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_resonant(const ExperimentParams& p) {
  const double phase = p.lambda_coupling * p.t_star;
  if (std::abs(phase - std::numbers::pi) > 1e-9) {
    throw OffResonance("lambda * t_star = " + std::to_string(phase) +
                       " is not pi; the Rabi factor is not the identity");
  }
}

struct FactorAlphabet {
  Matrix a, ad, n, id;
  Eigen::Matrix2cd sp, sm, sz, s_id;
};

FactorAlphabet alphabet(const HilbertLayout& L) {
  FactorAlphabet f;
  f.a = fock_annihilation(L.fock_cutoff);
  f.ad = f.a.adjoint();
  f.n = fock_number(L.fock_cutoff);
  f.id = Matrix::Identity(L.fock_cutoff, L.fock_cutoff);
  f.sp = spin_sigma_plus();
  f.sm = spin_sigma_minus();
  f.sz = spin_sigma_z();
  f.s_id = Eigen::Matrix2cd::Identity();
  return f;
}

// The bracketed operator of odd order k, as printed term by term.
Operator bracket_operator(const HilbertLayout& L, int k) {
  const FactorAlphabet f = alphabet(L);
  const Matrix two_n_plus_1 = 2.0 * f.n + f.id;
  const Matrix n_plus_1 = f.n + f.id;

  Matrix up, down;  // sigma+ and sigma- meter factors
  switch (k) {
    case 1:
      up = -f.a;
      down = f.ad;
      break;
    case 3:
      up = -3.0 * f.a - 4.0 * f.n * f.a;
      down = 3.0 * f.ad + 4.0 * f.ad * f.n;
      break;
    case 5:
      up = 3.0 * (-two_n_plus_1 * f.a - f.a * two_n_plus_1) + 16.0 * (n_plus_1 * f.n * f.a);
      down = 3.0 * (two_n_plus_1 * f.ad + f.ad * two_n_plus_1) - 16.0 * (f.ad * n_plus_1 * f.n);
      break;
    case 7: {
      up = 12.0 * (-f.a * two_n_plus_1 * f.a - n_plus_1 * two_n_plus_1 * f.a) +
           64.0 * (n_plus_1 * n_plus_1 * f.n * f.a);
      down = 12.0 * (two_n_plus_1 * f.n * f.ad + f.ad * two_n_plus_1 * n_plus_1) -
             64.0 * (f.ad * n_plus_1 * n_plus_1 * f.n);
      break;
    }
    case 9: {
      const Matrix n2 = f.n * f.n;
      const Matrix np2 = n_plus_1 * n_plus_1;
      up = 48.0 * (-f.a * (2.0 * n2 + f.id) * f.a - np2 * two_n_plus_1 * f.a) +
           256.0 * (np2 * n_plus_1 * f.n * f.a);
      down = 48.0 * (two_n_plus_1 * n2 * f.ad + f.ad * two_n_plus_1 * np2) -
             256.0 * (f.ad * np2 * n_plus_1 * f.n);
      break;
    }
    case 11: {
      const Matrix n3 = f.n * f.n * f.n;
      const Matrix np3 = n_plus_1 * n_plus_1 * n_plus_1;
      up = 192.0 * (-f.a * (2.0 * n3 + f.id) * f.a - np3 * two_n_plus_1 * f.a) +
           1024.0 * (np3 * n_plus_1 * f.n * f.a);
      down = 192.0 * (two_n_plus_1 * n3 * f.ad + f.ad * two_n_plus_1 * np3) -
             1024.0 * (f.ad * np3 * n_plus_1 * f.n);
      break;
    }
    default:
      throw ConfigError("unsupported expansion order " + std::to_string(k));
  }
  Matrix out = Eigen::kroneckerProduct(f.sp, up) + Eigen::kroneckerProduct(f.sm, down);
  return Operator{L, std::move(out)};
}

// Reduced matrix elements <down,1|B_k|up,0> of the brackets above.
double reduced_element(int k) {
  switch (k) {
    case 1: return 1.0;
    case 3: return 3.0;
    case 5: return 12.0;
    case 7: return 48.0;
    case 9: return 192.0;
    case 11: return 768.0;
  }
  return 0.0;
}

// Scalar multiplying the bracket in the first-order expansion, in units of
// gamma = lambda t* omega_g t* / 2. Signs follow the summary expansion of the
// product acting on |up,0>.
double prefactor_over_gamma(int k, double lambda_t_star) {
  const double x = lambda_t_star;
  switch (k) {
    case 1: return 1.0;
    case 3: return -std::pow(x, 2) / factorial(3);
    case 5: return std::pow(x, 4) / factorial(5);
    case 7: return std::pow(x, 6) / factorial(7);
    case 9: return -std::pow(x, 8) / factorial(9);
    case 11: return std::pow(x, 10) / factorial(11);
  }
  return 0.0;
}

}  // namespace

ZassenhausSeries build_series(const ExperimentParams& p) {
  p.validate();
  require_resonant(p);
  const double x = p.lambda_coupling * p.t_star;

  ZassenhausSeries s;
  s.lambda_t_star = x;
  s.z_sum = 0.0;
  for (int k : {1, 3, 5, 7, 9, 11}) {
    ZassenhausOrder ord{k, prefactor_over_gamma(k, x) * reduced_element(k),
                        prefactor_over_gamma(k, x), bracket_operator(p.layout, k)};
    s.z_sum += ord.coefficient;
    s.orders.push_back(std::move(ord));
  }
  s.truncation_ratio = std::abs(s.orders.back().coefficient * std::pow(x, 11) / factorial(11)) /
                       std::abs(s.orders.front().coefficient * x);
  return s;
}

std::vector<Operator> even_order_unitaries(const ExperimentParams& p) {
  p.validate();
  require_resonant(p);
  const HilbertLayout& L = p.layout;
  const FactorAlphabet f = alphabet(L);
  const double x = p.lambda_coupling * p.t_star;
  const double wt = p.omega_g_effective() * p.t_star;
  const Complex i(0.0, 1.0);

  const Matrix two_n_plus_1 = 2.0 * f.n + f.id;
  const Matrix full_id = Matrix::Identity(L.total_dim(), L.total_dim());

  Matrix c2 = i * std::pow(x, 2) * wt / (factorial(2) * 2.0) *
              (Eigen::kroneckerProduct(f.sz, two_n_plus_1) + full_id);

  const Matrix ad_n_a = f.ad * f.n * f.a;
  const Matrix n_quad = 2.0 * f.n + 2.0 * f.n * f.n;
  Matrix c4 = i * std::pow(x, 4) * wt / (factorial(4) * 2.0) *
              (3.0 * Eigen::kroneckerProduct(f.sz, two_n_plus_1) + 3.0 * full_id +
               8.0 * Eigen::kroneckerProduct(Eigen::Matrix2cd(f.sm * f.sp), ad_n_a) +
               4.0 * Eigen::kroneckerProduct(Eigen::Matrix2cd(f.sp * f.sm), n_quad));

  return {expm(Operator{L, std::move(c2)}), expm(Operator{L, std::move(c4)})};
}

Operator effective_unitary(const ExperimentParams& p, double z) {
  p.validate();
  const FactorAlphabet f = alphabet(p.layout);
  Matrix gen = Eigen::kroneckerProduct(f.sp, f.a) -
               Eigen::kroneckerProduct(f.sm, Matrix(f.ad));
  gen *= -z * p.gamma();
  return expm(Operator{p.layout, std::move(gen)});
}

Operator effective_unitary(const ExperimentParams& p, const ZassenhausSeries& s) {
  return effective_unitary(p, s.z_sum);
}

namespace {

// V(t) = D(wt) V0 D(wt)^dag with D = exp(-i w t sigma_z / 2) (x) 1, so each
// midpoint factor is the diagonal sandwich of a single generic exponential.
Matrix oracle_evolve_columns(const ExperimentParams& p, int steps, Matrix cols) {
  const HilbertLayout& L = p.layout;
  const int dim = L.total_dim();
  const int nc = L.fock_cutoff;
  const double dt = p.t_star / double(steps);
  const double omega = p.omega_g_effective();
  const Complex i(0.0, 1.0);

  const FactorAlphabet f = alphabet(L);
  const Matrix v0 = p.lambda_coupling * (Eigen::kroneckerProduct(f.sp, f.a) +
                                         Eigen::kroneckerProduct(f.sm, Matrix(f.ad)));
  const Matrix e0 = expm_dense(-i * dt * v0);

  Vector d(dim);
  for (int j = 0; j < steps; ++j) {
    const double half_phase = omega * (double(j) + 0.5) * dt / 2.0;
    const Complex up = std::polar(1.0, -half_phase);
    const Complex down = std::polar(1.0, half_phase);
    for (int m = 0; m < nc; ++m) {
      d(m) = up;
      d(nc + m) = down;
    }
    cols = d.conjugate().asDiagonal() * cols;
    cols = e0 * cols;
    cols = d.asDiagonal() * cols;
  }
  return cols;
}

void require_oracle_steps(int steps) {
  if (steps < 1000) {
    throw ConfigError("zassenhaus.steps: oracle requires >= 1000 steps, got " +
                      std::to_string(steps));
  }
}

}  // namespace

Operator oracle_propagator(const ExperimentParams& p, int steps, bool check_convergence) {
  p.validate();
  require_oracle_steps(steps);
  const int dim = p.layout.total_dim();
  Matrix u = oracle_evolve_columns(p, steps, Matrix::Identity(dim, dim));
  if (check_convergence) {
    const Matrix u2 = oracle_evolve_columns(p, 2 * steps, Matrix::Identity(dim, dim));
    const double diff = max_abs(Matrix(u2 - u));
    if (diff >= 1e-10) {
      throw NonConverged("oracle propagator step-doubling changed the result by " +
                         std::to_string(diff) + " (>= 1e-10); increase steps");
    }
    u = u2;
  }
  return Operator{p.layout, std::move(u)};
}

PureState oracle_apply(const ExperimentParams& p, int steps, const PureState& initial) {
  p.validate();
  require_oracle_steps(steps);
  if (initial.layout != p.layout) throw LayoutMismatch("oracle_apply: layouts differ");
  Matrix col = oracle_evolve_columns(p, steps, Matrix(initial.amplitudes));
  return PureState{p.layout, Vector(col.col(0))};
}

Complex oracle_kick_amplitude(const ExperimentParams& p, int steps) {
  const PureState out = oracle_apply(p, steps, basis_state(p.layout, kSpinUp, 0));
  return out.amplitudes(p.layout.index(kSpinDown, 1));
}

ZAdjudication adjudicate_z(const ExperimentParams& base,
                           const std::vector<double>& omega_g_t_star_grid, int steps) {
  ZAdjudication adj;
  adj.reference_z = kReferenceZ;
  adj.series_z = build_series(base).z_sum;

  for (double x : omega_g_t_star_grid) {
    ExperimentParams p = base;
    p.omega_g = x / (p.t_star * p.k_scale);
    const Complex kick = oracle_kick_amplitude(p, steps);
    adj.plateau.push_back({x, kick, kick / p.gamma()});
  }

  std::vector<double> re, mag;
  for (const auto& pt : adj.plateau) {
    re.push_back(pt.ratio.real());
    mag.push_back(std::abs(pt.ratio));
  }
  std::sort(re.begin(), re.end());
  adj.z_estimate = re[re.size() / 2];

  const double mag_max = *std::max_element(mag.begin(), mag.end());
  const double mag_min = *std::min_element(mag.begin(), mag.end());
  std::sort(mag.begin(), mag.end());
  const double mag_med = std::max(mag[mag.size() / 2], 1e-300);
  adj.flatness = (mag_max - mag_min) / mag_med;
  adj.plateau_flat = adj.flatness <= 0.02;
  adj.matches_reference = std::abs(adj.z_estimate - adj.reference_z) <= 1e-2 * std::abs(adj.reference_z);

  // Least-squares slope of log|kick| against log(omega_g t*).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = int(adj.plateau.size());
  for (const auto& pt : adj.plateau) {
    const double lx = std::log(pt.omega_g_t_star);
    const double ly = std::log(std::max(std::abs(pt.kick), 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  adj.kick_scaling_exponent =
      n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return adj;
}

}  // namespace wva
