#include "wva/fisher.hpp"

#include <cmath>
#include <numbers>

#include "wva/protocol.hpp"
#include "wva/zassenhaus.hpp"

namespace wva {

double qfi_pure(const Operator& generator, const PureState& state) {
  if (generator.layout != state.layout) throw LayoutMismatch("qfi_pure: layouts differ");
  if (!is_hermitian(generator, 1e-10)) {
    throw NonHermitian("qfi_pure: generator is not Hermitian within 1e-10");
  }
  const Vector h_psi = generator.entries * state.amplitudes;
  const Complex mean = state.amplitudes.adjoint() * h_psi;
  const double mean_sq = h_psi.squaredNorm();
  return std::max(0.0, 4.0 * (mean_sq - std::norm(mean)));
}

namespace {

double classical_fisher_at_step(const std::function<std::vector<double>(double)>& probs,
                                double gamma, double h) {
  const std::vector<double> p0 = probs(gamma);
  const std::vector<double> pp = probs(gamma + h);
  const std::vector<double> pm = probs(gamma - h);
  if (pp.size() != p0.size() || pm.size() != p0.size()) {
    throw ConfigError("classical_fisher: distribution size changed across gamma");
  }
  for (const auto& dist : {p0, pp, pm}) {
    double sum = 0.0;
    for (double v : dist) sum += v;
    if (std::abs(sum - 1.0) > 1e-8) {
      throw ConfigError("classical_fisher: distribution sums to " + std::to_string(sum));
    }
  }
  double f = 0.0;
  for (size_t j = 0; j < p0.size(); ++j) {
    const double dp = (pp[j] - pm[j]) / (2.0 * h);
    if (p0[j] < 1e-30) {
      if (std::abs(dp) > 1e-25) {
        throw DegenerateDistribution("classical_fisher: outcome " + std::to_string(j) +
                                     " has vanishing probability but nonzero derivative");
      }
      continue;
    }
    f += dp * dp / p0[j];
  }
  return f;
}

// Step-halving acceptance: halve until two consecutive evaluations agree to
// 1e-6 relative.
double converge_by_halving(const std::function<double(double)>& eval, double h0) {
  double h = h0;
  double prev = eval(h);
  for (int it = 0; it < 6; ++it) {
    h /= 2.0;
    const double cur = eval(h);
    const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= 1e-6 * scale) return cur;
    prev = cur;
  }
  throw NonConverged("finite-difference step halving did not settle to 1e-6 relative");
}

}  // namespace

double classical_fisher(const std::function<std::vector<double>(double)>& probs,
                        double gamma, double step) {
  return converge_by_halving(
      [&](double h) { return classical_fisher_at_step(probs, gamma, h); }, step);
}

ExperimentParams with_gamma(const ExperimentParams& p, double gamma) {
  ExperimentParams q = p;
  q.omega_g = 2.0 * gamma / (q.lambda_coupling * q.t_star * q.t_star * q.k_scale);
  return q;
}

namespace {

// Post-selected meter state and success probability of the kick family at the
// given gamma. No weak-regime gate here: the information budget is evaluated
// across the full gamma grid, including the edge of the regime.
std::pair<Vector, double> meter_family(const ExperimentParams& base, double gamma) {
  const ExperimentParams p = with_gamma(base, gamma);
  const Operator u = effective_unitary(p, p.zassenhaus_z);
  const PureState in = with_spin(kSpinUp, meter_vacuum(p.layout));
  const Vector evolved = u.entries * in.amplitudes;
  const int nc = p.layout.fock_cutoff;
  const double c = std::cos(p.theta_postselect), s = std::sin(p.theta_postselect);
  Vector meter = s * evolved.segment(0, nc) + c * evolved.segment(nc, nc);
  const double pf = meter.squaredNorm();
  if (pf < 1e-30) throw ZeroProbability("meter family: post-selection probability underflow");
  meter /= std::sqrt(pf);
  return {std::move(meter), pf};
}

double meter_qfi_fd_of_family(
    const std::function<std::pair<Vector, double>(double)>& family, double gamma,
    double step) {
  const auto eval = [&](double h) {
    const auto [phi0, p0] = family(gamma);
    const auto [phip, pp] = family(gamma + h);
    const auto [phim, pm] = family(gamma - h);
    (void)pp;
    (void)pm;
    const Vector dphi = (phip - phim) / (2.0 * h);
    const Complex overlap = dphi.adjoint() * phi0;
    return 4.0 * p0 * (dphi.squaredNorm() - std::norm(overlap));
  };
  return converge_by_halving(eval, step);
}

}  // namespace

FisherReport fisher_budget(const ExperimentParams& p) {
  p.validate();
  if (!(p.theta_postselect < std::numbers::pi / 2.0)) {
    throw ConfigError("params.theta_postselect: budget requires theta in (0, pi/2)");
  }
  const double z = p.zassenhaus_z;
  const double gamma = p.gamma();
  const double theta = p.theta_postselect;
  const double c = std::cos(theta);
  const double a_w = p.weak_value();
  const double u = z * z * gamma * gamma * a_w * a_w;

  FisherReport r{};
  r.gamma = gamma;
  r.theta = theta;
  r.weak_value = a_w;
  r.z = z;
  r.f_total = 4.0 * z * z;
  r.f_meter = 4.0 * z * z * c * c / (1.0 + u);
  // Two-outcome classical Fisher of p_f(gamma) = sin^2 + z^2 gamma^2 cos^2,
  // using dp_f/dgamma = 2 z^2 gamma cos^2 obtained by differentiating p_f.
  r.f_postselect = 4.0 * std::pow(z, 4) * gamma * gamma * a_w * a_w /
                   ((1.0 + u) * (1.0 - z * z * gamma * gamma));
  r.retention = r.f_meter / r.f_total;
  r.discard_fraction = r.f_postselect / (r.f_meter + r.f_postselect);

  // The post-selected family turns over on the scale gamma_* = 1/(|z| A_w);
  // the step must resolve that scale, not gamma itself, or roundoff dominates
  // the differences at small gamma.
  const double gamma_star = 1.0 / (std::abs(z) * std::max(a_w, 1.0));
  const double step =
      std::max({1e-4 * std::abs(gamma), 1e-4 * gamma_star, 1e-12});
  const auto family = [&](double g) { return meter_family(p, g); };
  r.f_meter_fd = meter_qfi_fd_of_family(family, gamma, step);
  r.f_postselect_fd = classical_fisher(
      [&](double g) {
        const double pf = meter_family(p, g).second;
        return std::vector<double>{pf, 1.0 - pf};
      },
      gamma, step);
  return r;
}

double oracle_meter_qfi_fd(const ExperimentParams& p, int steps) {
  const double gamma = p.gamma();
  const auto family = [&](double g) {
    const ExperimentParams q = with_gamma(p, g);
    const PureState in = with_spin(kSpinUp, meter_vacuum(q.layout));
    auto [meter, pf] = postselect(oracle_apply(q, steps, in), q.theta_postselect);
    return std::make_pair(meter.amplitudes, pf);
  };
  // A single large-step evaluation; this diagnostic is compared against the
  // closed forms only qualitatively.
  const auto [phi0, p0] = family(gamma);
  const double h = std::max(0.25 * std::abs(gamma), 1e-12);
  const auto [phip, ppf] = family(gamma + h);
  const auto [phim, pmf] = family(gamma - h);
  (void)ppf;
  (void)pmf;
  const Vector dphi = (phip - phim) / (2.0 * h);
  const Complex overlap = dphi.adjoint() * phi0;
  return 4.0 * p0 * (dphi.squaredNorm() - std::norm(overlap));
}

}  // namespace wva
