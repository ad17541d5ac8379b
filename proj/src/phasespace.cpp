#include "wva/phasespace.hpp"

#include <cmath>
#include <numbers>

namespace wva {

namespace {

// Coefficients of |alpha> on the retained Fock levels; exact for any state
// supported below the cutoff.
Vector coherent_coefficients(int fock_cutoff, Complex alpha) {
  Vector v(fock_cutoff);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  v(0) = term;
  for (int n = 1; n < fock_cutoff; ++n) {
    term *= alpha / std::sqrt(double(n));
    v(n) = term;
  }
  return v;
}

struct StateView {
  const MeterState* pure = nullptr;
  const MeterDensity* mixed = nullptr;

  const HilbertLayout& layout() const { return pure ? pure->layout : mixed->layout; }

  double q(Complex alpha) const {
    const Vector c = coherent_coefficients(layout().fock_cutoff, alpha);
    if (pure) {
      return std::norm(Complex(c.adjoint() * pure->amplitudes)) / std::numbers::pi;
    }
    const Complex v = c.adjoint() * mixed->entries * c;
    return std::max(0.0, v.real()) / std::numbers::pi;
  }

  Complex mean_a() const { return pure ? meter_mean_a(*pure) : meter_mean_a(*mixed); }
};

QGrid evaluate(const StateView& state, const QGridSpec& spec) {
  if (spec.resolution < 2) throw ConfigError("husimi.resolution: must be >= 2");
  const Complex center = state.mean_a();
  if (std::norm(center) > state.layout().fock_cutoff / 4.0) {
    throw TruncationOverflow("state centre |<a>|^2 = " + std::to_string(std::norm(center)) +
                             " exceeds fock_cutoff/4; raise the cutoff");
  }

  QGrid g;
  g.resolution = spec.resolution;
  const bool want_auto = spec.re_min == 0.0 && spec.re_max == 0.0 && spec.im_min == 0.0 &&
                         spec.im_max == 0.0;
  const double need_re_min = center.real() - 4.0, need_re_max = center.real() + 4.0;
  const double need_im_min = center.imag() - 4.0, need_im_max = center.imag() + 4.0;
  if (want_auto) {
    g.re_min = need_re_min;
    g.re_max = need_re_max;
    g.im_min = need_im_min;
    g.im_max = need_im_max;
    g.auto_extended = false;
  } else {
    g.re_min = std::min(spec.re_min, need_re_min);
    g.re_max = std::max(spec.re_max, need_re_max);
    g.im_min = std::min(spec.im_min, need_im_min);
    g.im_max = std::max(spec.im_max, need_im_max);
    g.auto_extended = g.re_min != spec.re_min || g.re_max != spec.re_max ||
                      g.im_min != spec.im_min || g.im_max != spec.im_max;
  }

  const int res = g.resolution;
  const double dre = (g.re_max - g.re_min) / double(res - 1);
  const double dim = (g.im_max - g.im_min) / double(res - 1);
  g.values.resize(res, res);
  double best = -1.0;
  for (int i = 0; i < res; ++i) {
    const double im = g.im_min + i * dim;
    for (int j = 0; j < res; ++j) {
      const double re = g.re_min + j * dre;
      const double q = state.q(Complex(re, im));
      g.values(i, j) = q;
      if (q > best) {
        best = q;
        g.peak = Complex(re, im);
      }
    }
  }
  g.mass = g.values.sum() * dre * dim;
  return g;
}

}  // namespace

double husimi_point(const MeterState& phi, Complex alpha) {
  return StateView{&phi, nullptr}.q(alpha);
}

double husimi_point(const MeterDensity& rho, Complex alpha) {
  return StateView{nullptr, &rho}.q(alpha);
}

QGrid husimi_q(const MeterState& phi, const QGridSpec& spec) {
  return evaluate(StateView{&phi, nullptr}, spec);
}

QGrid husimi_q(const MeterDensity& rho, const QGridSpec& spec) {
  return evaluate(StateView{nullptr, &rho}, spec);
}

}  // namespace wva
