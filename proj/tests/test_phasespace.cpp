#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "wva/phasespace.hpp"
#include "wva/protocol.hpp"

using namespace wva;

TEST_CASE("vacuum Q function") {
  HilbertLayout L{16};
  const MeterState vac = meter_vacuum(L);

  CHECK(husimi_point(vac, 0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-6));
  // closed form e^{-|alpha|^2} / pi
  for (double r : {0.5, 1.0, 2.0}) {
    CHECK(husimi_point(vac, Complex(r, 0.0)) ==
          doctest::Approx(std::exp(-r * r) / std::numbers::pi).epsilon(1e-9));
  }

  const QGrid g = husimi_q(vac);
  CHECK(std::abs(g.peak) < 1e-12);
  CHECK(std::abs(g.mass - 1.0) < 0.02);
  CHECK_FALSE(g.auto_extended);

  // rotational symmetry: swapping axes or flipping signs keeps Q
  const int res = g.resolution;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      CHECK(std::abs(g.values(i, j) - g.values(j, i)) < 1e-8);
      CHECK(std::abs(g.values(i, j) - g.values(res - 1 - i, j)) < 1e-8);
    }
  }
}

TEST_CASE("coherent state peaks at its amplitude") {
  HilbertLayout L{32};
  const Complex alpha(1.2, -0.7);
  const MeterState c = coherent_state(L, alpha);

  CHECK(husimi_point(c, alpha) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));

  const QGrid g = husimi_q(c);
  const double cell_re = (g.re_max - g.re_min) / (g.resolution - 1);
  const double cell_im = (g.im_max - g.im_min) / (g.resolution - 1);
  CHECK(std::abs(g.peak.real() - alpha.real()) <= cell_re);
  CHECK(std::abs(g.peak.imag() - alpha.imag()) <= cell_im);
  CHECK(std::abs(g.mass - 1.0) < 0.02);
}

TEST_CASE("requested windows grow to cover the state") {
  HilbertLayout L{32};
  const MeterState c = coherent_state(L, Complex(2.0, 0.0));
  QGridSpec spec;
  spec.re_min = -1.0;
  spec.re_max = 1.0;
  spec.im_min = -1.0;
  spec.im_max = 1.0;
  spec.resolution = 41;
  const QGrid g = husimi_q(c, spec);
  CHECK(g.auto_extended);
  CHECK(g.re_max >= 5.99);  // <a> of the truncated state sits just below 2
  CHECK(std::abs(g.mass - 1.0) < 0.02);
}

TEST_CASE("states centred beyond the trustworthy truncation are rejected") {
  HilbertLayout L{8};  // sqrt(cutoff/4) = sqrt(2)
  Vector v = Vector::Zero(L.fock_cutoff);
  v(6) = 1.0;  // <n> = 6, <a> = 0 is fine; use a displaced state instead
  const MeterState tall{L, v};
  CHECK_NOTHROW(husimi_q(tall));

  // coherent_state itself guards construction, so build the overflow by hand
  HilbertLayout wide{64};
  const MeterState big = coherent_state(wide, Complex(3.9, 0.0));
  MeterState shrunk{L, big.amplitudes.segment(0, L.fock_cutoff)};
  shrunk.amplitudes /= shrunk.amplitudes.norm();
  CHECK_THROWS_AS(husimi_q(shrunk), TruncationOverflow);
}

TEST_CASE("Q is linear in the density matrix") {
  HilbertLayout L{16};
  const MeterDensity a = outer(coherent_state(L, Complex(0.4, 0.2)));
  const MeterDensity b = outer(coherent_state(L, Complex(-0.3, 0.5)));
  const MeterDensity mix{L, 0.3 * a.entries + 0.7 * b.entries};

  // one window wide enough that no state triggers auto-extension, so all
  // three evaluations share the identical grid
  QGridSpec spec;
  spec.re_min = -5.0;
  spec.re_max = 5.0;
  spec.im_min = -5.0;
  spec.im_max = 5.0;
  spec.resolution = 31;
  const QGrid ga = husimi_q(a, spec), gb = husimi_q(b, spec), gm = husimi_q(mix, spec);
  REQUIRE_FALSE(gm.auto_extended);
  for (int i = 0; i < spec.resolution; ++i) {
    for (int j = 0; j < spec.resolution; ++j) {
      CHECK(std::abs(gm.values(i, j) - (0.3 * ga.values(i, j) + 0.7 * gb.values(i, j))) <
            1e-14);
    }
  }
}

TEST_CASE("two-kick state peaks at twice the single-kick displacement") {
  ExperimentParams p = default_params();
  p.theta_postselect = 0.05;
  p.omega_g = 1e-3 / p.t_star;
  const auto traj = flywheel_trajectory(p, 2);
  const Complex alpha1 = traj[0].predicted_alpha;

  const QGrid g = husimi_q(traj[1].meter_state);
  const double cell_re = (g.re_max - g.re_min) / (g.resolution - 1);
  const double cell_im = (g.im_max - g.im_min) / (g.resolution - 1);
  CHECK(std::abs(g.peak.real() - 2.0 * alpha1.real()) <= cell_re);
  CHECK(std::abs(g.peak.imag() - 2.0 * alpha1.imag()) <= cell_im);
}
