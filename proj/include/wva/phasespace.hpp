#pragma once

// Husimi-Kano Q function of meter states on a complex-plane grid,
// Q(alpha) = <alpha| rho |alpha> / pi evaluated with the exact projection of
// the truncated state onto coherent-state coefficients.

#include "wva/hilbert.hpp"

namespace wva {

struct QGridSpec {
  // All-zero bounds request the automatic window [<a> - 4, <a> + 4] per axis.
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  int resolution = 101;  // points per axis, endpoints included
};

struct QGrid {
  double re_min, re_max, im_min, im_max;
  int resolution;
  Eigen::MatrixXd values;  // row = im index (increasing), col = re index
  bool auto_extended;      // requested window was grown to cover the state
  Complex peak;            // grid point of maximal Q
  double mass;             // sum(values) * dre * dim
};

double husimi_point(const MeterState& phi, Complex alpha);
double husimi_point(const MeterDensity& rho, Complex alpha);

QGrid husimi_q(const MeterState& phi, const QGridSpec& spec = {});
QGrid husimi_q(const MeterDensity& rho, const QGridSpec& spec = {});

}  // namespace wva
