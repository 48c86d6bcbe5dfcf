#pragma once

#include <cmath>

#include "pkin/common.hpp"

namespace pkin {

/// Polar cell-centered finite-volume grid on the configuration ball
/// D = B(0, sqrt(b)).  Cell centers sit at r_i = (i+1/2)*dr, a_j = (j+1/2)*da
/// so no quantity is ever evaluated on the singular outer rim |q|^2 = b or at
/// the origin.  The midpoint measure r_i*dr*da integrates the constant 1 to
/// exactly pi*b (sum of (i+1/2) telescopes to n_r^2/2).
struct QGrid {
  int n_r = 0;
  int n_a = 0;
  double b = 1.0;
  double dr = 0.0;
  double da = 0.0;

  ArrayX r_c;     ///< n_r cell-center radii
  ArrayX a_c;     ///< n_a cell-center angles
  ArrayX R_f;     ///< n_r+1 face radii; R_f[0] = 0 (pole), R_f[n_r] = sqrt(b)
  ArrayX m_r;     ///< n_r cell measures r_c[i]*dr*da (independent of angle)
  ArrayX cos_a, sin_a;    ///< direction cosines at cell-center angles
  ArrayX cos_af, sin_af;  ///< at angular-face angles A_j = (j+1)*da

  QGrid() = default;
  QGrid(int n_r_, int n_a_, double b_);

  /// s = |q|^2 / 2 at radial index i.
  double s_of(int i) const { return 0.5 * r_c[i] * r_c[i]; }

  /// Cartesian coordinates of the cell center (i, j).
  Vec2 q_of(int i, int j) const {
    return {r_c[i] * cos_a[j], r_c[i] * sin_a[j]};
  }

  double area() const { return M_PI * b; }
};

/// One spatial cell's configuration density phi(x_cell, .), n_r x n_a.
using QField = Eigen::ArrayXXd;

/// Midpoint quadrature of phi over D.
double integrate_over_D(const QGrid& g, const QField& phi);

/// Midpoint quadrature of phi * w(q) over D; w is any callable Vec2 -> double
/// finite at all cell centers.
template <typename W>
double integrate_over_D(const QGrid& g, const QField& phi, W&& w) {
  double acc = 0.0;
  for (int j = 0; j < g.n_a; ++j)
    for (int i = 0; i < g.n_r; ++i)
      acc += phi(i, j) * w(g.q_of(i, j)) * g.m_r[i];
  return acc;
}

}  // namespace pkin
