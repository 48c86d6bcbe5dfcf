#pragma once

#include "pkin/common.hpp"
#include "pkin/qgrid.hpp"

namespace pkin {

/// Uniform cell-centered box grid for the spatial domain, with a staggered
/// (MAC) layout for velocities:
///   cell (i,j) center: ((i+1/2)hx, (j+1/2)hy), i < n_x, j < n_y
///   u-face (i,j):      (i hx, (j+1/2)hy), i <= n_x  (x-normal faces)
///   v-face (i,j):      ((i+1/2)hx, j hy), j <= n_y  (y-normal faces)
/// Periodic mode keeps the duplicated closing faces synchronized
/// (u(n_x,.) == u(0,.), v(.,n_y) == v(.,0)); NoFlux mode pins them to zero.
struct XGrid {
  enum class BC { Periodic, NoFlux };

  int n_x = 0, n_y = 0;
  double L_x = 1.0, L_y = 1.0;
  double hx = 0.0, hy = 0.0;
  BC bc = BC::Periodic;

  XGrid() = default;
  XGrid(int nx, int ny, double Lx, double Ly, BC mode);

  int cells() const { return n_x * n_y; }
  int idx(int i, int j) const { return i + n_x * j; }
  double cell_x(int i) const { return (i + 0.5) * hx; }
  double cell_y(int j) const { return (j + 0.5) * hy; }
  double cell_area() const { return hx * hy; }
  bool periodic() const { return bc == BC::Periodic; }

  int wrap_x(int i) const { return (i % n_x + n_x) % n_x; }
  int wrap_y(int j) const { return (j % n_y + n_y) % n_y; }
};

/// MAC velocity + cell pressure.  u is (n_x+1) x n_y, v is n_x x (n_y+1);
/// the extra row/column is the closing face (see XGrid).
struct FlowState {
  ArrayXX u, v, p;

  FlowState() = default;
  explicit FlowState(const XGrid& g)
      : u(ArrayXX::Zero(g.n_x + 1, g.n_y)),
        v(ArrayXX::Zero(g.n_x, g.n_y + 1)),
        p(ArrayXX::Zero(g.n_x, g.n_y)) {}

  /// Re-impose the boundary-face invariant (periodic copy or zero walls).
  void sync(const XGrid& g);
  double max_speed() const {
    return std::max(u.abs().maxCoeff(), v.abs().maxCoeff());
  }
};

/// phi(t, x, q) over the whole box: one row per spatial cell, one column per
/// configuration cell (column q = qi + n_r*qj).  Columns are contiguous, so
/// spatial operators act on whole columns; q-space operators gather a row
/// into a QField.
struct PolymerField {
  int n_x = 0, n_y = 0, n_r = 0, n_a = 0;
  ArrayXX phi;  // cells x (n_r*n_a)

  PolymerField() = default;
  PolymerField(const XGrid& xg, const QGrid& qg)
      : n_x(xg.n_x),
        n_y(xg.n_y),
        n_r(qg.n_r),
        n_a(qg.n_a),
        phi(ArrayXX::Zero(xg.cells(), qg.n_r * qg.n_a)) {}

  int qcols() const { return n_r * n_a; }

  QField cell_distribution(int c) const {
    QField f(n_r, n_a);
    for (int qj = 0; qj < n_a; ++qj)
      for (int qi = 0; qi < n_r; ++qi) f(qi, qj) = phi(c, qi + n_r * qj);
    return f;
  }
  void set_cell_distribution(int c, const QField& f) {
    for (int qj = 0; qj < n_a; ++qj)
      for (int qi = 0; qi < n_r; ++qi) phi(c, qi + n_r * qj) = f(qi, qj);
  }

  /// n_P(x) = int_D phi dq per cell, as an n_x x n_y array.
  ArrayXX number_density(const QGrid& qg) const;
  /// Total polymer mass int_Omega int_D phi.
  double mass(const XGrid& xg, const QGrid& qg) const;
};

/// Cell-centered velocity gradient (each entry an n_x x n_y array).
struct GradField {
  ArrayXX dudx, dudy, dvdx, dvdy;
  Mat2 at(int i, int j) const {
    Mat2 G;
    G << dudx(i, j), dudy(i, j), dvdx(i, j), dvdy(i, j);
    return G;
  }
};

/// Cell-centered symmetric strain rate D(v) components.
struct StrainField {
  ArrayXX xx, xy, yy;
  /// |D|^2 = D:D per cell.
  ArrayXX norm2() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
};

}  // namespace pkin
