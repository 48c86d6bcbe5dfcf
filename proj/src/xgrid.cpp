#include "pkin/xgrid.hpp"

namespace pkin {

XGrid::XGrid(int nx, int ny, double Lx, double Ly, BC mode)
    : n_x(nx), n_y(ny), L_x(Lx), L_y(Ly), bc(mode) {
  if (nx < 2 || ny < 2) throw config_error("xgrid: need n_x, n_y >= 2");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw config_error("xgrid: need L > 0");
  hx = Lx / nx;
  hy = Ly / ny;
}

void FlowState::sync(const XGrid& g) {
  if (g.periodic()) {
    for (int j = 0; j < g.n_y; ++j) u(g.n_x, j) = u(0, j);
    for (int i = 0; i < g.n_x; ++i) v(i, g.n_y) = v(i, 0);
  } else {
    for (int j = 0; j < g.n_y; ++j) {
      u(0, j) = 0.0;
      u(g.n_x, j) = 0.0;
    }
    for (int i = 0; i < g.n_x; ++i) {
      v(i, 0) = 0.0;
      v(i, g.n_y) = 0.0;
    }
  }
}

ArrayXX PolymerField::number_density(const QGrid& qg) const {
  ArrayXX nP = ArrayXX::Zero(n_x, n_y);
  for (int qj = 0; qj < n_a; ++qj)
    for (int qi = 0; qi < n_r; ++qi) {
      const double w = qg.m_r[qi];
      const int k = qi + n_r * qj;
      for (int j = 0; j < n_y; ++j)
        for (int i = 0; i < n_x; ++i) nP(i, j) += w * phi(i + n_x * j, k);
    }
  return nP;
}

double PolymerField::mass(const XGrid& xg, const QGrid& qg) const {
  return number_density(qg).sum() * xg.cell_area();
}

}  // namespace pkin
