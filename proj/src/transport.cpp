#include "pkin/transport.hpp"

#include <Eigen/SparseCholesky>
#include <vector>

namespace pkin {

namespace {

double harmonic(double a, double b) {
  const double s = a + b;
  return s > 0.0 ? 2.0 * a * b / s : 0.0;
}

}  // namespace

PolymerField x_transport_step(const XGrid& xg, const QGrid& qg,
                              const PolymerField& poly, const FlowState& vel,
                              const ArrayXX& theta, double dt) {
  (void)qg;  // part of the module interface; the stencil is q-independent
  if (!(dt > 0.0)) throw std::domain_error("x_transport_step: dt must be > 0");
  const int nx = xg.n_x, ny = xg.n_y, nc = xg.cells();
  const double cfl =
      dt * std::max(vel.u.abs().maxCoeff() / xg.hx,
                    vel.v.abs().maxCoeff() / xg.hy);
  if (cfl > 0.9)
    throw cfl_error("x_transport_step: advective CFL " + std::to_string(cfl) +
                    " > 0.9");

  PolymerField out = poly;

  // --- explicit conservative upwind advection ---------------------------
  if (vel.max_speed() > 0.0) {
    const double cx = dt / xg.hx, cy = dt / xg.hy;
    // x-faces: periodic has nx distinct faces per row (face i between cells
    // i-1 and i, wrapped); NoFlux skips the wall faces (u = 0 there anyway).
    const int i0 = xg.periodic() ? 0 : 1;
    for (int j = 0; j < ny; ++j)
      for (int i = i0; i < nx; ++i) {
        const double uf = vel.u(i, j);
        if (uf == 0.0) continue;
        const int cL = xg.idx(xg.wrap_x(i - 1), j), cR = xg.idx(i, j);
        const int cu = uf > 0.0 ? cL : cR;
        for (int k = 0; k < poly.qcols(); ++k) {
          const double f = cx * uf * poly.phi(cu, k);
          out.phi(cL, k) -= f;
          out.phi(cR, k) += f;
        }
      }
    const int j0 = xg.periodic() ? 0 : 1;
    for (int j = j0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double vf = vel.v(i, j);
        if (vf == 0.0) continue;
        const int cB = xg.idx(i, xg.wrap_y(j - 1)), cT = xg.idx(i, j);
        const int cu = vf > 0.0 ? cB : cT;
        for (int k = 0; k < poly.qcols(); ++k) {
          const double f = cy * vf * poly.phi(cu, k);
          out.phi(cB, k) -= f;
          out.phi(cT, k) += f;
        }
      }
  }

  // --- implicit diffusion, coefficient theta at faces (harmonic mean) ----
  // (area/dt) phi_new + sum_f theta_f (dphi/dn) len_f = (area/dt) phi_star.
  const double adt = xg.cell_area() / dt;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<size_t>(nc));
  ArrayX diag = ArrayX::Constant(nc, adt);
  auto face = [&](int ca, int cb, double th_f, double len_over_h) {
    const double w = th_f * len_over_h;
    diag[ca] += w;
    diag[cb] += w;
    trip.emplace_back(ca, cb, -w);
    trip.emplace_back(cb, ca, -w);
  };
  const int i0 = xg.periodic() ? 0 : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = i0; i < nx; ++i) {
      const int iL = xg.wrap_x(i - 1);
      face(xg.idx(iL, j), xg.idx(i, j), harmonic(theta(iL, j), theta(i, j)),
           xg.hy / xg.hx);
    }
  const int j0 = xg.periodic() ? 0 : 1;
  for (int j = j0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int jB = xg.wrap_y(j - 1);
      face(xg.idx(i, jB), xg.idx(i, j), harmonic(theta(i, jB), theta(i, j)),
           xg.hx / xg.hy);
    }
  for (int c = 0; c < nc; ++c) trip.emplace_back(c, c, diag[c]);

  Eigen::SparseMatrix<double> A(nc, nc);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success)
    throw solver_error("x_transport_step: diffusion factorization failed");

  const Eigen::MatrixXd B = out.phi.matrix() * adt;
  const Eigen::MatrixXd X = solver.solve(B);
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  const double resid = (A * X - B).cwiseAbs().maxCoeff() / scale;
  if (!(resid <= 1e-10))
    throw solver_error("x_transport_step: diffusion solve residual " +
                       std::to_string(resid) + " > 1e-10");
  out.phi = X.array();
  return out;
}

BoundsCheck number_density_bounds(const XGrid& xg, const QGrid& qg,
                                  const PolymerField& poly,
                                  std::pair<double, double> initial_bounds) {
  (void)xg;
  BoundsCheck b;
  b.lo0 = initial_bounds.first;
  b.hi0 = initial_bounds.second;
  const ArrayXX nP = poly.number_density(qg);
  b.min_nP = nP.minCoeff();
  b.max_nP = nP.maxCoeff();
  b.tol = 1e-8 + 1e-6 * std::abs(b.hi0);
  b.pass = (b.min_nP >= b.lo0 - b.tol) && (b.max_nP <= b.hi0 + b.tol);
  return b;
}

}  // namespace pkin
