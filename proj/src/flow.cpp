#include "pkin/flow.hpp"

#include <vector>

namespace pkin {

namespace {

/// Node (corner) average of a cell-centered array.  Periodic wraps; NoFlux
/// clamps (nearest-cell extrapolation, only used for coefficients).
double node_avg(const XGrid& g, const ArrayXX& c, int i, int j) {
  auto cx = [&](int a) {
    return g.periodic() ? g.wrap_x(a) : std::clamp(a, 0, g.n_x - 1);
  };
  auto cy = [&](int a) {
    return g.periodic() ? g.wrap_y(a) : std::clamp(a, 0, g.n_y - 1);
  };
  return 0.25 * (c(cx(i - 1), cy(j - 1)) + c(cx(i), cy(j - 1)) +
                 c(cx(i - 1), cy(j)) + c(cx(i), cy(j)));
}

void check_residual(const Eigen::SparseMatrix<double>& A,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                    const char* what) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double r = (A * x - b).cwiseAbs().maxCoeff() / scale;
  if (!(r <= 1e-10))
    throw solver_error(std::string(what) + ": solve residual " +
                       std::to_string(r) + " > 1e-10");
}

}  // namespace

PoissonSolver::PoissonSolver(const XGrid& g)
    : n_x_(g.n_x), n_y_(g.n_y), area_(g.cell_area()) {
  const int nc = g.cells();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<size_t>(nc));
  ArrayX diag = ArrayX::Zero(nc);
  auto face = [&](int ca, int cb, double w) {
    if (ca != 0) diag[ca] += w;
    if (cb != 0) diag[cb] += w;
    if (ca != 0 && cb != 0) {
      trip.emplace_back(ca, cb, -w);
      trip.emplace_back(cb, ca, -w);
    }
  };
  const int i0 = g.periodic() ? 0 : 1;
  for (int j = 0; j < g.n_y; ++j)
    for (int i = i0; i < g.n_x; ++i)
      face(g.idx(g.wrap_x(i - 1), j), g.idx(i, j), g.hy / g.hx);
  const int j0 = g.periodic() ? 0 : 1;
  for (int j = j0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i)
      face(g.idx(i, g.wrap_y(j - 1)), g.idx(i, j), g.hx / g.hy);
  diag[0] = 1.0;  // pinned cell removes the constant nullspace
  for (int c = 0; c < nc; ++c) trip.emplace_back(c, c, diag[c]);
  A_.resize(nc, nc);
  A_.setFromTriplets(trip.begin(), trip.end());
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
  ldlt_->compute(A_);
  if (ldlt_->info() != Eigen::Success)
    throw solver_error("pressure solver: factorization failed");
}

ArrayXX PoissonSolver::solve(const ArrayXX& rhs) const {
  const int nc = n_x_ * n_y_;
  Eigen::VectorXd b(nc);
  for (int j = 0; j < n_y_; ++j)
    for (int i = 0; i < n_x_; ++i) b[i + n_x_ * j] = -area_ * rhs(i, j);
  b[0] = 0.0;
  const Eigen::VectorXd q = ldlt_->solve(b);
  check_residual(A_, q, b, "pressure solver");
  ArrayXX out(n_x_, n_y_);
  const double mean = q.mean();
  for (int j = 0; j < n_y_; ++j)
    for (int i = 0; i < n_x_; ++i) out(i, j) = q[i + n_x_ * j] - mean;
  return out;
}

ArrayXX divergence(const XGrid& g, const FlowState& s) {
  ArrayXX d(g.n_x, g.n_y);
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i)
      d(i, j) = (s.u(i + 1, j) - s.u(i, j)) / g.hx +
                (s.v(i, j + 1) - s.v(i, j)) / g.hy;
  return d;
}

double project(const XGrid& g, FlowState& s, const PoissonSolver& poisson,
               double dt) {
  s.sync(g);
  ArrayXX q = ArrayXX::Zero(g.n_x, g.n_y);
  for (int pass = 0; pass < 2; ++pass) {
    const ArrayXX div = divergence(g, s);
    if (pass == 1 && div.abs().maxCoeff() <= 1e-12) break;
    const ArrayXX dq = poisson.solve(div);
    q += dq;
    const int i0 = g.periodic() ? 0 : 1;
    for (int j = 0; j < g.n_y; ++j)
      for (int i = i0; i < g.n_x; ++i)
        s.u(i, j) -= (dq(i, j) - dq(g.wrap_x(i - 1), j)) / g.hx;
    const int j0 = g.periodic() ? 0 : 1;
    for (int j = j0; j < g.n_y; ++j)
      for (int i = 0; i < g.n_x; ++i)
        s.v(i, j) -= (dq(i, j) - dq(i, g.wrap_y(j - 1))) / g.hy;
    s.sync(g);
  }
  s.p = q / dt;
  return divergence(g, s).abs().maxCoeff();
}

GradField velocity_gradient(const XGrid& g, const FlowState& s) {
  GradField out;
  out.dudx.resize(g.n_x, g.n_y);
  out.dudy.resize(g.n_x, g.n_y);
  out.dvdx.resize(g.n_x, g.n_y);
  out.dvdy.resize(g.n_x, g.n_y);
  // u with mirror ghosts across NoFlux walls (no-slip tangential value).
  auto u_at = [&](int i, int jj) -> double {
    if (g.periodic()) return s.u(i, g.wrap_y(jj));
    if (jj < 0) return -s.u(i, 0);
    if (jj >= g.n_y) return -s.u(i, g.n_y - 1);
    return s.u(i, jj);
  };
  auto v_at = [&](int ii, int j) -> double {
    if (g.periodic()) return s.v(g.wrap_x(ii), j);
    if (ii < 0) return -s.v(0, j);
    if (ii >= g.n_x) return -s.v(g.n_x - 1, j);
    return s.v(ii, j);
  };
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < g.n_x; ++i) {
      out.dudx(i, j) = (s.u(i + 1, j) - s.u(i, j)) / g.hx;
      out.dvdy(i, j) = (s.v(i, j + 1) - s.v(i, j)) / g.hy;
      out.dudy(i, j) = 0.5 *
                       ((u_at(i, j + 1) - u_at(i, j - 1)) +
                        (u_at(i + 1, j + 1) - u_at(i + 1, j - 1))) /
                       (2.0 * g.hy);
      out.dvdx(i, j) = 0.5 *
                       ((v_at(i + 1, j) - v_at(i - 1, j)) +
                        (v_at(i + 1, j + 1) - v_at(i - 1, j + 1))) /
                       (2.0 * g.hx);
    }
  return out;
}

StrainField strain_rate(const XGrid& g, const FlowState& s) {
  const GradField gr = velocity_gradient(g, s);
  StrainField D;
  D.xx = gr.dudx;
  D.yy = gr.dvdy;
  D.xy = 0.5 * (gr.dudy + gr.dvdx);
  return D;
}

double kinetic_energy(const XGrid& g, const FlowState& s) {
  double acc = 0.0;
  const int nu = g.periodic() ? g.n_x : g.n_x + 1;
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < nu; ++i) acc += sqr(s.u(i, j));
  const int nv = g.periodic() ? g.n_y : g.n_y + 1;
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < g.n_x; ++i) acc += sqr(s.v(i, j));
  return 0.5 * acc * g.cell_area();
}

double forcing_power(const XGrid& g, const FlowState& s, const Forcing& f) {
  if (f.zero()) return 0.0;
  double acc = 0.0;
  const int nu = g.periodic() ? g.n_x : g.n_x + 1;
  for (int j = 0; j < g.n_y; ++j)
    for (int i = 0; i < nu; ++i)
      acc += f.eval(i * g.hx, g.cell_y(j), g.L_x, g.L_y).x() * s.u(i, j);
  const int nv = g.periodic() ? g.n_y : g.n_y + 1;
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < g.n_x; ++i)
      acc += f.eval(g.cell_x(i), j * g.hy, g.L_x, g.L_y).y() * s.v(i, j);
  return acc * g.cell_area();
}

FlowState momentum_step(const XGrid& g, const FlowState& state,
                        const ArrayXX& theta, const StressField& tau,
                        const Forcing& f, double dt,
                        const MaterialFunctions& mat,
                        const PoissonSolver& poisson) {
  if (!(dt > 0.0)) throw std::domain_error("momentum_step: dt must be > 0");
  const int nx = g.n_x, ny = g.n_y;
  const double cfl = dt * std::max(state.u.abs().maxCoeff() / g.hx,
                                   state.v.abs().maxCoeff() / g.hy);
  if (cfl > 0.9)
    throw cfl_error("momentum_step: advective CFL " + std::to_string(cfl) +
                    " > 0.9");

  FlowState s = state;
  s.sync(g);

  // Viscosity at cells and nodes.
  ArrayXX nu_c(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) nu_c(i, j) = mat.nu(theta(i, j));
  ArrayXX nu_n(nx + 1, ny + 1), txy_n(nx + 1, ny + 1);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      nu_n(i, j) = node_avg(g, nu_c, i, j);
      txy_n(i, j) = node_avg(g, tau.xy, i, j);
    }

  // Node velocities (ghosts give exactly zero tangential value at walls).
  ArrayXX uv_n(nx + 1, ny + 1), dudy_n(nx + 1, ny + 1), dvdx_n(nx + 1, ny + 1);
  auto uval = [&](int i, int jj) -> double {
    if (g.periodic()) return s.u(i, g.wrap_y(jj));
    if (jj < 0) return -s.u(i, 0);
    if (jj >= ny) return -s.u(i, ny - 1);
    return s.u(i, jj);
  };
  auto vval = [&](int ii, int j) -> double {
    if (g.periodic()) return s.v(g.wrap_x(ii), j);
    if (ii < 0) return -s.v(0, j);
    if (ii >= nx) return -s.v(nx - 1, j);
    return s.v(ii, j);
  };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double un = 0.5 * (uval(i, j) + uval(i, j - 1));
      const double vn = 0.5 * (vval(i, j) + vval(i - 1, j));
      uv_n(i, j) = un * vn;
      dudy_n(i, j) = (uval(i, j) - uval(i, j - 1)) / g.hy;
      dvdx_n(i, j) = (vval(i, j) - vval(i - 1, j)) / g.hx;
    }
  // Cell-centered velocities for the square advective fluxes.
  ArrayXX uc(nx, ny), vc(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      uc(i, j) = 0.5 * (s.u(i, j) + s.u(i + 1, j));
      vc(i, j) = 0.5 * (s.v(i, j) + s.v(i, j + 1));
    }

  const double area = g.cell_area();
  const double ax = g.hy / g.hx, ay = g.hx / g.hy;

  // ---------------- u component ----------------------------------------
  {
    const int ia = g.periodic() ? 0 : 1;     // first unknown face index
    const int nuf = g.periodic() ? nx : nx - 1;  // unknowns per row
    const int n = nuf * ny;
    auto uk = [&](int i, int j) { return (i - ia) + nuf * j; };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * static_cast<size_t>(n));
    Eigen::VectorXd rhs(n);
    for (int j = 0; j < ny; ++j)
      for (int i = ia; i < ia + nuf; ++i) {
        const int im = g.wrap_x(i - 1);  // west cell (valid in both modes)
        const int k = uk(i, j);
        // explicit: advection, transpose viscous term, stress, forcing
        const double adv =
            (sqr(uc(i % nx, j)) - sqr(uc(im, j))) / g.hx +
            (uv_n(i, j + 1) - uv_n(i, j)) / g.hy;
        const double trans =
            (nu_n(i, j + 1) * dvdx_n(i, j + 1) - nu_n(i, j) * dvdx_n(i, j)) /
            g.hy;
        const double str =
            (tau.xx(i % nx, j) - tau.xx(im, j)) / g.hx +
            (txy_n(i, j + 1) - txy_n(i, j)) / g.hy;
        const double fx =
            f.zero() ? 0.0 : f.eval(i * g.hx, g.cell_y(j), g.L_x, g.L_y).x();
        rhs[k] = area * (s.u(i, j) / dt - adv + trans + str + fx);
        // implicit: d/dx(2 nu du/dx) + d/dy(nu du/dy)
        double diag = area / dt;
        const double wE = 2.0 * nu_c(i % nx, j) * ax;
        const double wW = 2.0 * nu_c(im, j) * ax;
        diag += wE + wW;
        if (g.periodic()) {
          trip.emplace_back(k, uk((i + 1) % nx, j), -wE);
          trip.emplace_back(k, uk((i + nx - 1) % nx, j), -wW);
        } else {
          if (i + 1 < ia + nuf) trip.emplace_back(k, uk(i + 1, j), -wE);
          if (i - 1 >= ia) trip.emplace_back(k, uk(i - 1, j), -wW);
          // walls: neighbor value is 0 (Dirichlet), diag keeps the weight
        }
        // north/south neighbors
        const double wN = nu_n(i, j + 1) * ay;
        const double wS = nu_n(i, j) * ay;
        if (g.periodic()) {
          diag += wN + wS;
          trip.emplace_back(k, uk(i, (j + 1) % ny), -wN);
          trip.emplace_back(k, uk(i, (j + ny - 1) % ny), -wS);
        } else {
          if (j + 1 < ny) {
            diag += wN;
            trip.emplace_back(k, uk(i, j + 1), -wN);
          } else {
            diag += 2.0 * wN;  // mirror ghost: flux = 2 nu u / hy
          }
          if (j - 1 >= 0) {
            diag += wS;
            trip.emplace_back(k, uk(i, j - 1), -wS);
          } else {
            diag += 2.0 * wS;
          }
        }
        trip.emplace_back(k, k, diag);
      }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
      throw solver_error("momentum_step: u factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    check_residual(A, x, rhs, "momentum_step u");
    for (int j = 0; j < ny; ++j)
      for (int i = ia; i < ia + nuf; ++i) s.u(i, j) = x[uk(i, j)];
  }

  // ---------------- v component ----------------------------------------
  {
    const int ja = g.periodic() ? 0 : 1;
    const int nvf = g.periodic() ? ny : ny - 1;
    const int n = nx * nvf;
    auto vk = [&](int i, int j) { return i + nx * (j - ja); };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * static_cast<size_t>(n));
    Eigen::VectorXd rhs(n);
    for (int j = ja; j < ja + nvf; ++j)
      for (int i = 0; i < nx; ++i) {
        const int jm = g.wrap_y(j - 1);  // south cell
        const int k = vk(i, j);
        const double adv =
            (uv_n(i + 1, j) - uv_n(i, j)) / g.hx +
            (sqr(vc(i, j % ny)) - sqr(vc(i, jm))) / g.hy;
        const double trans =
            (nu_n(i + 1, j) * dudy_n(i + 1, j) - nu_n(i, j) * dudy_n(i, j)) /
            g.hx;
        const double str =
            (txy_n(i + 1, j) - txy_n(i, j)) / g.hx +
            (tau.yy(i, j % ny) - tau.yy(i, jm)) / g.hy;
        const double fy =
            f.zero() ? 0.0 : f.eval(g.cell_x(i), j * g.hy, g.L_x, g.L_y).y();
        rhs[k] = area * (s.v(i, j) / dt - adv + trans + str + fy);
        double diag = area / dt;
        const double wN = 2.0 * nu_c(i, j % ny) * ay;
        const double wS = 2.0 * nu_c(i, jm) * ay;
        diag += wN + wS;
        if (g.periodic()) {
          trip.emplace_back(k, vk(i, (j + 1) % ny), -wN);
          trip.emplace_back(k, vk(i, j == 0 ? ny - 1 : j - 1), -wS);
        } else {
          if (j + 1 < ja + nvf) trip.emplace_back(k, vk(i, j + 1), -wN);
          if (j - 1 >= ja) trip.emplace_back(k, vk(i, j - 1), -wS);
        }
        const double wE = nu_n(i + 1, j) * ax;
        const double wW = nu_n(i, j) * ax;
        if (g.periodic()) {
          diag += wE + wW;
          trip.emplace_back(k, vk((i + 1) % nx, j), -wE);
          trip.emplace_back(k, vk((i + nx - 1) % nx, j), -wW);
        } else {
          if (i + 1 < nx) {
            diag += wE;
            trip.emplace_back(k, vk(i + 1, j), -wE);
          } else {
            diag += 2.0 * wE;
          }
          if (i - 1 >= 0) {
            diag += wW;
            trip.emplace_back(k, vk(i - 1, j), -wW);
          } else {
            diag += 2.0 * wW;
          }
        }
        trip.emplace_back(k, k, diag);
      }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
      throw solver_error("momentum_step: v factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    check_residual(A, x, rhs, "momentum_step v");
    for (int j = ja; j < ja + nvf; ++j)
      for (int i = 0; i < nx; ++i) s.v(i, j) = x[vk(i, j)];
  }

  s.sync(g);
  const double maxdiv = project(g, s, poisson, dt);
  if (!(maxdiv <= 1e-10))
    throw solver_error("momentum_step: post-projection divergence " +
                       std::to_string(maxdiv) + " > 1e-10");
  return s;
}

}  // namespace pkin
