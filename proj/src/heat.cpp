#include "pkin/heat.hpp"

#include <Eigen/SparseCholesky>
#include <vector>

namespace pkin {

namespace {

double harmonic(double a, double b) {
  const double s = a + b;
  return s > 0.0 ? 2.0 * a * b / s : 0.0;
}

}  // namespace

TruncationValues truncation_eval(const Truncation& tr, double s) {
  if (!(tr.k >= 1.0) || !(tr.eps > 0.0) || !(tr.eps < 1.0))
    throw std::domain_error("truncation_eval: need k >= 1 and eps in (0,1)");
  TruncationValues v;
  const double a = std::abs(s), sg = s < 0.0 ? -1.0 : 1.0;
  if (a <= tr.k) {
    v.T = s;
    v.Tp = 1.0;
    v.Tpp = 0.0;
  } else if (a >= tr.k + tr.eps) {
    v.T = sg * (tr.k + 0.5 * tr.eps);
    v.Tp = 0.0;
    v.Tpp = 0.0;
  } else {
    // quadratic blend: T(|s|) = -(|s|^2 - 2(k+eps)|s| + k^2) / (2 eps)
    v.T = sg * (-(a * a - 2.0 * (tr.k + tr.eps) * a + tr.k * tr.k) /
                (2.0 * tr.eps));
    v.Tp = (tr.k + tr.eps - a) / tr.eps;  // in (0,1), continuous at both ends
    v.Tpp = -sg / tr.eps;                 // s T'' <= 0
  }
  return v;
}

HeatStepResult heat_step(const XGrid& g, const ArrayXX& theta,
                         const FlowState& vel, const ArrayXX& visc_src,
                         const ArrayXX& q_src, const ArrayXX& coup_src,
                         double dt, const MaterialFunctions& mat,
                         int picard_iters) {
  if (!(dt > 0.0)) throw std::domain_error("heat_step: dt must be > 0");
  if (picard_iters < 1) picard_iters = 1;
  const int nx = g.n_x, ny = g.n_y, nc = g.cells();
  const double cfl = dt * std::max(vel.u.abs().maxCoeff() / g.hx,
                                   vel.v.abs().maxCoeff() / g.hy);
  if (cfl > 0.9)
    throw cfl_error("heat_step: advective CFL " + std::to_string(cfl) +
                    " > 0.9");

  // --- upwind advection --------------------------------------------------
  ArrayXX th = theta;
  if (vel.max_speed() > 0.0) {
    const double cx = dt / g.hx, cy = dt / g.hy;
    const int i0 = g.periodic() ? 0 : 1;
    for (int j = 0; j < ny; ++j)
      for (int i = i0; i < nx; ++i) {
        const double uf = vel.u(i, j);
        if (uf == 0.0) continue;
        const int iL = g.wrap_x(i - 1);
        const double f = cx * uf * (uf > 0.0 ? theta(iL, j) : theta(i, j));
        th(iL, j) -= f;
        th(i, j) += f;
      }
    const int j0 = g.periodic() ? 0 : 1;
    for (int j = j0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double vf = vel.v(i, j);
        if (vf == 0.0) continue;
        const int jB = g.wrap_y(j - 1);
        const double f = cy * vf * (vf > 0.0 ? theta(i, jB) : theta(i, j));
        th(i, jB) -= f;
        th(i, j) += f;
      }
  }

  // --- implicit conduction, Picard on kappa(theta) -----------------------
  HeatStepResult out;
  out.kfx = ArrayXX::Zero(nx + 1, ny);
  out.kfy = ArrayXX::Zero(nx, ny + 1);
  const double adt = g.cell_area() / dt;
  ArrayXX iter = th;  // kappa argument
  ArrayXX cond = th;  // solution of the conduction solve
  for (int sweep = 0; sweep < picard_iters; ++sweep) {
    const int i0 = g.periodic() ? 0 : 1;
    const int j0 = g.periodic() ? 0 : 1;
    for (int j = 0; j < ny; ++j)
      for (int i = i0; i < nx; ++i)
        out.kfx(i, j) = harmonic(mat.kappa(iter(g.wrap_x(i - 1), j)),
                                 mat.kappa(iter(i, j)));
    for (int j = j0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out.kfy(i, j) = harmonic(mat.kappa(iter(i, g.wrap_y(j - 1))),
                                 mat.kappa(iter(i, j)));

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * static_cast<size_t>(nc));
    ArrayX diag = ArrayX::Constant(nc, adt);
    auto face = [&](int ca, int cb, double w) {
      diag[ca] += w;
      diag[cb] += w;
      trip.emplace_back(ca, cb, -w);
      trip.emplace_back(cb, ca, -w);
    };
    for (int j = 0; j < ny; ++j)
      for (int i = i0; i < nx; ++i)
        face(g.idx(g.wrap_x(i - 1), j), g.idx(i, j),
             out.kfx(i, j) * g.hy / g.hx);
    for (int j = j0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        face(g.idx(i, g.wrap_y(j - 1)), g.idx(i, j),
             out.kfy(i, j) * g.hx / g.hy);
    for (int c = 0; c < nc; ++c) trip.emplace_back(c, c, diag[c]);

    Eigen::SparseMatrix<double> A(nc, nc);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
      throw solver_error("heat_step: conduction factorization failed");
    Eigen::VectorXd b(nc);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) b[g.idx(i, j)] = adt * th(i, j);
    const Eigen::VectorXd x = solver.solve(b);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double resid = (A * x - b).cwiseAbs().maxCoeff() / scale;
    if (!(resid <= 1e-10))
      throw solver_error("heat_step: conduction residual " +
                         std::to_string(resid) + " > 1e-10");
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) cond(i, j) = x[g.idx(i, j)];
    iter = cond;
  }
  out.theta_cond = cond;

  // --- explicit sources ---------------------------------------------------
  out.theta = cond + dt * (visc_src + q_src + coup_src);
  if (!(out.theta.minCoeff() > 0.0))
    throw positivity_error(
        "heat_step: temperature lost positivity (min = " +
        std::to_string(out.theta.minCoeff()) +
        "); the time step is too large for the source terms");
  return out;
}

std::vector<TestFunction> default_test_functions(const XGrid& g) {
  const double kx = 2.0 * M_PI / g.L_x, ky = 2.0 * M_PI / g.L_y;
  std::vector<TestFunction> fns;
  fns.push_back({"unit", [](double, double) { return 1.0; }});
  fns.push_back({"cosine_well", [kx, ky](double x, double y) {
                   return 1.0 + 0.5 * std::cos(kx * x) * std::cos(ky * y);
                 }});
  fns.push_back({"sine_product", [kx, ky](double x, double y) {
                   return (1.0 + 0.3 * std::sin(kx * x)) *
                          (1.0 + 0.3 * std::sin(ky * y));
                 }});
  return fns;
}

std::vector<double> renormalized_inequality_residual(
    const XGrid& g, const RunHistory& h, int tr_k, double eps,
    const std::vector<TestFunction>& fns) {
  const size_t N = h.steps.size();
  if (h.theta.size() != N + 1 || h.t.size() != N + 1 || N == 0)
    throw std::invalid_argument(
        "renormalized_inequality_residual: history is incomplete (need N+1 "
        "levels and N intervals)");
  const Truncation tr{static_cast<double>(tr_k), eps};
  const int nx = g.n_x, ny = g.n_y;
  const double area = g.cell_area();
  const double T_end = h.t.back();

  // Ramp values at the stored time levels (differences telescope exactly).
  std::vector<double> ramp(N + 1);
  for (size_t n = 0; n <= N; ++n) ramp[n] = 1.0 - h.t[n] / T_end;

  std::vector<double> out;
  out.reserve(fns.size());
  for (const auto& fn : fns) {
    ArrayXX G(nx, ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) G(i, j) = fn.g(g.cell_x(i), g.cell_y(j));

    double R = 0.0;
    // initial-data term: - <T_k(theta_0), psi(0)>
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        R -= truncation_eval(tr, h.theta[0](i, j)).T * ramp[0] * G(i, j) *
             area;

    for (size_t n = 0; n < N; ++n) {
      const ArrayXX& th0 = h.theta[n];
      const ArrayXX& th1 = h.theta[n + 1];
      const IntervalData& sd = h.steps[n];
      const double rho = ramp[n];
      const double drho = ramp[n] - ramp[n + 1];  // = dt/T for the ramp

      ArrayXX Tk0(nx, ny), Tk1(nx, ny), Tkc(nx, ny), Tp(nx, ny);
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          Tk0(i, j) = truncation_eval(tr, th0(i, j)).T;
          Tk1(i, j) = truncation_eval(tr, th1(i, j)).T;
          const auto tv = truncation_eval(tr, sd.theta_cond(i, j));
          Tkc(i, j) = tv.T;
          Tp(i, j) = tv.Tp;
        }

      // time term (Abel): sum_n <T_k(theta^{n+1}), psi^n - psi^{n+1}>
      R += (Tk1 * G).sum() * drho * area;

      // advection: <div(u T_k(theta^n)_up), psi^n> via exact discrete
      // by-parts: -sum_faces F_f (psi_R - psi_L) * len
      const int i0 = g.periodic() ? 0 : 1;
      for (int j = 0; j < ny; ++j)
        for (int i = i0; i < nx; ++i) {
          const double uf = sd.adv_u(i, j);
          if (uf == 0.0) continue;
          const int iL = g.wrap_x(i - 1);
          const double up = uf > 0.0 ? Tk0(iL, j) : Tk0(i, j);
          R -= h.dt * uf * up * (G(i, j) - G(iL, j)) * rho * g.hy;
        }
      const int j0 = g.periodic() ? 0 : 1;
      for (int j = j0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double vf = sd.adv_v(i, j);
          if (vf == 0.0) continue;
          const int jB = g.wrap_y(j - 1);
          const double up = vf > 0.0 ? Tk0(i, jB) : Tk0(i, j);
          R -= h.dt * vf * up * (G(i, j) - G(i, jB)) * rho * g.hx;
        }

      // conduction: + sum_faces kappa_f grad_f(T_k(theta_cond)) . grad_f(psi)
      for (int j = 0; j < ny; ++j)
        for (int i = i0; i < nx; ++i) {
          const int iL = g.wrap_x(i - 1);
          R += h.dt * sd.kfx(i, j) * (Tkc(i, j) - Tkc(iL, j)) / g.hx *
               (G(i, j) - G(iL, j)) / g.hx * rho * area;
        }
      for (int j = j0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const int jB = g.wrap_y(j - 1);
          R += h.dt * sd.kfy(i, j) * (Tkc(i, j) - Tkc(i, jB)) / g.hy *
               (G(i, j) - G(i, jB)) / g.hy * rho * area;
        }

      // sources: - <T'(theta_cond) S, psi^n>
      R -= h.dt *
           (Tp * (sd.visc_src + sd.q_src + sd.coup_src) * G).sum() * rho *
           area;
    }
    out.push_back(R);
  }
  return out;
}

}  // namespace pkin
