#include "pkin/thermo.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pkin {

namespace {

double harm(double a, double b) {
  const double s = a + b;
  return s > 0.0 ? 2.0 * a * b / s : 0.0;
}

/// Quadrature weights per configuration column k = qi + n_r*qj:
/// plain measure, U_e-weighted, U_eta-weighted.
struct QWeights {
  Eigen::ArrayXd m, mUe, mUeta;
};

QWeights q_weights(const QGrid& g, const PotentialSpec& spec) {
  QWeights w;
  const int nq = g.n_r * g.n_a;
  w.m.resize(nq);
  w.mUe.resize(nq);
  w.mUeta.resize(nq);
  Eigen::ArrayXd Ue(g.n_r), Ueta(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    const auto pv = eval_potential(spec, g.s_of(i));
    Ue[i] = pv.U_e;
    Ueta[i] = pv.U_eta;
  }
  for (int qj = 0; qj < g.n_a; ++qj)
    for (int qi = 0; qi < g.n_r; ++qi) {
      const int k = qi + g.n_r * qj;
      w.m[k] = g.m_r[qi];
      w.mUe[k] = Ue[qi] * g.m_r[qi];
      w.mUeta[k] = Ueta[qi] * g.m_r[qi];
    }
  return w;
}

/// Spatial Fisher term theta |grad_x phi|^2 / phi as a per-cell array
/// (flat, cell index i + n_x*j), assembled on the transport stencil:
/// harmonic theta faces, arithmetic phi mean, 0/0 -> 0, interior faces only
/// under no-flux walls.  Each face deposits half its value to both cells.
Eigen::ArrayXd x_fisher_cells(const XGrid& xg, const QGrid& qg,
                              const ArrayXX& theta, const PolymerField& poly) {
  const int nx = xg.n_x, ny = xg.n_y;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(xg.cells());
  const int nq = qg.n_r * qg.n_a;
  Eigen::ArrayXd wm(nq);
  for (int qj = 0; qj < qg.n_a; ++qj)
    for (int qi = 0; qi < qg.n_r; ++qi) wm[qi + qg.n_r * qj] = qg.m_r[qi];

  auto face = [&](int cL, int cR, double h) {
    const double tf =
        harm(theta(cL % nx, cL / nx), theta(cR % nx, cR / nx));
    double acc = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double pL = poly.phi(cL, k), pR = poly.phi(cR, k);
      const double pm = 0.5 * (pL + pR);
      if (pm <= 0.0) continue;  // 0/0 -> 0 where phi vanishes
      const double d = (pR - pL) / h;
      acc += wm[k] * d * d / pm;
    }
    acc *= tf;
    out[cL] += 0.5 * acc;
    out[cR] += 0.5 * acc;
  };

  const bool per = xg.periodic();
  for (int j = 0; j < ny; ++j)
    for (int i = per ? 0 : 1; i < nx; ++i)
      face(xg.idx(xg.wrap_x(i - 1), j), xg.idx(i, j), xg.hx);
  for (int j = per ? 0 : 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      face(xg.idx(i, xg.wrap_y(j - 1)), xg.idx(i, j), xg.hy);
  return out;
}

}  // namespace

EnergyFields energies(const XGrid& xg, const QGrid& qg,
                      const PotentialSpec& spec, const FlowState& vel,
                      const ArrayXX& theta, const PolymerField& poly) {
  if ((theta <= 0.0).any())
    throw positivity_error(
        "energies: temperature must be strictly positive everywhere");
  const int nx = xg.n_x, ny = xg.n_y;
  const int nc = xg.cells();
  const auto w = q_weights(qg, spec);
  const int nq = qg.n_r * qg.n_a;

  // Per-cell configuration moments.  Linear moments are matrix-vector
  // products; the log terms go column by column (columns are contiguous).
  Eigen::ArrayXd elastic_c = (poly.phi.matrix() * w.mUe.matrix()).array();
  Eigen::ArrayXd entropic_c = (poly.phi.matrix() * w.mUeta.matrix()).array();
  Eigen::ArrayXd plogp_c = Eigen::ArrayXd::Zero(nc);
  Eigen::ArrayXd mixing_c = Eigen::ArrayXd::Zero(nc);
  for (int k = 0; k < nq; ++k) {
    const auto col = poly.phi.col(k);
    plogp_c += w.m[k] * (col > 0.0).select(col * col.log(), 0.0);
    // F(s) = s (log s - 1) + 1, F(0) = 1
    mixing_c += w.m[k] * (col > 0.0).select(col * (col.log() - 1.0) + 1.0, 1.0);
  }

  const auto th = theta.reshaped();  // flat view, same cell order as idx()
  Eigen::ArrayXd logth = th.array().log();

  EnergyFields out;
  Eigen::ArrayXd psi =
      -th.array() * (logth - 1.0) + elastic_c + th.array() * (entropic_c + plogp_c);
  Eigen::ArrayXd e = th.array() + elastic_c;
  Eigen::ArrayXd eta = logth - (entropic_c + plogp_c);

  // cell-centered kinetic density for the per-cell total energy
  Eigen::ArrayXd ke_c(nc);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double uc = 0.5 * (vel.u(i, j) + vel.u(i + 1, j));
      const double vc = 0.5 * (vel.v(i, j) + vel.v(i, j + 1));
      ke_c[xg.idx(i, j)] = 0.5 * (uc * uc + vc * vc);
    }
  Eigen::ArrayXd E = ke_c + e;

  out.max_identity_error = (psi - (e - eta * th.array())).abs().maxCoeff();
  out.psi = psi.reshaped(nx, ny);
  out.e = e.reshaped(nx, ny);
  out.eta = eta.reshaped(nx, ny);
  out.E = E.reshaped(nx, ny);

  const double area = xg.cell_area();
  out.kinetic = kinetic_energy(xg, vel);  // face dual volumes (scheme-exact)
  out.heat_content = th.sum() * area;
  out.elastic = elastic_c.sum() * area;
  out.entropic = entropic_c.sum() * area;
  out.mixing = mixing_c.sum() * area;
  out.H_theta = (th.array() - 1.0 - logth).sum() * area;
  out.entropy_total = eta.sum() * area;
  out.psi_total = psi.sum() * area;
  out.total_E = out.kinetic + out.heat_content + out.elastic;
  return out;
}

XiField entropy_production(const XGrid& xg, const QGrid& qg,
                           const PotentialSpec& spec,
                           const MaterialFunctions& mat, const FlowState& vel,
                           const ArrayXX& theta, const PolymerField& poly) {
  if ((theta <= 0.0).any())
    throw positivity_error(
        "entropy_production: temperature must be strictly positive");
  const int nx = xg.n_x, ny = xg.n_y;
  XiField xi;
  xi.xi1.setZero(nx, ny);
  xi.xi2.setZero(nx, ny);
  xi.xi3.setZero(nx, ny);
  xi.xi4.setZero(nx, ny);

  // xi1: viscous heating over temperature, cellwise
  const StrainField D = strain_rate(xg, vel);
  const ArrayXX Dn2 = D.norm2();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      xi.xi1(i, j) = 2.0 * mat.nu(theta(i, j)) * Dn2(i, j) / theta(i, j);

  // xi2: conduction term on the heat stencil (harmonic kappa faces)
  const bool per = xg.periodic();
  auto cond_face = [&](int iL, int jL, int iR, int jR, double h) {
    const double tL = theta(iL, jL), tR = theta(iR, jR);
    const double kf = harm(mat.kappa(tL), mat.kappa(tR));
    const double g = (tR - tL) / h;
    const double tm = 0.5 * (tL + tR);
    const double v = kf * g * g / (tm * tm);
    xi.xi2(iL, jL) += 0.5 * v;
    xi.xi2(iR, jR) += 0.5 * v;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = per ? 0 : 1; i < nx; ++i)
      cond_face(xg.wrap_x(i - 1), j, i, j, xg.hx);
  for (int j = per ? 0 : 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      cond_face(i, xg.wrap_y(j - 1), i, j, xg.hy);

  // xi3: spatial Fisher term on the transport stencil
  const Eigen::ArrayXd x_fi = x_fisher_cells(xg, qg, theta, poly);
  xi.xi3 = x_fi.reshaped(nx, ny);

  // xi4: configuration-space dissipation, exponential-fitted fluxes
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const QField f = poly.cell_distribution(xg.idx(i, j));
      xi.xi4(i, j) = q_dissipation(qg, spec, f, theta(i, j)).xi4;
    }

  xi.integral = xi.total().sum() * xg.cell_area();
  return xi;
}

namespace {

std::size_t level_at(const RunHistory& h, double t) {
  if (h.t.empty() || h.reports.size() != h.t.size())
    throw std::invalid_argument("history is incomplete");
  std::size_t best = 0;
  double bd = std::abs(h.t[0] - t);
  for (std::size_t n = 1; n < h.t.size(); ++n) {
    const double d = std::abs(h.t[n] - t);
    if (d < bd) {
      bd = d;
      best = n;
    }
  }
  if (bd > 0.5 * h.dt + 1e-12)
    throw std::invalid_argument("requested time is not a stored level");
  return best;
}

double trapezoid(const RunHistory& h, std::size_t n,
                 double ThermoReport::* field) {
  double acc = 0.0;
  for (std::size_t m = 1; m <= n; ++m)
    acc += 0.5 * (h.t[m] - h.t[m - 1]) *
           (h.reports[m - 1].*field + h.reports[m].*field);
  return acc;
}

double energy_group(const ThermoReport& r) {
  return r.kinetic + r.H_theta + r.elastic + r.entropic + r.mixing;
}

}  // namespace

double energy_equality_residual(const RunHistory& h, double t) {
  const std::size_t n = level_at(h, t);
  const double xi_int = trapezoid(h, n, &ThermoReport::xi_instant);
  const double fv_int = trapezoid(h, n, &ThermoReport::fv_instant);
  return energy_group(h.reports[n]) + xi_int - energy_group(h.reports[0]) -
         fv_int;
}

double total_energy_balance(const RunHistory& h, double t) {
  const std::size_t n = level_at(h, t);
  const double fv_int = trapezoid(h, n, &ThermoReport::fv_instant);
  return h.reports[n].total_E - h.reports[0].total_E - fv_int;
}

std::map<std::string, double> apriori_norms(const XGrid& xg, const QGrid& qg,
                                            const PotentialSpec& spec,
                                            const MaterialFunctions& mat,
                                            const ArrayXX& theta,
                                            const PolymerField& poly,
                                            double theta_max) {
  if ((theta <= 0.0).any())
    throw positivity_error("apriori_norms: temperature must be positive");
  const int nx = xg.n_x, ny = xg.n_y;
  const double area = xg.cell_area();
  const bool per = xg.periodic();
  std::map<std::string, double> out;

  // L^{2/3+beta} norm of theta
  const double p = 2.0 / 3.0 + mat.beta;
  out["norm_theta_Lp"] = std::pow((theta.abs().pow(p)).sum() * area, 1.0 / p);

  // W^{1,2} norms (L^2 plus face-difference gradient) of transformed fields
  auto w12 = [&](const ArrayXX& f) {
    double acc = (f * f).sum() * area;
    for (int j = 0; j < ny; ++j)
      for (int i = per ? 0 : 1; i < nx; ++i) {
        const double d = (f(i, j) - f(xg.wrap_x(i - 1), j)) / xg.hx;
        acc += d * d * area;
      }
    for (int j = per ? 0 : 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double d = (f(i, j) - f(i, xg.wrap_y(j - 1))) / xg.hy;
        acc += d * d * area;
      }
    return std::sqrt(acc);
  };
  out["norm_log_theta_W12"] = w12(theta.log());
  out["norm_theta_beta2_W12"] = w12(theta.pow(0.5 * mat.beta));

  out["norm_x_fisher"] = x_fisher_cells(xg, qg, theta, poly).sum() * area;

  double fisher = 0.0, flux = 0.0, sub = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const QField f = poly.cell_distribution(xg.idx(i, j));
      const QDissipation d = q_dissipation(qg, spec, f, theta(i, j));
      fisher += d.fisher * area;
      flux += d.flux_norm * area;
      if (theta(i, j) <= theta_max)
        sub += q_sublevel_dissipation(qg, spec, f, theta(i, j)) * area;
    }
  out["norm_q_fisher"] = fisher;
  out["norm_q_flux"] = flux;
  out["norm_sublevel_dissipation"] = sub;
  return out;
}

std::string csv_header() {
  return "t,kinetic,heat_content,elastic,entropic,mixing,H_theta,total_E,"
         "entropy_total,xi_total,energy_eq_residual,energy_balance_residual,"
         "min_theta,min_phi,nP_min,nP_max,norm_theta_Lp,norm_log_theta_W12,"
         "norm_theta_beta2_W12,norm_x_fisher,norm_q_fisher,norm_q_flux,"
         "norm_sublevel_dissipation";
}

std::string csv_row(const ThermoReport& r) {
  const double cols[] = {r.t,
                         r.kinetic,
                         r.heat_content,
                         r.elastic,
                         r.entropic,
                         r.mixing,
                         r.H_theta,
                         r.total_E,
                         r.entropy_total,
                         r.xi_total,
                         r.energy_eq_residual,
                         r.energy_balance_residual,
                         r.min_theta,
                         r.min_phi,
                         r.nP_min,
                         r.nP_max,
                         r.norm_theta_Lp,
                         r.norm_log_theta_W12,
                         r.norm_theta_beta2_W12,
                         r.norm_x_fisher,
                         r.norm_q_fisher,
                         r.norm_q_flux,
                         r.norm_sublevel_dissipation};
  std::string row;
  char buf[40];
  for (std::size_t i = 0; i < sizeof(cols) / sizeof(cols[0]); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", cols[i]);
    if (i) row += ',';
    row += buf;
  }
  return row;
}

}  // namespace pkin
