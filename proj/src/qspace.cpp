#include "pkin/qspace.hpp"

#include <cmath>
#include <vector>

namespace pkin {

namespace {

/// Radial samples of the potentials (theta-independent parts), one entry per
/// radial cell index.
struct RadialPotential {
  ArrayX U_e, dU_e, ddU_e, U_eta, dU_eta;
};

RadialPotential radial_potential(const QGrid& g, const PotentialSpec& spec) {
  RadialPotential rp;
  rp.U_e.resize(g.n_r);
  rp.dU_e.resize(g.n_r);
  rp.ddU_e.resize(g.n_r);
  rp.U_eta.resize(g.n_r);
  rp.dU_eta.resize(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    const auto pv = eval_potential(spec, g.s_of(i));
    rp.U_e[i] = pv.U_e;
    rp.dU_e[i] = pv.dU_e;
    rp.ddU_e[i] = pv.ddU_e;
    rp.U_eta[i] = pv.U_eta;
    rp.dU_eta[i] = pv.dU_eta;
  }
  return rp;
}

/// Phi_i = (U_e + theta U_eta)/theta at radial cell centers.
ArrayX radial_exponent(const RadialPotential& rp, double theta) {
  return rp.U_e / theta + rp.U_eta;
}

/// phi * e^x with the convention 0 * e^x = 0 (phi = 0 means "no density",
/// whatever the weight); the exponent is capped at the overflow edge, which
/// only matters for states that genuinely exceed double range.
inline double mulexp(double phi, double x) {
  if (phi == 0.0) return 0.0;
  return phi * std::exp(std::min(x, 700.0));
}

}  // namespace

QFluxes flux_q(const QGrid& g, const PotentialSpec& spec, const QField& phi,
               double theta) {
  if (!(theta > 0.0)) throw std::domain_error("flux_q: theta must be > 0");
  const RadialPotential rp = radial_potential(g, spec);
  const ArrayX Phi = radial_exponent(rp, theta);

  QFluxes F;
  F.radial = ArrayXX::Zero(g.n_r + 1, g.n_a);
  F.angular = ArrayXX::Zero(g.n_r, g.n_a);

  // Radial faces f = 1..n_r-1 between cells (f-1, j) and (f, j).
  // J = A_f * (4 theta / dr) * [B(dPhi) phi_lo - B(-dPhi) phi_hi]
  // vanishes exactly when phi ~ e^{-Phi} because B(-x) = e^x B(x).
  for (int f = 1; f < g.n_r; ++f) {
    const double dPhi = Phi[f] - Phi[f - 1];
    const double c = g.R_f[f] * g.da * 4.0 * theta / g.dr;
    const double bp = bernoulli(dPhi), bm = bernoulli(-dPhi);
    for (int j = 0; j < g.n_a; ++j)
      F.radial(f, j) = c * (bp * phi(f - 1, j) - bm * phi(f, j));
  }
  // Angular faces: Phi is radial, so these are pure diffusion.
  for (int i = 0; i < g.n_r; ++i) {
    const double c = 4.0 * theta * g.dr / (g.r_c[i] * g.da);
    for (int j = 0; j < g.n_a; ++j) {
      const int jn = (j + 1) % g.n_a;
      F.angular(i, j) = c * (phi(i, j) - phi(i, jn));
    }
  }
  return F;
}

QFluxes drift_fluxes(const QGrid& g, const QField& phi, const Mat2& grad_v) {
  QFluxes F;
  F.radial = ArrayXX::Zero(g.n_r + 1, g.n_a);
  F.angular = ArrayXX::Zero(g.n_r, g.n_a);
  if (grad_v.isZero(0.0)) return F;

  // Radial faces: normal speed e_r . (grad_v q) = R_f * (e_r^T grad_v e_r),
  // evaluated at the face's angular midpoint.  The outer rim (f = n_r) stays
  // zero: the no-flux condition applies to the *total* flux.
  for (int j = 0; j < g.n_a; ++j) {
    const double c = g.cos_a[j], s = g.sin_a[j];
    const double err = c * (grad_v(0, 0) * c + grad_v(0, 1) * s) +
                       s * (grad_v(1, 0) * c + grad_v(1, 1) * s);
    for (int f = 1; f < g.n_r; ++f) {
      const double un = g.R_f[f] * err;
      const double up = un > 0.0 ? phi(f - 1, j) : phi(f, j);
      F.radial(f, j) = g.R_f[f] * g.da * un * up;
    }
  }
  // Angular faces: tangential speed e_a . (grad_v q) = r * (e_a^T grad_v e_r)
  // at the face angle.
  for (int j = 0; j < g.n_a; ++j) {
    const double c = g.cos_af[j], s = g.sin_af[j];
    // e_a = (-s, c), e_r = (c, s)
    const double ear = -s * (grad_v(0, 0) * c + grad_v(0, 1) * s) +
                       c * (grad_v(1, 0) * c + grad_v(1, 1) * s);
    const int jn = (j + 1) % g.n_a;
    for (int i = 0; i < g.n_r; ++i) {
      const double un = g.r_c[i] * ear;
      const double up = un > 0.0 ? phi(i, j) : phi(i, jn);
      F.angular(i, j) = g.dr * un * up;
    }
  }
  return F;
}

QStepResult q_step(const QGrid& g, const PotentialSpec& spec,
                   const QField& phi, const Mat2& grad_v, double theta,
                   double dt) {
  if (!(theta > 0.0) || !(dt > 0.0))
    throw std::domain_error("q_step: need theta > 0 and dt > 0");
  const RadialPotential rp = radial_potential(g, spec);
  const ArrayX Phi = radial_exponent(rp, theta);
  const double mass_before = integrate_over_D(g, phi);

  // --- explicit upwind drift -------------------------------------------
  QField work = phi;
  if (!grad_v.isZero(0.0)) {
    const QFluxes Fd = drift_fluxes(g, phi, grad_v);
    for (int j = 0; j < g.n_a; ++j) {
      const int jp = (j + g.n_a - 1) % g.n_a;
      for (int i = 0; i < g.n_r; ++i) {
        const double out = Fd.radial(i + 1, j) - Fd.radial(i, j) +
                           Fd.angular(i, j) - Fd.angular(i, jp);
        work(i, j) -= dt * out / g.m_r[i];
      }
    }
  }

  // --- implicit radial solve (tridiagonal, same matrix for every angle) --
  // Cell i couples to faces f = i (lower) and f = i+1 (upper):
  //   (m_i/dt) phi_i + J_{i+1} - J_i = (m_i/dt) phi*_i,
  //   J_f = C_f [B(dPhi_f) phi_{f-1} - B(-dPhi_f) phi_f].
  const int N = g.n_r;
  ArrayX Cf(N + 1), Bp(N + 1), Bm(N + 1);
  Cf.setZero();
  Bp.setZero();
  Bm.setZero();
  for (int f = 1; f < N; ++f) {
    const double dPhi = Phi[f] - Phi[f - 1];
    Cf[f] = g.R_f[f] * g.da * 4.0 * theta / g.dr;
    Bp[f] = bernoulli(dPhi);
    Bm[f] = bernoulli(-dPhi);
  }
  ArrayX diag(N), lower(N), upper(N);
  for (int i = 0; i < N; ++i) {
    diag[i] = g.m_r[i] / dt + Cf[i + 1] * Bp[i + 1] + Cf[i] * Bm[i];
    lower[i] = (i > 0) ? -Cf[i] * Bp[i] : 0.0;
    upper[i] = (i < N - 1) ? -Cf[i + 1] * Bm[i + 1] : 0.0;
  }
  // Thomas factorization, reused for all angular columns.
  ArrayX w(N), dfac(N);
  dfac[0] = diag[0];
  for (int i = 1; i < N; ++i) {
    w[i] = lower[i] / dfac[i - 1];
    dfac[i] = diag[i] - w[i] * upper[i - 1];
  }
  ArrayX rhs(N);
  for (int j = 0; j < g.n_a; ++j) {
    for (int i = 0; i < N; ++i) rhs[i] = g.m_r[i] / dt * work(i, j);
    for (int i = 1; i < N; ++i) rhs[i] -= w[i] * rhs[i - 1];
    rhs[N - 1] /= dfac[N - 1];
    for (int i = N - 2; i >= 0; --i)
      rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / dfac[i];
    for (int i = 0; i < N; ++i) work(i, j) = rhs[i];
  }

  // Heat released by the realized radial diffusive fluxes (angular faces
  // connect cells of equal U_e and contribute exactly zero):
  //   heat_source = -sum_f J_f (U_e[f] - U_e[f-1]).
  double heat = 0.0;
  for (int f = 1; f < N; ++f) {
    const double dUe = rp.U_e[f] - rp.U_e[f - 1];
    for (int j = 0; j < g.n_a; ++j) {
      const double J = Cf[f] * (Bp[f] * work(f - 1, j) - Bm[f] * work(f, j));
      heat -= J * dUe;
    }
  }

  // --- implicit angular solve (cyclic tridiagonal per ring) -------------
  // Coefficients are constant within a ring; Sherman-Morrison reduces the
  // periodic corner terms to two plain tridiagonal solves.
  const int M = g.n_a;
  ArrayX x(M), zvec(M), rr(M);
  for (int i = 0; i < N; ++i) {
    const double D = 4.0 * theta * g.dr / (g.r_c[i] * g.da);
    const double a = g.m_r[i] / dt + 2.0 * D;  // diagonal
    const double c = -D;                       // off-diagonal (and corners)
    // Rank-one correction: A = T + u v^T with u = gamma e_0 + c e_{M-1},
    // v = e_0 + (c/gamma) e_{M-1}; choose gamma = -a for conditioning.
    const double gamma = -a;
    const double d0 = a - gamma, dM = a - c * c / gamma;
    // Tridiagonal T has diag (d0, a, ..., a, dM), off-diagonals c.
    // Factor T once per ring (a, c constant), then two back-substitutions.
    ArrayX tw(M), td(M);
    td[0] = d0;
    for (int j = 1; j < M; ++j) {
      tw[j] = c / td[j - 1];
      td[j] = (j == M - 1 ? dM : a) - tw[j] * c;
    }
    auto solveT = [&](ArrayX& y) {
      for (int j = 1; j < M; ++j) y[j] -= tw[j] * y[j - 1];
      y[M - 1] /= td[M - 1];
      for (int j = M - 2; j >= 0; --j) y[j] = (y[j] - c * y[j + 1]) / td[j];
    };
    for (int j = 0; j < M; ++j) rr[j] = g.m_r[i] / dt * work(i, j);
    x = rr;
    solveT(x);
    zvec.setZero();
    zvec[0] = gamma;
    zvec[M - 1] = c;
    solveT(zvec);
    const double vx = x[0] + (c / gamma) * x[M - 1];
    const double vz = 1.0 + zvec[0] + (c / gamma) * zvec[M - 1];
    const double fac = vx / vz;
    for (int j = 0; j < M; ++j) work(i, j) = x[j] - fac * zvec[j];
  }

  // --- clip and account --------------------------------------------------
  QStepResult out;
  out.heat_source = heat;
  double clipped = 0.0;
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < N; ++i)
      if (work(i, j) < 0.0) {
        clipped += -work(i, j) * g.m_r[i];
        work(i, j) = 0.0;
      }
  out.clipped_mass = clipped;
  out.phi = std::move(work);
  out.mass_delta = integrate_over_D(g, out.phi) - mass_before;
  return out;
}

KramersIntegrals kramers_integrals(const QGrid& g, const PotentialSpec& spec,
                                   const QField& phi, double theta) {
  if (!(theta > 0.0))
    throw std::domain_error("kramers_integrals: theta must be > 0");
  const RadialPotential rp = radial_potential(g, spec);
  KramersIntegrals K;
  // n_P, tau = int (F x q) phi, eta_coupling = int theta (grad U_eta x q) phi.
  // Both tensors are scalar multiples of q x q, assembled from the radial
  // scalars F.q/r^2 = dU_e + theta dU_eta and theta dU_eta.
  double txx = 0.0, txy = 0.0, tyy = 0.0;
  double exx = 0.0, exy = 0.0, eyy = 0.0;
  for (int j = 0; j < g.n_a; ++j) {
    const double cc = g.cos_a[j] * g.cos_a[j];
    const double cs = g.cos_a[j] * g.sin_a[j];
    const double ss = g.sin_a[j] * g.sin_a[j];
    for (int i = 0; i < g.n_r; ++i) {
      const double m = phi(i, j) * g.m_r[i];
      K.n_P += m;
      const double r2 = g.r_c[i] * g.r_c[i];
      const double ftau = (rp.dU_e[i] + theta * rp.dU_eta[i]) * r2 * m;
      const double feta = theta * rp.dU_eta[i] * r2 * m;
      txx += ftau * cc;
      txy += ftau * cs;
      tyy += ftau * ss;
      exx += feta * cc;
      exy += feta * cs;
      eyy += feta * ss;
    }
  }
  K.tau << txx, txy, txy, tyy;
  K.eta_coupling << exx, exy, exy, eyy;

  // Flux-form heat source: -sum_f J_f dU_e over radial faces, with the same
  // Bernoulli-weighted fluxes the time step realizes.
  const ArrayX Phi = radial_exponent(rp, theta);
  double heat = 0.0;
  for (int f = 1; f < g.n_r; ++f) {
    const double dPhi = Phi[f] - Phi[f - 1];
    const double c = g.R_f[f] * g.da * 4.0 * theta / g.dr;
    const double bp = bernoulli(dPhi), bm = bernoulli(-dPhi);
    const double dUe = rp.U_e[f] - rp.U_e[f - 1];
    double Jsum = 0.0;
    for (int j = 0; j < g.n_a; ++j)
      Jsum += bp * phi(f - 1, j) - bm * phi(f, j);
    heat -= c * Jsum * dUe;
  }
  K.heat_source = heat;
  return K;
}

double stress_identity_residual(const QGrid& g, const PotentialSpec& spec,
                                const QField& phi, double theta) {
  if (!(theta > 0.0))
    throw std::domain_error("stress_identity_residual: theta must be > 0");
  const RadialPotential rp = radial_potential(g, spec);
  const ArrayX Phi = radial_exponent(rp, theta);

  // Direct side, face form:  D_kl = theta sum_f A_f w_f (e_k.n) Delta(q_l phihat),
  // i.e. int (F x q) phi with the force written as -theta grad(e^{-Phi})/e^{-Phi}
  // and the weight gradient taken as face differences.  Only neighbor
  // differences of Phi are exponentiated (shared-rescaling guard).
  Mat2 D = Mat2::Zero();
  // By-parts side: theta * (N + T) with
  //   N_kl = sum_f A_f w_f (e_k.n) mean(phihat) Delta(q_l)   (-> theta n_P I)
  //   T_kl = sum_c m_c w_c (grad_k phihat) q_l               (centered diffs)
  Mat2 Nt = Mat2::Zero();
  Mat2 T = Mat2::Zero();

  // Radial faces f = 1..n_r-1; the outer rim carries weight e^{-Phi(b/2)} = 0
  // exactly (the potential blows up), so it contributes no boundary term;
  // the pole face has zero measure.
  for (int f = 1; f < g.n_r; ++f) {
    const double A = g.R_f[f] * g.da;
    const double dPhi = Phi[f] - Phi[f - 1];
    for (int j = 0; j < g.n_a; ++j) {
      const double nk[2] = {g.cos_a[j], g.sin_a[j]};  // e_r at face midpoint
      const double qlo[2] = {g.r_c[f - 1] * g.cos_a[j], g.r_c[f - 1] * g.sin_a[j]};
      const double qhi[2] = {g.r_c[f] * g.cos_a[j], g.r_c[f] * g.sin_a[j]};
      const double plo = phi(f - 1, j), phi_hi = phi(f, j);
      // w_f Delta(q_l phihat) = (q_hi (p_hi + p_hi e^{dPhi}) - q_lo (p_lo + p_lo e^{-dPhi}))/2
      const double hi_w = 0.5 * (phi_hi + mulexp(phi_hi, dPhi));
      const double lo_w = 0.5 * (plo + mulexp(plo, -dPhi));
      // w_f mean(phihat) = (p_lo + p_hi + p_hi e^{dPhi} + p_lo e^{-dPhi})/4
      const double wmean =
          0.25 * (plo + phi_hi + mulexp(phi_hi, dPhi) + mulexp(plo, -dPhi));
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          D(k, l) += theta * A * nk[k] * (qhi[l] * hi_w - qlo[l] * lo_w);
          Nt(k, l) += theta * A * nk[k] * wmean * (qhi[l] - qlo[l]);
        }
    }
  }
  // Angular faces: Phi constant along a ring, weights cancel exactly.
  for (int i = 0; i < g.n_r; ++i) {
    const double A = g.dr;
    for (int j = 0; j < g.n_a; ++j) {
      const int jn = (j + 1) % g.n_a;
      const double nk[2] = {-g.sin_af[j], g.cos_af[j]};  // e_a at face angle
      const double qlo[2] = {g.r_c[i] * g.cos_a[j], g.r_c[i] * g.sin_a[j]};
      const double qhi[2] = {g.r_c[i] * g.cos_a[jn], g.r_c[i] * g.sin_a[jn]};
      const double plo = phi(i, j), phi_hi = phi(i, jn);
      const double wmean = 0.5 * (plo + phi_hi);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          D(k, l) += theta * A * nk[k] * (qhi[l] * phi_hi - qlo[l] * plo);
          Nt(k, l) += theta * A * nk[k] * wmean * (qhi[l] - qlo[l]);
        }
    }
  }
  // Cell-centered by-parts gradient term: w (grad phihat) in polar frame,
  // centered differences inside, one-sided at the first and last rings.
  for (int j = 0; j < g.n_a; ++j) {
    const int jp = (j + g.n_a - 1) % g.n_a;
    const int jn = (j + 1) % g.n_a;
    for (int i = 0; i < g.n_r; ++i) {
      double grad_r;  // w * d(phihat)/dr
      if (i == 0)
        grad_r = (mulexp(phi(1, j), Phi[1] - Phi[0]) - phi(0, j)) / g.dr;
      else if (i == g.n_r - 1)
        grad_r = (phi(i, j) - mulexp(phi(i - 1, j), Phi[i - 1] - Phi[i])) / g.dr;
      else
        grad_r = (mulexp(phi(i + 1, j), Phi[i + 1] - Phi[i]) -
                  mulexp(phi(i - 1, j), Phi[i - 1] - Phi[i])) /
                 (2.0 * g.dr);
      // w * (1/r) d(phihat)/da: same ring, weights cancel.
      const double grad_a = (phi(i, jn) - phi(i, jp)) / (2.0 * g.da * g.r_c[i]);
      const double gx = g.cos_a[j] * grad_r - g.sin_a[j] * grad_a;
      const double gy = g.sin_a[j] * grad_r + g.cos_a[j] * grad_a;
      const double q[2] = {g.r_c[i] * g.cos_a[j], g.r_c[i] * g.sin_a[j]};
      const double gk[2] = {gx, gy};
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          T(k, l) += theta * g.m_r[i] * gk[k] * q[l];
    }
  }
  return (D - Nt - T).norm();
}

BoundaryTrace boundary_trace(const QGrid& g, const PotentialSpec& spec,
                             const QField& phi) {
  BoundaryTrace tr;
  const int i = g.n_r - 1;
  const auto pv = eval_potential(spec, g.s_of(i));
  const double ring = std::sqrt(g.b) * g.da;  // arc length per cell
  for (int j = 0; j < g.n_a; ++j) {
    tr.trace_phi += phi(i, j) * ring;
    tr.trace_phiUe += phi(i, j) * pv.dU_e * ring;
  }
  return tr;
}

QDissipation q_dissipation(const QGrid& g, const PotentialSpec& spec,
                           const QField& phi, double theta) {
  const QFluxes F = flux_q(g, spec, phi, theta);
  double xi4 = 0.0;
  // Radial faces: dual volume A_f * dr, flux density J / A_f.
  for (int f = 1; f < g.n_r; ++f) {
    const double A = g.R_f[f] * g.da;
    for (int j = 0; j < g.n_a; ++j) {
      const double pm = 0.5 * (phi(f - 1, j) + phi(f, j));
      if (pm <= 0.0) continue;  // 0/0 -> 0 (flux vanishes with phi)
      const double jden = F.radial(f, j) / A;
      xi4 += (A * g.dr) * jden * jden / (4.0 * theta * pm);
    }
  }
  // Angular faces: dual volume dr * (r da), density J / dr.
  for (int i = 0; i < g.n_r; ++i) {
    const double dist = g.r_c[i] * g.da;
    for (int j = 0; j < g.n_a; ++j) {
      const int jn = (j + 1) % g.n_a;
      const double pm = 0.5 * (phi(i, j) + phi(i, jn));
      if (pm <= 0.0) continue;
      const double jden = F.angular(i, j) / g.dr;
      xi4 += (g.dr * dist) * jden * jden / (4.0 * theta * pm);
    }
  }
  QDissipation out;
  out.xi4 = xi4;
  out.fisher = 0.25 * xi4;   // int theta e^{-Phi}|grad phihat|^2/phihat = |j|^2/(16 theta phi)
  out.flux_norm = 4.0 * xi4; // int |j|^2/(theta phi)
  return out;
}

double q_sublevel_dissipation(const QGrid& g, const PotentialSpec& spec,
                              const QField& phi, double theta) {
  const RadialPotential rp = radial_potential(g, spec);
  double acc = 0.0;
  // theta |grad_q phi|^2 / phi with plain face differences.
  for (int f = 1; f < g.n_r; ++f) {
    const double A = g.R_f[f] * g.da;
    for (int j = 0; j < g.n_a; ++j) {
      const double pm = 0.5 * (phi(f - 1, j) + phi(f, j));
      if (pm <= 0.0) continue;
      const double dphi = (phi(f, j) - phi(f - 1, j)) / g.dr;
      acc += (A * g.dr) * theta * dphi * dphi / pm;
    }
  }
  for (int i = 0; i < g.n_r; ++i) {
    const double dist = g.r_c[i] * g.da;
    for (int j = 0; j < g.n_a; ++j) {
      const int jn = (j + 1) % g.n_a;
      const double pm = 0.5 * (phi(i, j) + phi(i, jn));
      if (pm <= 0.0) continue;
      const double dphi = (phi(i, jn) - phi(i, j)) / dist;
      acc += (g.dr * dist) * theta * dphi * dphi / pm;
    }
  }
  // phi |grad U_e|^2 / theta at cell centers.
  for (int i = 0; i < g.n_r; ++i) {
    const double grad2 = sqr(rp.dU_e[i]) * g.r_c[i] * g.r_c[i];
    double rowsum = 0.0;
    for (int j = 0; j < g.n_a; ++j) rowsum += phi(i, j);
    acc += rowsum * g.m_r[i] * grad2 / theta;
  }
  return acc;
}

double relative_entropy(const QGrid& g, const PotentialSpec& spec,
                        const QField& phi, double theta) {
  const QField M = maxwellian(spec, g, theta);
  double acc = 0.0;
  for (int j = 0; j < g.n_a; ++j)
    for (int i = 0; i < g.n_r; ++i) {
      const double p = phi(i, j);
      if (p <= 0.0) continue;
      acc += p * std::log(p / M(i, j)) * g.m_r[i];
    }
  return acc;
}

}  // namespace pkin
