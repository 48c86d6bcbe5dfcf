#pragma once

#include "pkin/potentials.hpp"
#include "pkin/qgrid.hpp"

namespace pkin {

/// Total face fluxes (flux density times face length) on the polar grid.
/// radial(f, j) crosses the circle R_f[f] in +r between cells (f-1,j) and
/// (f,j); rows 0 (pole, zero measure) and n_r (outer rim, no-flux) are zero.
/// angular(i, j) crosses the ray at angle (j+1)*da between cells (i,j) and
/// (i, j+1 mod n_a) in +a.
struct QFluxes {
  ArrayXX radial;   ///< (n_r+1) x n_a
  ArrayXX angular;  ///< n_r x n_a
};

/// Spring + Brownian flux j_{phi,q} = -4 F phi - 4 theta grad_q phi in the
/// symmetric exponentially-fitted form
///     j = -4 theta e^{-Phi} grad_q (phi e^{Phi}),  Phi = (U_e + theta U_eta)/theta,
/// discretized with Bernoulli face weights so the Maxwellian gives exactly
/// zero flux on every face.  Only differences of Phi between neighboring
/// cells enter, which is the shared-rescaling overflow guard: the weight pair
/// on a face is invariant under a common shift of Phi.
QFluxes flux_q(const QGrid& g, const PotentialSpec& spec, const QField& phi,
               double theta);

/// Drift flux (grad_v q) phi on faces, first-order upwind; the outer rim
/// total flux (drift included) is forced to zero (no-flux boundary).
QFluxes drift_fluxes(const QGrid& g, const QField& phi, const Mat2& grad_v);

struct QStepResult {
  QField phi;
  /// Rate of heat release into the temperature equation realized by the
  /// diffusive (spring+Brownian) fluxes of this step:
  ///   heat_source = -sum_faces J_f * (U_e(hi) - U_e(lo))
  /// evaluated at the same fluxes that moved phi, so the elastic-energy
  /// change of the substep is exactly -dt * heat_source.
  double heat_source = 0.0;
  double clipped_mass = 0.0;  ///< mass added by clipping negatives (logged)
  double mass_delta = 0.0;    ///< realized total-mass change (conservation check)
};

/// One configuration-space substep: explicit upwind drift, then implicit
/// (backward-difference) diffusion split into a radial tridiagonal solve and
/// an angular cyclic-tridiagonal solve.  Each directional operator keeps the
/// Maxwellian stationary, conserves mass by telescoping, and is an M-matrix
/// (no new negative values); only the explicit drift can undershoot, and any
/// clipped mass is logged in the result.
QStepResult q_step(const QGrid& g, const PotentialSpec& spec,
                   const QField& phi, const Mat2& grad_v, double theta,
                   double dt);

struct KramersIntegrals {
  double n_P = 0.0;           ///< number density  int phi dq
  Mat2 tau = Mat2::Zero();    ///< int (F x q) phi dq
  double heat_source = 0.0;   ///< 4 int (theta grad phi . grad U_e + ...) dq
  Mat2 eta_coupling = Mat2::Zero();  ///< int theta (grad U_eta x q) phi dq
};

/// Moments of phi used by the flow and heat equations.  tau is the direct
/// midpoint quadrature of (F x q) phi (symmetric by construction).  The heat
/// source is assembled from the same Scharfetter-Gummel face fluxes as
/// q_step (heat_source = -sum J_f dU_e), so it vanishes identically at the
/// Maxwellian and pairs exactly with the elastic-energy change.
KramersIntegrals kramers_integrals(const QGrid& g, const PotentialSpec& spec,
                                   const QField& phi, double theta);

/// Residual of the integration-by-parts rewriting of the Kramers stress,
///   int (F x q) phi dq = theta n_P I + theta int e^{-Phi} (grad_q phihat x q) dq,
/// measured between two independent discretizations: the face-based direct
/// form (force represented through differences of the weight e^{-Phi}, the
/// same exponential-fitting idea as the fluxes) and the cell-based by-parts
/// form with centered differences of phihat.  Exactly zero at the Maxwellian
/// (both gradient stencils annihilate constants); O(h) for smooth fields.
double stress_identity_residual(const QGrid& g, const PotentialSpec& spec,
                                const QField& phi, double theta);

struct BoundaryTrace {
  double trace_phi = 0.0;     ///< ring integral of phi at the outermost cells
  double trace_phiUe = 0.0;   ///< ring integral of phi * U_e'
};

/// Outer-ring quadrature used by the trace-vanishing refinement diagnostic.
BoundaryTrace boundary_trace(const QGrid& g, const PotentialSpec& spec,
                             const QField& phi);

struct QDissipation {
  double xi4 = 0.0;        ///< int |j|^2 / (4 theta phi) dq   (entropy production term)
  double fisher = 0.0;     ///< int theta e^{-Phi} |grad phihat|^2 / phihat dq = xi4/4
  double flux_norm = 0.0;  ///< int |j|^2 / (theta phi) dq = 4 xi4
};

/// Face-based sum-of-squares assembly of the configuration-space dissipation
/// for one spatial cell; nonnegative by construction, exactly zero at the
/// Maxwellian, with the 0/0 -> 0 convention where phi vanishes.
QDissipation q_dissipation(const QGrid& g, const PotentialSpec& spec,
                           const QField& phi, double theta);

/// Sub-level-set dissipation integrand for one spatial cell:
///   int_D ( theta |grad_q phi|^2 / phi + phi |grad_q U_e|^2 / theta ) dq
/// with plain face differences for grad_q phi.
double q_sublevel_dissipation(const QGrid& g, const PotentialSpec& spec,
                              const QField& phi, double theta);

/// Relative entropy int phi log(phi / M_theta) dq >= 0 (0 log 0 = 0).
double relative_entropy(const QGrid& g, const PotentialSpec& spec,
                        const QField& phi, double theta);

}  // namespace pkin
