#pragma once

#include <map>

#include "pkin/flow.hpp"
#include "pkin/history.hpp"
#include "pkin/potentials.hpp"
#include "pkin/qspace.hpp"
#include "pkin/xgrid.hpp"

namespace pkin {

/// Cell fields of the thermodynamic potentials plus their integrals.
/// psi = -theta(log theta - 1) + int U_e phi + theta int [U_eta phi + phi log phi]
/// e   = theta + int U_e phi
/// eta = log theta - int [U_eta phi + phi log phi]
/// E   = |v|^2/2 + e
/// The algebraic identity psi = e - eta*theta is evaluated cellwise and its
/// worst deviation reported (it must stay at round-off).
struct EnergyFields {
  ArrayXX psi, e, E, eta;
  double max_identity_error = 0.0;
  // integrals (kinetic uses face dual volumes, everything else cell sums)
  double kinetic = 0.0, heat_content = 0.0, elastic = 0.0, entropic = 0.0;
  double mixing = 0.0, H_theta = 0.0, entropy_total = 0.0, psi_total = 0.0;
  double total_E = 0.0;  // kinetic + heat_content + elastic
};

EnergyFields energies(const XGrid& xg, const QGrid& qg,
                      const PotentialSpec& spec, const FlowState& vel,
                      const ArrayXX& theta, const PolymerField& poly);

/// The four entropy-production terms, assembled as sums of squares over the
/// solver's own stencils (face terms deposit half to each adjacent cell), so
/// every cell value is >= 0 by construction:
///   xi1 = 2 nu(theta) |D(v)|^2 / theta
///   xi2 = kappa |grad theta|^2 / theta^2        (harmonic kappa faces)
///   xi3 = theta int |grad_x phi|^2 / phi dq     (harmonic theta faces)
///   xi4 = int |j_{phi,q}|^2 / (4 theta phi) dq  (exponential-fitted fluxes)
struct XiField {
  ArrayXX xi1, xi2, xi3, xi4;
  ArrayXX total() const { return xi1 + xi2 + xi3 + xi4; }
  double integral = 0.0;  // int_Omega xi dx
};

XiField entropy_production(const XGrid& xg, const QGrid& qg,
                           const PotentialSpec& spec,
                           const MaterialFunctions& mat, const FlowState& vel,
                           const ArrayXX& theta, const PolymerField& poly);

/// Residual of the integrated energy equality at time t (a history level):
/// [kinetic + H_theta + elastic + entropic + mixing](t) + int_0^t int xi
///   - (same at 0) - int_0^t int f.v,
/// time integrals by trapezoid over the stored instantaneous rates.
double energy_equality_residual(const RunHistory& h, double t);

/// Total-energy balance at time t: int E(t) - int E(0) - int_0^t int f.v.
double total_energy_balance(const RunHistory& h, double t);

/// Labeled a priori norms; keys match the CSV column names.
///   norm_theta_Lp              L^{2/3+beta} norm of theta
///   norm_log_theta_W12         W^{1,2} norm of log theta
///   norm_theta_beta2_W12       W^{1,2} norm of theta^{beta/2}
///   norm_x_fisher              int theta |grad_x phi|^2/phi
///   norm_q_fisher              configuration Fisher information
///   norm_q_flux                int |j_{phi,q}|^2/(theta phi)
///   norm_sublevel_dissipation  configuration dissipation on {theta<=theta_max}
std::map<std::string, double> apriori_norms(const XGrid& xg, const QGrid& qg,
                                            const PotentialSpec& spec,
                                            const MaterialFunctions& mat,
                                            const ArrayXX& theta,
                                            const PolymerField& poly,
                                            double theta_max);

}  // namespace pkin
