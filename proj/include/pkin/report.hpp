#pragma once

#include <string>

namespace pkin {

/// One audit row: every energy, entropy, residual, and a priori norm the
/// harness tracks, in CSV column order.
struct ThermoReport {
  double t = 0.0;
  double kinetic = 0.0;        // (1/2) int |v|^2
  double heat_content = 0.0;   // int theta
  double elastic = 0.0;        // int int U_e phi
  double entropic = 0.0;       // int int U_eta phi
  double mixing = 0.0;         // int int F(phi), F(s) = s(log s - 1) + 1
  double H_theta = 0.0;        // int H(theta), H(s) = s - 1 - log s
  double total_E = 0.0;        // kinetic + heat_content + elastic
  double entropy_total = 0.0;  // int eta
  double xi_total = 0.0;       // cumulative int int xi dt
  double energy_eq_residual = 0.0;
  double energy_balance_residual = 0.0;
  double min_theta = 0.0, min_phi = 0.0;
  double nP_min = 0.0, nP_max = 0.0;
  double norm_theta_Lp = 0.0;          // L^{2/3+beta}
  double norm_log_theta_W12 = 0.0;     // W^{1,2} of log theta
  double norm_theta_beta2_W12 = 0.0;   // W^{1,2} of theta^{beta/2}
  double norm_x_fisher = 0.0;          // int theta |grad_x phi|^2 / phi
  double norm_q_fisher = 0.0;          // weighted configuration Fisher term
  double norm_q_flux = 0.0;            // int |j_{phi,q}|^2 / (theta phi)
  double norm_sublevel_dissipation = 0.0;  // dissipation on {theta <= theta_max}
  // Not CSV columns: instantaneous rates the time integrals are built from.
  double xi_instant = 0.0;
  double fv_instant = 0.0;
};

/// Fixed CSV header (RFC-4180-style, no quoting needed for these names).
std::string csv_header();
/// One CSV row, floats with 17 significant digits.
std::string csv_row(const ThermoReport& r);

}  // namespace pkin
