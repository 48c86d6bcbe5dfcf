#pragma once

#include "pkin/xgrid.hpp"

namespace pkin {

/// One spatial transport step for every configuration index of phi:
/// conservative first-order upwind advection by the MAC velocity, then
/// implicit diffusion with face coefficient = harmonic mean of the adjacent
/// cell temperatures.  NoFlux mode imposes zero diffusive flux and zero
/// normal velocity on boundary faces; Periodic mode wraps.  The implicit
/// operator is independent of the configuration index, so it is factored
/// once per call and back-substituted for all columns.  Global mass is
/// conserved to round-off (both stages telescope).
///
/// Throws solver_error if the factorization fails or the post-solve residual
/// exceeds 1e-10 relative; cfl_error if the advective CFL exceeds 0.9.
PolymerField x_transport_step(const XGrid& xg, const QGrid& qg,
                              const PolymerField& poly, const FlowState& vel,
                              const ArrayXX& theta, double dt);

struct BoundsCheck {
  double lo0 = 0.0, hi0 = 0.0;   // initial essential bounds
  double min_nP = 0.0, max_nP = 0.0;
  double tol = 0.0;              // 1e-8 + 1e-6 * hi0
  bool pass = false;
};

/// Maximum-principle audit for the number density: n_P must stay within the
/// initial essential bounds up to tolerance.
BoundsCheck number_density_bounds(const XGrid& xg, const QGrid& qg,
                                  const PolymerField& poly,
                                  std::pair<double, double> initial_bounds);

}  // namespace pkin
