#pragma once

#include <functional>

#include "pkin/history.hpp"
#include "pkin/potentials.hpp"
#include "pkin/xgrid.hpp"

namespace pkin {

/// C^2 truncation at level k with mollification width eps:
///   T(s) = s                     for |s| <= k
///   T(s) = sign(s) (k + eps/2)   for |s| >= k + eps
/// and a quadratic blend in between, so that 0 <= T' <= 1, s T'' <= 0 and
/// |T''| <= 1/eps everywhere.
struct Truncation {
  double k = 1.0;
  double eps = 0.5;
};

struct TruncationValues {
  double T = 0.0, Tp = 0.0, Tpp = 0.0;
};

TruncationValues truncation_eval(const Truncation& tr, double s);

struct HeatStepResult {
  ArrayXX theta;       // updated temperature
  ArrayXX theta_cond;  // field whose gradients the conduction flux used
  ArrayXX kfx, kfy;    // realized face conductivities (transport convention)
};

/// One temperature step: conservative upwind advection, implicit conduction
/// with kappa(theta) frozen per Picard sweep (harmonic face means), then the
/// explicit sources (viscous heating, configuration-space exchange, entropic
/// coupling work), each a per-cell power density.  Throws positivity_error
/// if any updated value is <= 0 (dt too large), cfl_error on CFL violation,
/// solver_error if a conduction solve misses its residual contract.
HeatStepResult heat_step(const XGrid& g, const ArrayXX& theta,
                         const FlowState& vel, const ArrayXX& visc_src,
                         const ArrayXX& q_src, const ArrayXX& coup_src,
                         double dt, const MaterialFunctions& mat,
                         int picard_iters);

/// Nonnegative spatial test profile for the weak-form audits; the time
/// factor is always the linear ramp (1 - t/T).
struct TestFunction {
  std::string name;
  std::function<double(double, double)> g;
};

/// The fixed audit set: strictly positive, smooth, periodic-compatible.
std::vector<TestFunction> default_test_functions(const XGrid& g);

/// Signed residual of the truncated-temperature weak inequality for
/// psi(t,x) = (1 - t/T) g(x), one value per test function.
///
/// The discrete form pairs each term with the stencil the run actually used
/// (upwind face values for advection, the realized face conductivities and
/// conduction field for diffusion, Abel summation in time), so that with the
/// truncation inactive (k above max theta) the residual telescopes to
/// round-off, and with it active the defect terms carry the sign the
/// truncation structure dictates up to O(dt + h).
std::vector<double> renormalized_inequality_residual(
    const XGrid& g, const RunHistory& h, int tr_k, double eps,
    const std::vector<TestFunction>& fns);

}  // namespace pkin
