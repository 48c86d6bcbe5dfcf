#pragma once

#include <memory>

#include <Eigen/SparseCholesky>

#include "pkin/potentials.hpp"
#include "pkin/xgrid.hpp"

namespace pkin {

/// Analytic body forces selectable from config.
struct Forcing {
  enum class Kind { Zero, Constant, Vortex };
  Kind kind = Kind::Zero;
  double fx = 0.0, fy = 0.0;  // Constant components
  double amp = 1.0;           // Vortex amplitude

  bool zero() const { return kind == Kind::Zero; }
  Vec2 eval(double x, double y, double Lx, double Ly) const {
    switch (kind) {
      case Kind::Zero: return Vec2::Zero();
      case Kind::Constant: return Vec2(fx, fy);
      case Kind::Vortex: {
        const double kx = 2.0 * M_PI / Lx, ky = 2.0 * M_PI / Ly;
        return Vec2(amp * std::sin(kx * x) * std::cos(ky * y),
                    -amp * std::cos(kx * x) * std::sin(ky * y));
      }
    }
    return Vec2::Zero();
  }
};

/// Cell-centered elastic extra stress (tau - 2 theta n_P I), symmetric.
struct StressField {
  ArrayXX xx, xy, yy;
  StressField() = default;
  explicit StressField(const XGrid& g)
      : xx(ArrayXX::Zero(g.n_x, g.n_y)),
        xy(ArrayXX::Zero(g.n_x, g.n_y)),
        yy(ArrayXX::Zero(g.n_x, g.n_y)) {}
};

/// Constant-coefficient cell-centered pressure Poisson operator, factored
/// once per grid (the projection matrix never changes).  The singular
/// constant mode is removed by pinning one cell; the solved pressure is
/// mean-subtracted afterwards.
class PoissonSolver {
 public:
  PoissonSolver() = default;
  explicit PoissonSolver(const XGrid& g);
  /// Solves  laplacian(q) = rhs  (finite-volume form) and returns q with
  /// zero mean.  rhs must have (numerically) zero mean for consistency.
  ArrayXX solve(const ArrayXX& rhs) const;

 private:
  int n_x_ = 0, n_y_ = 0;
  double area_ = 0.0;
  Eigen::SparseMatrix<double> A_;
  // behind unique_ptr: the Eigen factorization object is not movable, and
  // Simulation (which holds a PoissonSolver) moves through factory returns
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

/// Discrete MAC divergence per cell (needs a synced state).
ArrayXX divergence(const XGrid& g, const FlowState& s);

/// Chorin projection: subtract grad(q) with laplacian(q) = div(v), store
/// p = q/dt, re-sync.  Returns the post-projection max |div|.
double project(const XGrid& g, FlowState& s, const PoissonSolver& poisson,
               double dt);

/// Cell-centered velocity gradient; tangential derivatives use mirror ghosts
/// at NoFlux walls (no-slip).
GradField velocity_gradient(const XGrid& g, const FlowState& s);

/// Symmetric strain rate D(v) per cell.
StrainField strain_rate(const XGrid& g, const FlowState& s);

/// (1/2) int |v|^2 over distinct faces (face dual volumes).
double kinetic_energy(const XGrid& g, const FlowState& s);

/// int f . v over faces (forcing power), for the energy audits.
double forcing_power(const XGrid& g, const FlowState& s, const Forcing& f);

/// One momentum step: central (energy-conserving) advection, semi-implicit
/// variable-viscosity diffusion of 2 nu(theta) D(v) (normal terms implicit,
/// transpose part explicit), explicit divergence of tau_elastic, body force,
/// then pressure projection.  Throws cfl_error if |v| dt/h > 0.9 and
/// solver_error if any solve misses the 1e-10 residual contract.
FlowState momentum_step(const XGrid& g, const FlowState& state,
                        const ArrayXX& theta, const StressField& tau,
                        const Forcing& f, double dt,
                        const MaterialFunctions& mat,
                        const PoissonSolver& poisson);

}  // namespace pkin
