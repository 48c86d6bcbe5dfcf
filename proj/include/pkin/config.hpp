#pragma once

#include <map>
#include <string>
#include <vector>

#include "pkin/flow.hpp"
#include "pkin/potentials.hpp"
#include "pkin/qgrid.hpp"
#include "pkin/xgrid.hpp"

namespace pkin {

struct ThetaInit {
  enum class Kind { Constant, HotSpot } kind = Kind::Constant;
  double c = 1.0;  ///< constant value; HotSpot uses it as the base level
};

struct PhiInit {
  enum class Kind { Equilibrium, Uniform, GaussianBump } kind =
      Kind::Equilibrium;
  double c = 1.0;  ///< Uniform: target number density (0 allowed: no polymer)
};

struct VInit {
  enum class Kind { Zero, TaylorGreen, Shear } kind = Kind::Zero;
  double gamma = 1.0;  ///< Shear: peak velocity gradient
};

/// Full scenario description, read from a flat `key = value` file
/// (`#` starts a comment).  Defaults give a small periodic equilibrium run.
struct ScenarioConfig {
  // potential.kind/H/b/r
  PotentialSpec potential{};
  // heat.kappa_c0/kappa_c1/beta, flow.nu_floor/nu_profile
  MaterialFunctions material{};
  // qgrid.n_r/n_a
  int n_r = 32, n_a = 16;
  // xgrid.n_x/n_y/L/bc
  int n_x = 16, n_y = 16;
  double L = 1.0;
  XGrid::BC bc = XGrid::BC::Periodic;
  // flow.f
  Forcing forcing{};
  // heat.picard_iters
  int picard_iters = 1;
  // renorm.k_levels (comma-separated levels; empty disables the diagnostic
  // and the per-step history it needs), renorm.eps
  std::vector<double> k_levels;
  double renorm_eps = 0.5;
  // time.dt/t_end/output_every
  double dt = 1e-3, t_end = 1e-2;
  int output_every = 10;
  // init.theta/phi/v
  ThetaInit theta_init{};
  PhiInit phi_init{};
  VInit v_init{};
  // audit.theta_max (< 0 means "2 * max of the initial temperature"),
  // audit.tol.<name> overrides
  double theta_max = -1.0;
  std::map<std::string, double> tolerances;
  // run.label
  std::string label = "run";

  /// Throws config_error on any violated invariant (beta > 5/6, positive
  /// time step, positive initial temperature, supported potential kind, ...).
  void validate() const;

  XGrid make_xgrid() const;
  QGrid make_qgrid() const;
};

/// Parses config text; error messages carry the 1-based line number and the
/// offending key.  Unknown keys are rejected.
ScenarioConfig parse_config_text(const std::string& text);

/// Reads and parses a config file; io_error if unreadable.
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization; parse_config_text(config_to_text(c)) round-trips
/// every field.  Embedded in checkpoints so a snapshot is self-describing.
std::string config_to_text(const ScenarioConfig& c);

}  // namespace pkin
