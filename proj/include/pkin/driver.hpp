#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkin/checkpoint.hpp"
#include "pkin/config.hpp"
#include "pkin/heat.hpp"
#include "pkin/history.hpp"
#include "pkin/report.hpp"
#include "pkin/thermo.hpp"
#include "pkin/transport.hpp"

namespace pkin {

/// A fully initialized coupled simulation: state, solvers, and the running
/// audit accumulators.  One step is the Lie splitting
///   momentum -> spatial transport of phi -> configuration step -> heat,
/// followed by the audit update (trapezoid entropy/forcing integrals, mass
/// drift, minima).  All accumulators travel through checkpoints so a resumed
/// run is bit-identical to an uninterrupted one.
struct Simulation {
  ScenarioConfig cfg;
  XGrid xg;
  QGrid qg;
  FlowState flow;
  ArrayXX theta;
  PolymerField poly;
  PoissonSolver poisson;

  double t = 0.0;
  std::uint64_t step = 0;

  // running audits (restored bit-exactly on resume; order = checkpoint order)
  double E0_total = 0.0, group0 = 0.0;
  double xi_cum = 0.0, fv_cum = 0.0;
  double xi_prev = 0.0, fv_prev = 0.0;  // instantaneous rates at this level
  double nP_lo0 = 0.0, nP_hi0 = 0.0;
  double theta_min0 = 0.0;
  double mass0 = 0.0, mass_prev = 0.0;
  double min_phi_run = 0.0;
  double clipped_total = 0.0;
  double max_step_mass_drift = 0.0;
  double theta_max_audit = 0.0;  // resolved sub-level threshold

  // per-step record for the weak-form audits (on when renorm.k_levels set)
  bool record_history = false;
  RunHistory history;

  explicit Simulation(const ScenarioConfig& c);

  /// One coupled time step plus audit accumulation.  Throws cfl_error,
  /// positivity_error, or solver_error; the state may then be mid-step and
  /// should be discarded in favor of the last checkpoint.
  void advance();

  /// Full audit row at the current level (energies, residuals, norms).
  ThermoReport report() const;

  Checkpoint to_checkpoint() const;
  /// Overwrites state + accumulators; dims must match (io_error otherwise).
  void restore(const Checkpoint& ck);
};

/// Rebuilds a simulation from a snapshot's embedded config and state.
Simulation simulation_from_checkpoint(const Checkpoint& ck);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 strict-audit failure, 3 hard-invariant abort
  std::vector<ThermoReport> rows;
  std::string csv_path, checkpoint_path;
  std::vector<std::string> audit_failures;
  std::string message;
};

/// Full scenario run: CSV rows at the starting level, every output_every
/// steps, and the final step; final checkpoint; on a mid-run abort the last
/// consistent state is written as <label>_last_good.ckpt and exit_code is 3.
/// The caller prepares the Simulation (fresh or restored from a checkpoint).
RunOutcome run_scenario(Simulation& sim, const std::string& out_dir,
                        bool strict);

int cli_main(int argc, char** argv);

}  // namespace pkin
