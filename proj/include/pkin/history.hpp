#pragma once

#include <vector>

#include "pkin/report.hpp"
#include "pkin/xgrid.hpp"

namespace pkin {

/// What one time step actually did, recorded for the a posteriori weak-form
/// audits.  Face arrays use the transport convention: x-face i sits between
/// cells (i-1 mod n_x, j) and (i, j); entries outside the active face range
/// are zero.
struct IntervalData {
  ArrayXX adv_u, adv_v;   // MAC velocity the advection substeps used
  ArrayXX theta_cond;     // field whose gradients the conduction flux used
  ArrayXX kfx, kfy;       // realized face conductivities, (n_x+1) x n_y / n_x x (n_y+1)
  ArrayXX visc_src;       // 2 nu(theta) |D(v)|^2 per cell
  ArrayXX q_src;          // configuration-space heat source per cell
  ArrayXX coup_src;       // D(v) : entropic coupling tensor per cell
};

/// Uniform-dt record of a run: N+1 time levels and N realized intervals.
struct RunHistory {
  double dt = 0.0;
  std::vector<double> t;              // size N+1
  std::vector<ArrayXX> theta;         // size N+1, cell fields
  std::vector<IntervalData> steps;    // size N
  std::vector<ThermoReport> reports;  // size N+1
};

}  // namespace pkin
