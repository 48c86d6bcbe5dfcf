#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkin/common.hpp"

namespace pkin {

/// Binary snapshot of a simulation.  Format (little-endian):
///   magic "PKIN" | u32 version (=1) | u32 config length | config text
///   | i32 n_x, n_y, n_r, n_a | f64 time | u64 step
///   | u32 audit count | f64 audit values (running-audit accumulators)
///   | f64 u[(n_x+1)][n_y] | f64 v[n_x][n_y+1] | f64 p[n_x][n_y]
///   | f64 theta[n_x][n_y] | f64 phi[cells][n_r][n_a]
/// All 2-D arrays are written with the first index outermost; phi rows are
/// spatial cells (index i + n_x*j), then radial, then angular.
struct Checkpoint {
  std::string config_text;
  int n_x = 0, n_y = 0, n_r = 0, n_a = 0;
  double time = 0.0;
  std::uint64_t step = 0;
  std::vector<double> audit;
  ArrayXX u, v, p, theta;  ///< u: (n_x+1) x n_y, v: n_x x (n_y+1)
  ArrayXX phi;             ///< cells x (n_r*n_a), column q = qi + n_r*qj
};

/// Writes atomically enough for a desk tool (temp file + rename would be
/// overkill; failures surface as io_error).
void write_checkpoint(const std::string& path, const Checkpoint& ck);

/// Throws io_error on missing file, bad magic, unsupported version, or a
/// file shorter than its own header promises.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace pkin
