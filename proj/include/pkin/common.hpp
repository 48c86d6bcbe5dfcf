#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

namespace pkin {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using ArrayX = Eigen::ArrayXd;
using ArrayXX = Eigen::ArrayXXd;

/// Configuration file or scenario-validation failure (message carries key/line).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear or nonlinear solve failed to reach its tolerance.
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A field that must stay positive (temperature) lost positivity.
struct positivity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Advective CFL bound violated.
struct cfl_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checkpoint / CSV file problems (magic mismatch, truncation, ...).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
constexpr T sqr(T x) {
  return x * x;
}

/// Bernoulli function B(x) = x / (e^x - 1), the exponential-fitting weight.
/// B(0) = 1, B(x) + x = B(-x).  Overflow-safe for all finite x: for large
/// positive x it decays to 0, for large negative x it grows like |x|.
inline double bernoulli(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;  // series, avoids 0/0
  if (x > 700.0) return x * std::exp(-x);        // e^x would overflow
  if (x < -700.0) return -x;                     // e^x underflows to 0
  return x / std::expm1(x);
}

}  // namespace pkin
