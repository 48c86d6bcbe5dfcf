#pragma once

#include <cmath>
#include <string>

#include "pkin/common.hpp"
#include "pkin/qgrid.hpp"

namespace pkin {

enum class SpringKind { WarnerFENE, FENELike, Custom };
enum class EntropicKind { Hookean, Custom };

/// Dumbbell spring model.  Everything is expressed in the scalar variable
/// s = |q|^2/2, so radial symmetry is exact by construction; the admissible
/// range is 0 <= s < b/2 (|q| < sqrt(b)).
///
///   WarnerFENE : U_e(s) = -(H*b/2) * log(1 - 2s/b)
///   FENELike   : U_e(s) =  (H*b/2) * ((1 - 2s/b)^{-r} - 1),  r in (0,1)
///   Hookean    : U_eta(s) = s
///
/// Both elastic potentials are convex, increasing, and blow up at s = b/2,
/// which keeps |q| < sqrt(b) (finite extensibility).
struct PotentialSpec {
  SpringKind kind = SpringKind::WarnerFENE;
  double H = 1.0;  ///< spring constant, > 0
  double b = 1.0;  ///< squared maximal extension, > 0
  double r = 0.5;  ///< FENELike exponent, in (0,1); ignored otherwise
  EntropicKind entropic_kind = EntropicKind::Hookean;
};

/// Pointwise potential data at one s: elastic value/first/second derivative
/// plus the entropic pair.
template <typename T>
struct PotentialValues {
  T U_e, dU_e, ddU_e;
  T U_eta, dU_eta;
};

/// Closed-form evaluation; throws std::domain_error outside [0, b/2).
template <typename T>
PotentialValues<T> eval_potential(const PotentialSpec& spec, T s) {
  const T b = static_cast<T>(spec.b);
  const T H = static_cast<T>(spec.H);
  if (!(s >= T(0)) || !(s < b / T(2)))
    throw std::domain_error("eval_potential: s outside [0, b/2)");
  const T z = T(1) - T(2) * s / b;  // 1 - 2s/b in (0, 1]
  PotentialValues<T> out{};
  switch (spec.kind) {
    case SpringKind::WarnerFENE:
      out.U_e = -(H * b / T(2)) * std::log(z);
      out.dU_e = H / z;
      out.ddU_e = (T(2) * H / b) / (z * z);
      break;
    case SpringKind::FENELike: {
      const T r = static_cast<T>(spec.r);
      out.U_e = (H * b / T(2)) * (std::pow(z, -r) - T(1));
      out.dU_e = H * r * std::pow(z, -r - T(1));
      out.ddU_e = (T(2) * H * r * (r + T(1)) / b) * std::pow(z, -r - T(2));
      break;
    }
    case SpringKind::Custom:
      throw std::domain_error("eval_potential: Custom kind has no closed form");
  }
  // Entropic part (Hookean): U_eta(s) = s.
  out.U_eta = s;
  out.dU_eta = T(1);
  return out;
}

/// Spring force F(q, theta) = U_e'(s) q + theta U_eta'(s) q with s = |q|^2/2.
/// F (x) q is a nonnegative scalar multiple of q (x) q, hence symmetric PSD
/// of rank one.  Throws std::domain_error if |q|^2 >= b.
template <typename T>
Eigen::Matrix<T, 2, 1> spring_force(const PotentialSpec& spec,
                                    const Eigen::Matrix<T, 2, 1>& q, T theta) {
  const T s = T(0.5) * q.squaredNorm();
  const auto pv = eval_potential(spec, s);
  return (pv.dU_e + theta * pv.dU_eta) * q;
}

/// Exponent Phi(s; theta) = (U_e(s) + theta * U_eta(s)) / theta of the
/// equilibrium weight e^{-Phi}.  The Maxwellian is phi = e^{-Phi} / Z.
double q_exponent(const PotentialSpec& spec, double s, double theta);

/// Normalized equilibrium density on the grid: M ~ e^{-Phi}, quadrature 1.
/// Throws solver_error if the normalization constant underflows to zero.
QField maxwellian(const PotentialSpec& spec, const QGrid& g, double theta);

/// Structural-assumption report for a spring model: convexity/monotonicity,
/// the curvature-ratio bound U_e'' <= c_e (U_e')^2 with finite c_e, whether
/// that ratio decays to zero toward s = b/2 (true for FENELike, false for
/// WarnerFENE), boundedness of |U_eta'|, and the Laplacian-type bound
/// 0 <= 2 U_e' + |q|^2 U_e'' <= C (1 + |grad U_e|^2).
struct ValidationReport {
  bool monotone_increasing = false;   ///< U_e' >= 0 on the sample
  bool convex = false;                ///< U_e'' >= 0 on the sample
  double ratio_sup = 0.0;             ///< sup U_e'' / (U_e')^2
  double ratio_near_boundary = 0.0;   ///< same ratio at the last sample
  bool ratio_bounded = false;         ///< finite sup (curvature bound holds)
  bool ratio_vanishes = false;        ///< ratio -> 0 toward b/2 (decay variant)
  double entropic_sup = 0.0;          ///< sup |U_eta'|
  bool entropic_bounded = false;
  double laplacian_bound_C = 0.0;     ///< sup (2U_e' + |q|^2 U_e'')/(1+|grad U_e|^2)
  bool laplacian_bounded = false;
  bool pass = false;                  ///< all required assumptions hold
  std::string summary;
};

/// Samples [0, b/2) on n_samples points (n_samples >= 16) and fills the
/// report.  Custom kinds report failure instead of throwing.
ValidationReport validate_assumptions(const PotentialSpec& spec, int n_samples);

enum class NuProfile { Constant, RationalDecay };

/// Temperature-dependent transport coefficients.  Both are evaluated as even
/// functions of theta.  kappa grows like theta^beta with beta > 5/6; nu is
/// bounded above and below away from zero.
struct MaterialFunctions {
  double kappa_c0 = 1.0;
  double kappa_c1 = 1.0;
  double beta = 1.0;       ///< must be > 5/6
  double nu_floor = 0.05;  ///< must be > 0
  NuProfile nu_profile = NuProfile::Constant;

  double kappa(double theta) const {
    return kappa_c0 + kappa_c1 * std::pow(std::abs(theta), beta);
  }
  double nu(double theta) const {
    switch (nu_profile) {
      case NuProfile::Constant:
        return nu_floor;
      case NuProfile::RationalDecay:
        // bounded in [nu_floor, 2*nu_floor], even in theta
        return nu_floor * (1.0 + 1.0 / (1.0 + theta * theta));
    }
    return nu_floor;
  }
  /// Throws config_error on violated structural requirements.
  void validate() const;
};

}  // namespace pkin
