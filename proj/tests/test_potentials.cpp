// Closed-form values, domain guards, and structural-assumption reports for
// the dumbbell spring models and material functions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "pkin/common.hpp"
#include "pkin/potentials.hpp"
#include "pkin/qgrid.hpp"

using namespace pkin;

TEST_CASE("warner potential closed form at s = 1/4, H = 1, b = 1") {
  PotentialSpec spec;
  spec.kind = SpringKind::WarnerFENE;
  spec.H = 1.0;
  spec.b = 1.0;
  const auto pv = eval_potential(spec, 0.25);  // z = 1 - 2s/b = 1/2
  CHECK(pv.U_e == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(pv.dU_e == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pv.ddU_e == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(pv.U_eta == 0.25);
  CHECK(pv.dU_eta == 1.0);
}

TEST_CASE("power-law potential closed form at s = 1, H = 2, b = 4, r = 1/2") {
  PotentialSpec spec;
  spec.kind = SpringKind::FENELike;
  spec.H = 2.0;
  spec.b = 4.0;
  spec.r = 0.5;
  const auto pv = eval_potential(spec, 1.0);  // z = 1/2
  CHECK(pv.U_e == doctest::Approx(4.0 * (std::sqrt(2.0) - 1.0)).epsilon(1e-15));
  CHECK(pv.dU_e == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(pv.ddU_e == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(pv.U_eta == 1.0);
}

TEST_CASE("potential evaluation rejects s outside [0, b/2)") {
  PotentialSpec spec;  // Warner, H = 1, b = 1
  CHECK_THROWS_AS((void)eval_potential(spec, -1e-9), std::domain_error);
  CHECK_THROWS_AS((void)eval_potential(spec, 0.5), std::domain_error);  // = b/2
  CHECK_THROWS_AS((void)eval_potential(spec, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)eval_potential(spec, std::nan("")), std::domain_error);
  CHECK_NOTHROW((void)eval_potential(spec, 0.0));

  PotentialSpec custom;
  custom.kind = SpringKind::Custom;
  CHECK_THROWS_AS((void)eval_potential(custom, 0.1), std::domain_error);
}

TEST_CASE("spring force is a positive multiple of q") {
  PotentialSpec spec;
  spec.H = 1.0;
  spec.b = 4.0;
  const Vec2 q(0.6, 0.8);  // |q|^2 = 1, s = 1/2, z = 3/4
  const Vec2 F = spring_force(spec, q, 0.5);
  const double coeff = 4.0 / 3.0 + 0.5;  // U_e'(s) + theta U_eta'(s)
  CHECK(F.x() == doctest::Approx(coeff * 0.6).epsilon(1e-15));
  CHECK(F.y() == doctest::Approx(coeff * 0.8).epsilon(1e-15));
  CHECK(F.dot(q) > 0.0);

  const Vec2 too_long(2.0, 0.0);  // s = 2 = b/2
  CHECK_THROWS_AS((void)spring_force(spec, too_long, 1.0), std::domain_error);
}

TEST_CASE("equilibrium exponent matches (U_e + theta U_eta)/theta") {
  PotentialSpec spec;
  spec.H = 1.0;
  spec.b = 1.0;
  const double theta = 2.0, s = 0.3;
  const double expected = (-0.5 * std::log(0.4)) / theta + s;
  CHECK(q_exponent(spec, s, theta) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("maxwellian is normalized, positive, and radially symmetric") {
  PotentialSpec spec;
  spec.H = 1.0;
  spec.b = 4.0;
  const QGrid g(64, 16, spec.b);
  const QField M = maxwellian(spec, g, 1.0);
  CHECK(integrate_over_D(g, M) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(M.minCoeff() > 0.0);
  for (int j = 1; j < g.n_a; ++j)
    CHECK((M.col(j) - M.col(0)).abs().maxCoeff() == 0.0);
  // stiff exponent: the normalization shifts by the minimum, so even a very
  // cold equilibrium stays representable and normalized
  const QField cold = maxwellian(spec, g, 1e-12);
  CHECK(integrate_over_D(g, cold) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)maxwellian(spec, g, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)maxwellian(spec, g, -1.0), std::domain_error);
}

TEST_CASE("assumption validator: warner has a constant curvature ratio") {
  PotentialSpec spec;
  spec.H = 1.0;
  spec.b = 4.0;
  const ValidationReport rep = validate_assumptions(spec, 4096);
  CHECK(rep.pass);
  CHECK(rep.monotone_increasing);
  CHECK(rep.convex);
  CHECK(rep.ratio_bounded);
  CHECK_FALSE(rep.ratio_vanishes);  // ratio == 2/(H b) everywhere
  CHECK(rep.ratio_sup == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.ratio_near_boundary == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.entropic_bounded);
  CHECK(rep.entropic_sup == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.laplacian_bounded);
  CHECK_FALSE(rep.summary.empty());
}

TEST_CASE("assumption validator: power-law ratio decays to zero") {
  PotentialSpec spec;
  spec.kind = SpringKind::FENELike;
  spec.H = 1.0;
  spec.b = 4.0;
  spec.r = 0.5;
  const ValidationReport rep = validate_assumptions(spec, 4096);
  CHECK(rep.pass);
  CHECK(rep.ratio_bounded);
  CHECK(rep.ratio_vanishes);
  // ratio(z) = 2(r+1)/(r b) * z^r, maximal at z = 1
  CHECK(rep.ratio_sup == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(rep.ratio_near_boundary < 0.05);
}

TEST_CASE("assumption validator: custom kind reports failure, never throws") {
  PotentialSpec spec;
  spec.kind = SpringKind::Custom;
  ValidationReport rep;
  CHECK_NOTHROW(rep = validate_assumptions(spec, 64));
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.summary.empty());
  CHECK_THROWS_AS((void)validate_assumptions(spec, 8), std::invalid_argument);
}

TEST_CASE("material functions: conductivity exponent guard") {
  MaterialFunctions mat;
  mat.beta = 0.5;
  try {
    mat.validate();
    FAIL("beta = 0.5 must be rejected");
  } catch (const config_error& err) {
    CHECK(std::string(err.what()).find("beta > 5/6") != std::string::npos);
  }
  mat.beta = 1.0;
  CHECK_NOTHROW(mat.validate());
  mat.nu_floor = 0.0;
  CHECK_THROWS_AS(mat.validate(), config_error);
}

TEST_CASE("material functions: conductivity growth and viscosity bounds") {
  MaterialFunctions mat;
  mat.kappa_c0 = 0.5;
  mat.kappa_c1 = 2.0;
  mat.beta = 1.5;
  CHECK(mat.kappa(2.0) ==
        doctest::Approx(0.5 + 2.0 * std::pow(2.0, 1.5)).epsilon(1e-15));
  CHECK(mat.kappa(-2.0) == mat.kappa(2.0));  // even in theta

  mat.nu_floor = 0.1;
  mat.nu_profile = NuProfile::RationalDecay;
  CHECK(mat.nu(0.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(mat.nu(-3.0) == mat.nu(3.0));
  CHECK(mat.nu(100.0) >= mat.nu_floor);
  CHECK(mat.nu(100.0) <= 2.0 * mat.nu_floor);
  mat.nu_profile = NuProfile::Constant;
  CHECK(mat.nu(7.0) == 0.1);
}

TEST_CASE("exponential-fitting weight: series, identity, saturation") {
  CHECK(bernoulli(0.0) == 1.0);
  CHECK(bernoulli(1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0))
                              .epsilon(1e-14));
  for (double x : {1e-9, 0.3, 5.0, 30.0, 700.0}) {
    CHECK(bernoulli(x) + x ==
          doctest::Approx(bernoulli(-x)).epsilon(1e-12));
    CHECK(bernoulli(x) > 0.0);
  }
  CHECK(bernoulli(800.0) == 0.0);   // e^{-800} underflows
  CHECK(bernoulli(-800.0) == 800.0);
}
