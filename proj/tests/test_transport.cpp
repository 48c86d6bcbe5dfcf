// Spatial transport of the configuration density: conservation, monotonicity,
// uniform fixed point, implicit-diffusion decay oracle, density bounds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pkin/transport.hpp"
#include "pkin/xgrid.hpp"

using namespace pkin;

namespace {

PolymerField random_field(const XGrid& xg, const QGrid& qg, unsigned seed,
                          double lo = 0.5, double hi = 2.0) {
  PolymerField poly(xg, qg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  for (int c = 0; c < xg.cells(); ++c)
    for (int k = 0; k < poly.qcols(); ++k) poly.phi(c, k) = U(rng);
  return poly;
}

}  // namespace

TEST_CASE("spatially uniform density is a fixed point under rigid advection") {
  const XGrid xg(16, 16, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(4, 4, 1.0);
  PolymerField poly(xg, qg);
  // same arbitrary positive configuration profile in every cell
  for (int c = 0; c < xg.cells(); ++c)
    for (int k = 0; k < poly.qcols(); ++k) poly.phi(c, k) = 0.2 + 0.1 * k;
  FlowState vel(xg);
  vel.u.setConstant(0.3);
  vel.v.setConstant(-0.2);
  vel.sync(xg);
  const ArrayXX theta = ArrayXX::Constant(16, 16, 1.0);
  const PolymerField after = x_transport_step(xg, qg, poly, vel, theta, 1e-3);
  CHECK((after.phi - poly.phi).abs().maxCoeff() <= 1e-14 * poly.phi.maxCoeff());
}

TEST_CASE("transport conserves total mass with shear advection") {
  const XGrid xg(16, 16, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(4, 4, 1.0);
  const PolymerField poly = random_field(xg, qg, 7);
  FlowState vel(xg);
  for (int j = 0; j < xg.n_y; ++j)
    vel.u.col(j).setConstant(0.5 * std::sin(2.0 * M_PI * xg.cell_y(j)));
  vel.sync(xg);
  ArrayXX theta(16, 16);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      theta(i, j) = 1.0 + 0.5 * std::cos(2.0 * M_PI * xg.cell_x(i));
  const double m0 = poly.mass(xg, qg);
  const PolymerField after = x_transport_step(xg, qg, poly, vel, theta, 1e-3);
  CHECK(after.mass(xg, qg) == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("transport conserves total mass in a closed box") {
  const XGrid xg(12, 10, 1.0, 1.0, XGrid::BC::NoFlux);
  const QGrid qg(4, 4, 1.0);
  const PolymerField poly = random_field(xg, qg, 11);
  FlowState vel(xg);
  vel.u.setConstant(0.2);
  vel.v.setConstant(0.1);
  vel.sync(xg);  // pins wall-normal faces to zero
  const ArrayXX theta = ArrayXX::Constant(12, 10, 1.3);
  const double m0 = poly.mass(xg, qg);
  const PolymerField after = x_transport_step(xg, qg, poly, vel, theta, 1e-3);
  CHECK(after.mass(xg, qg) == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("transport obeys the discrete maximum principle") {
  const XGrid xg(16, 16, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(4, 4, 1.0);
  const PolymerField poly = random_field(xg, qg, 3, 0.5, 2.0);
  FlowState vel(xg);
  vel.u.setConstant(0.4);
  vel.v.setConstant(-0.3);
  vel.sync(xg);
  const ArrayXX theta = ArrayXX::Constant(16, 16, 1.0);
  PolymerField cur = poly;
  for (int n = 0; n < 5; ++n)
    cur = x_transport_step(xg, qg, cur, vel, theta, 1e-3);
  CHECK(cur.phi.minCoeff() >= 0.5 - 1e-12);
  CHECK(cur.phi.maxCoeff() <= 2.0 + 1e-12);
}

TEST_CASE("implicit diffusion damps a Fourier mode at the backward-Euler rate") {
  const int n = 32;
  const XGrid xg(n, 4, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(2, 4, 1.0);
  PolymerField poly(xg, qg);
  for (int j = 0; j < xg.n_y; ++j)
    for (int i = 0; i < xg.n_x; ++i) {
      const double c = std::cos(2.0 * M_PI * xg.cell_x(i));
      poly.phi(xg.idx(i, j), 0) = 1.0 + 0.5 * c;
      for (int k = 1; k < poly.qcols(); ++k) poly.phi(xg.idx(i, j), k) = 1.0;
    }
  const FlowState vel(xg);  // zero velocity
  const ArrayXX theta = ArrayXX::Constant(n, 4, 1.0);
  const double dt = 1e-2;
  const PolymerField after = x_transport_step(xg, qg, poly, vel, theta, dt);
  const double lam =
      (4.0 / (xg.hx * xg.hx)) * sqr(std::sin(M_PI * xg.hx / xg.L_x));
  const double expected = 0.5 / (1.0 + dt * lam);
  // project onto the mode
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(2.0 * M_PI * xg.cell_x(i));
    num += (after.phi(xg.idx(i, 0), 0) - 1.0) * c;
    den += c * c;
  }
  CHECK(num / den == doctest::Approx(expected).epsilon(1e-12));
  // untouched columns stay exactly at the uniform fixed point
  CHECK((after.phi.col(1) - 1.0).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("number-density bounds audit tracks the initial essential range") {
  const XGrid xg(16, 16, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(4, 4, 1.0);
  PolymerField poly = random_field(xg, qg, 19);
  const ArrayXX nP0 = poly.number_density(qg);
  const std::pair<double, double> bounds{nP0.minCoeff(), nP0.maxCoeff()};
  FlowState vel(xg);
  vel.u.setConstant(0.4);
  vel.sync(xg);
  const ArrayXX theta = ArrayXX::Constant(16, 16, 1.0);
  for (int k = 0; k < 10; ++k)
    poly = x_transport_step(xg, qg, poly, vel, theta, 1e-3);
  const BoundsCheck bc = number_density_bounds(xg, qg, poly, bounds);
  CHECK(bc.pass);
  CHECK(bc.tol == doctest::Approx(1e-8 + 1e-6 * bounds.second).epsilon(1e-15));
  CHECK(bc.lo0 == bounds.first);
  CHECK(bc.hi0 == bounds.second);
  CHECK(bc.min_nP >= bc.lo0 - bc.tol);
  CHECK(bc.max_nP <= bc.hi0 + bc.tol);
}

TEST_CASE("transport rejects an advective CFL violation") {
  const XGrid xg(8, 8, 1.0, 1.0, XGrid::BC::Periodic);
  const QGrid qg(2, 4, 1.0);
  const PolymerField poly = random_field(xg, qg, 5);
  FlowState vel(xg);
  vel.u.setConstant(200.0);
  vel.sync(xg);
  const ArrayXX theta = ArrayXX::Constant(8, 8, 1.0);
  CHECK_THROWS_AS(
      (void)x_transport_step(xg, qg, poly, vel, theta, 1e-3), cfl_error);
}
