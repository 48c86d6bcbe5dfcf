// Thermodynamic bookkeeping: potential identities, sum-of-squares entropy
// production, audit residual consistency, labeled norms, CSV round-trip.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pkin/driver.hpp"
#include "pkin/thermo.hpp"

using namespace pkin;

namespace {

struct State {
  XGrid xg;
  QGrid qg;
  PotentialSpec spec;
  FlowState vel;
  ArrayXX theta;
  PolymerField poly;
};

State random_state(int n, unsigned seed) {
  State st;
  st.spec.H = 1.0;
  st.spec.b = 4.0;
  st.xg = XGrid(n, n, 1.0, 1.0, XGrid::BC::Periodic);
  st.qg = QGrid(16, 8, st.spec.b);
  st.vel = FlowState(st.xg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  st.theta = ArrayXX(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) st.theta(i, j) = U(rng);
  for (int j = 0; j < st.xg.n_y; ++j)
    for (int i = 0; i <= st.xg.n_x; ++i)
      st.vel.u(i, j) = 0.3 * std::sin(2.0 * M_PI * st.xg.cell_y(j));
  st.vel.sync(st.xg);
  st.poly = PolymerField(st.xg, st.qg);
  const double rb = std::sqrt(st.spec.b);
  for (int c = 0; c < st.xg.cells(); ++c) {
    QField f = maxwellian(st.spec, st.qg, st.theta(c % n, c / n));
    for (int j = 0; j < st.qg.n_a; ++j)
      for (int i = 0; i < st.qg.n_r; ++i)
        f(i, j) *= (0.8 + 0.4 * (c % 3) / 2.0) *
                   (1.0 + 0.3 * st.qg.q_of(i, j).x() / rb);
    st.poly.set_cell_distribution(c, f);
  }
  return st;
}

}  // namespace

TEST_CASE("free energy equals energy minus temperature times entropy") {
  const State st = random_state(8, 21);
  const EnergyFields ef =
      energies(st.xg, st.qg, st.spec, st.vel, st.theta, st.poly);
  CHECK(ef.max_identity_error <= 1e-12);
  CHECK(ef.total_E ==
        doctest::Approx(ef.kinetic + ef.heat_content + ef.elastic)
            .epsilon(1e-14));
  CHECK(ef.mixing > 0.0);
}

TEST_CASE("energies of a polymer-free uniform resting state") {
  State st = random_state(8, 5);
  const double th0 = 1.7;
  st.theta.setConstant(th0);
  st.vel = FlowState(st.xg);  // at rest
  st.poly.phi.setZero();
  const EnergyFields ef =
      energies(st.xg, st.qg, st.spec, st.vel, st.theta, st.poly);
  CHECK(ef.kinetic == 0.0);
  CHECK(ef.heat_content == doctest::Approx(th0).epsilon(1e-13));
  CHECK(ef.elastic == 0.0);
  CHECK(ef.entropic == 0.0);
  // mixing term of the empty state: F(0) = 1 over the configuration ball
  CHECK(ef.mixing == doctest::Approx(M_PI * st.spec.b).epsilon(1e-13));
  CHECK(ef.H_theta ==
        doctest::Approx(th0 - 1.0 - std::log(th0)).epsilon(1e-13));
  CHECK(ef.entropy_total == doctest::Approx(std::log(th0)).epsilon(1e-13));
  CHECK(ef.total_E == doctest::Approx(th0).epsilon(1e-13));
  CHECK((ef.psi - th0 * (1.0 - std::log(th0))).abs().maxCoeff() <= 1e-13);
  CHECK(ef.max_identity_error <= 1e-14);
}

TEST_CASE("entropy production is nonnegative cellwise, zero at equilibrium") {
  MaterialFunctions mat;
  mat.nu_floor = 0.1;
  SUBCASE("arbitrary state: every cell and every term nonnegative") {
    const State st = random_state(8, 33);
    const XiField xi = entropy_production(st.xg, st.qg, st.spec, mat, st.vel,
                                          st.theta, st.poly);
    CHECK(xi.xi1.minCoeff() >= 0.0);
    CHECK(xi.xi2.minCoeff() >= 0.0);
    CHECK(xi.xi3.minCoeff() >= 0.0);
    CHECK(xi.xi4.minCoeff() >= 0.0);
    CHECK(xi.integral > 0.0);
    CHECK(xi.integral ==
          doctest::Approx(xi.total().sum() * st.xg.cell_area())
              .epsilon(1e-14));
  }
  SUBCASE("uniform equilibrium produces nothing") {
    State st = random_state(8, 1);
    st.theta.setConstant(1.0);
    st.vel = FlowState(st.xg);
    const QField M = maxwellian(st.spec, st.qg, 1.0);
    for (int c = 0; c < st.xg.cells(); ++c) st.poly.set_cell_distribution(c, M);
    const XiField xi = entropy_production(st.xg, st.qg, st.spec, mat, st.vel,
                                          st.theta, st.poly);
    CHECK(xi.integral >= 0.0);
    CHECK(xi.integral <= 1e-10);
  }
}

TEST_CASE("viscous entropy production of a linear shear is exact") {
  const double gamma = 0.8, th0 = 2.0;
  MaterialFunctions mat;
  mat.nu_floor = 0.1;
  const XGrid xg(16, 16, 1.0, 1.0, XGrid::BC::NoFlux);
  const QGrid qg(8, 4, 4.0);
  PotentialSpec spec;
  spec.b = 4.0;
  FlowState vel(xg);
  for (int j = 0; j < xg.n_y; ++j)
    for (int i = 0; i <= xg.n_x; ++i) vel.u(i, j) = gamma * xg.cell_y(j);
  vel.sync(xg);
  const ArrayXX theta = ArrayXX::Constant(16, 16, th0);
  const PolymerField poly(xg, qg);  // no polymer: xi3 = xi4 = 0
  const XiField xi =
      entropy_production(xg, qg, spec, mat, vel, theta, poly);
  const double expected = 2.0 * mat.nu_floor * (gamma * gamma / 2.0) / th0;
  for (int j = 2; j < 14; ++j)
    for (int i = 2; i < 14; ++i)
      CHECK(xi.xi1(i, j) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(xi.xi2.abs().maxCoeff() == 0.0);
  CHECK(xi.xi3.abs().maxCoeff() == 0.0);
  CHECK(xi.xi4.abs().maxCoeff() == 0.0);
}

TEST_CASE("audit residuals recomputed from history match the running audit") {
  ScenarioConfig cfg = parse_config_text(R"(
potential.b = 4.0
qgrid.n_r = 8
qgrid.n_a = 4
xgrid.n_x = 8
xgrid.n_y = 8
flow.nu_floor = 0.1
init.theta = profile(hot_spot)
init.phi = equilibrium
init.v = shear(1.0)
renorm.k_levels = [1]
time.dt = 1e-3
time.t_end = 1e-2
)");
  Simulation sim(cfg);
  for (int n = 0; n < 10; ++n) sim.advance();
  const ThermoReport r = sim.report();
  const double eq = energy_equality_residual(sim.history, sim.t);
  const double bal = total_energy_balance(sim.history, sim.t);
  CHECK(eq == doctest::Approx(r.energy_eq_residual).epsilon(1e-12));
  CHECK(bal == doctest::Approx(r.energy_balance_residual).epsilon(1e-12));

  CHECK_THROWS_AS((void)energy_equality_residual(sim.history, 0.02),
                  std::invalid_argument);
  RunHistory empty;
  CHECK_THROWS_AS((void)total_energy_balance(empty, 0.0),
                  std::invalid_argument);
}

TEST_CASE("labeled norms: fixed key set, nonnegative, monotone sub-level") {
  const State st = random_state(8, 55);
  MaterialFunctions mat;
  const auto norms = apriori_norms(st.xg, st.qg, st.spec, mat, st.theta,
                                   st.poly, 10.0);
  const std::vector<std::string> keys = {
      "norm_theta_Lp",      "norm_log_theta_W12", "norm_theta_beta2_W12",
      "norm_x_fisher",      "norm_q_fisher",      "norm_q_flux",
      "norm_sublevel_dissipation"};
  CHECK(norms.size() == keys.size());
  for (const auto& k : keys) {
    REQUIRE(norms.count(k) == 1);
    CHECK(norms.at(k) >= 0.0);
    CHECK(std::isfinite(norms.at(k)));
  }
  const auto tight = apriori_norms(st.xg, st.qg, st.spec, mat, st.theta,
                                   st.poly, 0.1);
  CHECK(tight.at("norm_sublevel_dissipation") <=
        norms.at("norm_sublevel_dissipation"));
  CHECK(norms.at("norm_q_flux") ==
        doctest::Approx(4.0 * 4.0 * norms.at("norm_q_fisher"))
            .epsilon(1e-12));  // flux = 4 xi4 = 16 fisher, cell by cell
}

TEST_CASE("CSV header is fixed and rows round-trip at full precision") {
  CHECK(csv_header() ==
        "t,kinetic,heat_content,elastic,entropic,mixing,H_theta,total_E,"
        "entropy_total,xi_total,energy_eq_residual,energy_balance_residual,"
        "min_theta,min_phi,nP_min,nP_max,norm_theta_Lp,norm_log_theta_W12,"
        "norm_theta_beta2_W12,norm_x_fisher,norm_q_fisher,norm_q_flux,"
        "norm_sublevel_dissipation");
  ThermoReport r;
  r.t = 1.0 / 3.0;
  r.kinetic = 1e-30;
  r.heat_content = 2.0 + 1e-15;
  r.elastic = -7.25;
  r.xi_total = 6.02214076e23;
  const std::string row = csv_row(r);
  std::stringstream ss(row);
  std::vector<double> vals;
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
  REQUIRE(vals.size() == 23);
  CHECK(vals[0] == r.t);            // %.17g survives the round trip bitwise
  CHECK(vals[1] == r.kinetic);
  CHECK(vals[2] == r.heat_content);
  CHECK(vals[3] == r.elastic);
  CHECK(vals[9] == r.xi_total);
}
