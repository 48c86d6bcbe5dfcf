// Scenario driver: config parsing and round-trip, determinism, checkpoint
// integrity, abort handling, and the command-line entry point.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>
#include <vector>

#include "pkin/driver.hpp"

using namespace pkin;
namespace fs = std::filesystem;

namespace {

const char* kSmallRun = R"(
run.label = small
potential.b = 4.0
qgrid.n_r = 8
qgrid.n_a = 4
xgrid.n_x = 8
xgrid.n_y = 8
flow.nu_floor = 0.1
init.theta = profile(hot_spot)
init.phi = equilibrium
init.v = shear(1.0)
time.dt = 1e-3
time.t_end = 1e-2
time.output_every = 5
)";

fs::path fresh_dir(const std::string& tag) {
  const fs::path p =
      fs::temp_directory_path() / ("pkin_test_" + tag + "_" +
                                   std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "pkin");
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config parser: values, comments, lists, and rejections") {
  const ScenarioConfig c = parse_config_text(
      "# leading comment\n"
      "potential.kind = fene_like\n"
      "potential.H = 2.5\n"
      "potential.r = 0.25\n"
      "qgrid.n_r = 12\n"
      "xgrid.bc = noflux\n"
      "flow.nu_profile = rational_decay\n"
      "flow.f = vortex_forcing(0.7)\n"
      "renorm.k_levels = [1, 2.5, 4]\n"
      "audit.tol.energy_balance = 1e-6\n"
      "run.label = roundtrip\n");
  CHECK(c.potential.kind == SpringKind::FENELike);
  CHECK(c.potential.H == 2.5);
  CHECK(c.potential.r == 0.25);
  CHECK(c.n_r == 12);
  CHECK(c.bc == XGrid::BC::NoFlux);
  CHECK(c.material.nu_profile == NuProfile::RationalDecay);
  CHECK(c.forcing.kind == Forcing::Kind::Vortex);
  CHECK(c.forcing.amp == 0.7);
  REQUIRE(c.k_levels.size() == 3);
  CHECK(c.k_levels[1] == 2.5);
  CHECK(c.tolerances.at("energy_balance") == 1e-6);
  CHECK(c.label == "roundtrip");

  // unknown keys are rejected with their line number
  try {
    (void)parse_config_text("potential.H = 1\nfoo.bar = 1\n");
    FAIL("unknown key must be rejected");
  } catch (const config_error& err) {
    const std::string what = err.what();
    CHECK(what.find("line 2") != std::string::npos);
    CHECK(what.find("foo.bar") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config_text("time.dt = abc\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("time.dt = -1\n").validate(),
                  config_error);
  CHECK_THROWS_AS(parse_config_text("heat.beta = 0.5\n").validate(),
                  config_error);
  CHECK_NOTHROW(parse_config_text("").validate());  // defaults are runnable
  CHECK_THROWS_AS((void)load_config("/nonexistent/no.cfg"), io_error);
}

TEST_CASE("config serialization round-trips every field") {
  const ScenarioConfig c1 = parse_config_text(
      "potential.kind = fene_like\n"
      "potential.H = 2.0\n"
      "potential.b = 9.0\n"
      "potential.r = 0.75\n"
      "qgrid.n_r = 24\n"
      "qgrid.n_a = 12\n"
      "xgrid.n_x = 10\n"
      "xgrid.n_y = 6\n"
      "xgrid.L = 2.0\n"
      "xgrid.bc = noflux\n"
      "flow.nu_floor = 0.25\n"
      "flow.nu_profile = rational_decay\n"
      "flow.f = constant(0.3, -0.4)\n"
      "heat.kappa_c0 = 0.5\n"
      "heat.kappa_c1 = 1.5\n"
      "heat.beta = 1.25\n"
      "heat.picard_iters = 3\n"
      "renorm.k_levels = [1, 3]\n"
      "renorm.eps = 0.25\n"
      "time.dt = 5e-4\n"
      "time.t_end = 0.05\n"
      "time.output_every = 7\n"
      "init.theta = profile(hot_spot)\n"
      "init.phi = gaussian_bump\n"
      "init.v = taylor_green\n"
      "audit.theta_max = 4.5\n"
      "audit.tol.energy_eq = 0.01\n"
      "run.label = full\n");
  const std::string text1 = config_to_text(c1);
  const ScenarioConfig c2 = parse_config_text(text1);
  CHECK(config_to_text(c2) == text1);
  CHECK(c2.potential.r == 0.75);
  CHECK(c2.bc == XGrid::BC::NoFlux);
  CHECK(c2.forcing.fx == 0.3);
  CHECK(c2.material.beta == 1.25);
  CHECK(c2.picard_iters == 3);
  CHECK(c2.renorm_eps == 0.25);
  CHECK(c2.theta_init.kind == ThetaInit::Kind::HotSpot);
  CHECK(c2.phi_init.kind == PhiInit::Kind::GaussianBump);
  CHECK(c2.v_init.kind == VInit::Kind::TaylorGreen);
  CHECK(c2.theta_max == 4.5);
  CHECK(c2.tolerances.at("energy_eq") == 0.01);
  CHECK(c2.label == "full");
}

TEST_CASE("identical configurations produce bit-identical trajectories") {
  const ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation a(cfg), b(cfg);
  for (int n = 0; n < 10; ++n) {
    a.advance();
    b.advance();
  }
  CHECK(csv_row(a.report()) == csv_row(b.report()));
  CHECK((a.theta == b.theta).all());
  CHECK((a.poly.phi == b.poly.phi).all());
  CHECK((a.flow.u == b.flow.u).all());
}

TEST_CASE("a resumed run continues bit-identically to an uninterrupted one") {
  const ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation full(cfg);
  for (int n = 0; n < 10; ++n) full.advance();

  Simulation half(cfg);
  for (int n = 0; n < 5; ++n) half.advance();
  const Checkpoint ck = half.to_checkpoint();
  Simulation resumed = simulation_from_checkpoint(ck);
  for (int n = 0; n < 5; ++n) resumed.advance();

  CHECK(resumed.t == full.t);
  CHECK(resumed.step == full.step);
  CHECK(csv_row(resumed.report()) == csv_row(full.report()));
  CHECK((resumed.theta == full.theta).all());
  CHECK((resumed.poly.phi == full.poly.phi).all());
}

TEST_CASE("checkpoint files survive a write/read round trip bitwise") {
  const ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation sim(cfg);
  for (int n = 0; n < 3; ++n) sim.advance();
  const Checkpoint ck = sim.to_checkpoint();
  const fs::path dir = fresh_dir("ckpt");
  const std::string path = (dir / "state.ckpt").string();
  write_checkpoint(path, ck);
  const Checkpoint rd = read_checkpoint(path);
  CHECK(rd.config_text == ck.config_text);
  CHECK(rd.time == ck.time);
  CHECK(rd.step == ck.step);
  REQUIRE(rd.audit.size() == ck.audit.size());
  for (size_t i = 0; i < ck.audit.size(); ++i) CHECK(rd.audit[i] == ck.audit[i]);
  CHECK((rd.u == ck.u).all());
  CHECK((rd.v == ck.v).all());
  CHECK((rd.p == ck.p).all());
  CHECK((rd.theta == ck.theta).all());
  CHECK((rd.phi == ck.phi).all());
  fs::remove_all(dir);
}

TEST_CASE("corrupt checkpoint files are rejected with a clear reason") {
  const ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation sim(cfg);
  sim.advance();
  const fs::path dir = fresh_dir("corrupt");
  const std::string path = (dir / "state.ckpt").string();
  write_checkpoint(path, sim.to_checkpoint());

  SUBCASE("truncation") {
    fs::resize_file(path, 40);
    try {
      (void)read_checkpoint(path);
      FAIL("truncated file must be rejected");
    } catch (const io_error& err) {
      CHECK(std::string(err.what()).find("truncated") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
    f.close();
    CHECK_THROWS_AS((void)read_checkpoint(path), io_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)read_checkpoint((dir / "nope.ckpt").string()),
                    io_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("restore rejects a snapshot of a different discretization") {
  const ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation sim(cfg);
  const Checkpoint ck = sim.to_checkpoint();
  ScenarioConfig other = cfg;
  other.n_x = 4;
  Simulation victim(other);
  try {
    victim.restore(ck);
    FAIL("dimension mismatch must be rejected");
  } catch (const io_error& err) {
    CHECK(std::string(err.what()).find("dimensions") != std::string::npos);
  }
}

TEST_CASE("scenario runner writes rows, passes audits, and returns cleanly") {
  const fs::path dir = fresh_dir("run");
  ScenarioConfig cfg = parse_config_text(kSmallRun);
  Simulation sim(cfg);
  const RunOutcome out = run_scenario(sim, dir.string(), /*strict=*/true);
  CHECK(out.exit_code == 0);
  CHECK(out.audit_failures.empty());
  REQUIRE(fs::exists(out.csv_path));
  REQUIRE(fs::exists(out.checkpoint_path));
  // initial row + steps 5 and 10 (output_every = 5; final step coincides)
  CHECK(out.rows.size() == 3);
  std::ifstream csv(out.csv_path);
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 4);  // header + 3 rows
  // the stored snapshot reproduces the final report
  const Checkpoint ck = read_checkpoint(out.checkpoint_path);
  Simulation replayed = simulation_from_checkpoint(ck);
  CHECK(csv_row(replayed.report()) == csv_row(out.rows.back()));
  fs::remove_all(dir);
}

TEST_CASE("a mid-run failure aborts with the last consistent state on disk") {
  const fs::path dir = fresh_dir("abort");
  ScenarioConfig cfg = parse_config_text(kSmallRun);
  cfg.v_init.gamma = 2000.0;  // violates the advective CFL bound immediately
  Simulation sim(cfg);
  const RunOutcome out = run_scenario(sim, dir.string(), /*strict=*/false);
  CHECK(out.exit_code == 3);
  CHECK(out.message.find("aborted at step") != std::string::npos);
  CHECK(fs::exists(dir / "small_last_good.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("command-line interface: run, check, report, equilibrium") {
  const fs::path dir = fresh_dir("cli");
  const fs::path cfg_path = dir / "run.cfg";
  {
    std::ofstream f(cfg_path);
    f << kSmallRun;
  }
  CHECK(run_cli({"run", cfg_path.string(), "--output-dir", dir.string(),
                 "--strict"}) == 0);
  CHECK(run_cli({"check", (dir / "small.ckpt").string()}) == 0);
  CHECK(run_cli({"report", (dir / "small.csv").string()}) == 0);
  CHECK(run_cli({"equilibrium", cfg_path.string(), "--output-dir",
                 dir.string()}) != 0);  // nonuniform initial temperature
  const fs::path eq_cfg = dir / "eq.cfg";
  {
    std::ofstream f(eq_cfg);
    f << "run.label = eq\nqgrid.n_r = 8\nqgrid.n_a = 4\n"
         "xgrid.n_x = 8\nxgrid.n_y = 8\ninit.theta = constant(1.0)\n";
  }
  CHECK(run_cli({"equilibrium", eq_cfg.string(), "--output-dir",
                 dir.string()}) == 0);
  CHECK(fs::exists(dir / "eq_equilibrium.ckpt"));
  CHECK(run_cli({"run", "/nonexistent/no.cfg"}) == 1);
  CHECK(run_cli({"check", (dir / "nope.ckpt").string()}) == 1);
  fs::remove_all(dir);
}

TEST_CASE("equilibrium scenario holds still under the full coupled loop") {
  ScenarioConfig cfg = parse_config_text(R"(
potential.b = 4.0
qgrid.n_r = 16
qgrid.n_a = 8
xgrid.n_x = 8
xgrid.n_y = 8
init.theta = constant(1.0)
init.phi = equilibrium
init.v = zero
time.dt = 1e-3
time.t_end = 1e-2
)");
  Simulation sim(cfg);
  const ArrayXX phi0 = sim.poly.phi;
  for (int n = 0; n < 10; ++n) sim.advance();
  const ThermoReport r = sim.report();
  CHECK((sim.theta - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(sim.flow.u.abs().maxCoeff() <= 1e-12);
  CHECK((sim.poly.phi - phi0).abs().maxCoeff() <= 1e-12 * phi0.maxCoeff());
  CHECK(std::abs(r.xi_instant) <= 1e-12);
  CHECK(std::abs(r.energy_eq_residual) <= 1e-10);
  CHECK(std::abs(r.energy_balance_residual) <= 1e-10);
  CHECK(std::abs(r.min_theta - 1.0) <= 1e-12);
  CHECK(r.min_phi > 0.0);
}
