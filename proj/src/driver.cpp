#include "pkin/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pkin/flow.hpp"
#include "pkin/qspace.hpp"

namespace pkin {

namespace {

ScenarioConfig validated(ScenarioConfig c) {
  c.validate();
  return c;
}

constexpr std::size_t kAuditCount = 15;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& c)
    : cfg(validated(c)),
      xg(cfg.make_xgrid()),
      qg(cfg.make_qgrid()),
      flow(xg),
      theta(),
      poly(xg, qg),
      poisson(xg) {
  const int nx = xg.n_x, ny = xg.n_y;

  // temperature
  theta.resize(nx, ny);
  if (cfg.theta_init.kind == ThetaInit::Kind::Constant) {
    theta.setConstant(cfg.theta_init.c);
  } else {  // hot spot: base level plus a Gaussian bump at the box center
    const double w = cfg.L / 8.0, cx = 0.5 * cfg.L, cy = 0.5 * cfg.L;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double dx = xg.cell_x(i) - cx, dy = xg.cell_y(j) - cy;
        theta(i, j) =
            cfg.theta_init.c + std::exp(-(dx * dx + dy * dy) / (w * w));
      }
  }

  // velocity
  switch (cfg.v_init.kind) {
    case VInit::Kind::Zero:
      break;
    case VInit::Kind::TaylorGreen: {
      const double k = 2.0 * M_PI / cfg.L;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
          flow.u(i, j) = std::sin(k * i * xg.hx) * std::cos(k * xg.cell_y(j));
      for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
          flow.v(i, j) = -std::cos(k * xg.cell_x(i)) * std::sin(k * j * xg.hy);
      break;
    }
    case VInit::Kind::Shear: {
      // u(y) = gamma L/(2 pi) sin(2 pi y / L): divergence-free, peak
      // velocity gradient gamma
      const double k = 2.0 * M_PI / cfg.L;
      const double amp = cfg.v_init.gamma / k;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
          flow.u(i, j) = amp * std::sin(k * xg.cell_y(j));
      break;
    }
  }
  flow.sync(xg);
  project(xg, flow, poisson, cfg.dt);  // clears any round-off divergence
  flow.p.setZero();  // initial pressure is a gauge choice, not state

  // configuration density
  switch (cfg.phi_init.kind) {
    case PhiInit::Kind::Uniform:
      poly.phi.setConstant(cfg.phi_init.c / qg.area());
      break;
    case PhiInit::Kind::Equilibrium: {
      if (cfg.theta_init.kind == ThetaInit::Kind::Constant) {
        const QField M = maxwellian(cfg.potential, qg, cfg.theta_init.c);
        for (int c2 = 0; c2 < xg.cells(); ++c2)
          poly.set_cell_distribution(c2, M);
      } else {
        for (int j = 0; j < ny; ++j)
          for (int i = 0; i < nx; ++i)
            poly.set_cell_distribution(
                xg.idx(i, j), maxwellian(cfg.potential, qg, theta(i, j)));
      }
      break;
    }
    case PhiInit::Kind::GaussianBump: {
      const double w = cfg.L / 8.0, cx = 0.5 * cfg.L, cy = 0.5 * cfg.L;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const double dx = xg.cell_x(i) - cx, dy = xg.cell_y(j) - cy;
          const double n =
              1.0 + 0.5 * std::exp(-(dx * dx + dy * dy) / (w * w));
          const QField M = maxwellian(cfg.potential, qg, theta(i, j));
          poly.set_cell_distribution(xg.idx(i, j), QField(n * M));
        }
      break;
    }
  }

  // audit baselines
  const ArrayXX nP = poly.number_density(qg);
  nP_lo0 = nP.minCoeff();
  nP_hi0 = nP.maxCoeff();
  theta_min0 = theta.minCoeff();
  mass0 = mass_prev = poly.mass(xg, qg);
  min_phi_run = poly.phi.minCoeff();
  theta_max_audit =
      cfg.theta_max > 0.0 ? cfg.theta_max : 2.0 * theta.maxCoeff();
  const EnergyFields en = energies(xg, qg, cfg.potential, flow, theta, poly);
  E0_total = en.total_E;
  group0 = en.kinetic + en.H_theta + en.elastic + en.entropic + en.mixing;
  xi_prev = entropy_production(xg, qg, cfg.potential, cfg.material, flow,
                               theta, poly)
                .integral;
  fv_prev = forcing_power(xg, flow, cfg.forcing);

  record_history = !cfg.k_levels.empty();
  if (record_history) {
    history.dt = cfg.dt;
    history.t.push_back(0.0);
    history.theta.push_back(theta);
    history.reports.push_back(report());
  }
}

void Simulation::advance() {
  const double dt = cfg.dt;
  const int nx = xg.n_x, ny = xg.n_y;

  // (1) moments of phi^n at theta^n: elastic stress + entropic coupling
  StressField tau(xg);
  ArrayXX Exx(nx, ny), Exy(nx, ny), Eyy(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const QField f = poly.cell_distribution(xg.idx(i, j));
      const KramersIntegrals ki =
          kramers_integrals(qg, cfg.potential, f, theta(i, j));
      const double iso = 2.0 * theta(i, j) * ki.n_P;
      tau.xx(i, j) = ki.tau(0, 0) - iso;
      tau.xy(i, j) = ki.tau(0, 1);
      tau.yy(i, j) = ki.tau(1, 1) - iso;
      Exx(i, j) = ki.eta_coupling(0, 0);
      Exy(i, j) = ki.eta_coupling(0, 1);
      Eyy(i, j) = ki.eta_coupling(1, 1);
    }

  // (2) momentum with theta^n
  flow =
      momentum_step(xg, flow, theta, tau, cfg.forcing, dt, cfg.material,
                    poisson);

  // (3) gradients of the updated velocity drive phi and the heat sources
  const GradField grad = velocity_gradient(xg, flow);
  const StrainField D = strain_rate(xg, flow);
  const ArrayXX Dn2 = D.norm2();

  // (4) spatial transport of phi (advection + theta diffusion)
  poly = x_transport_step(xg, qg, poly, flow, theta, dt);

  // (5) configuration-space step per cell; collect the realized heat source
  ArrayXX q_src(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = xg.idx(i, j);
      QStepResult qr = q_step(qg, cfg.potential, poly.cell_distribution(c),
                              grad.at(i, j), theta(i, j), dt);
      poly.set_cell_distribution(c, qr.phi);
      q_src(i, j) = qr.heat_source;
      clipped_total += qr.clipped_mass;
    }

  // (6) heat step with the three power densities
  ArrayXX visc(nx, ny), coup(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      visc(i, j) = 2.0 * cfg.material.nu(theta(i, j)) * Dn2(i, j);
      coup(i, j) = D.xx(i, j) * Exx(i, j) + 2.0 * D.xy(i, j) * Exy(i, j) +
                   D.yy(i, j) * Eyy(i, j);
    }
  HeatStepResult hs = heat_step(xg, theta, flow, visc, q_src, coup, dt,
                                cfg.material, cfg.picard_iters);
  theta = hs.theta;

  // (7) audit accumulators at the new level
  t += dt;
  step += 1;
  const double m = poly.mass(xg, qg);
  max_step_mass_drift = std::max(max_step_mass_drift, std::abs(m - mass_prev));
  mass_prev = m;
  min_phi_run = std::min(min_phi_run, poly.phi.minCoeff());
  const double xi_now = entropy_production(xg, qg, cfg.potential, cfg.material,
                                           flow, theta, poly)
                            .integral;
  const double fv_now = forcing_power(xg, flow, cfg.forcing);
  xi_cum += 0.5 * dt * (xi_prev + xi_now);
  fv_cum += 0.5 * dt * (fv_prev + fv_now);
  xi_prev = xi_now;
  fv_prev = fv_now;

  if (record_history) {
    IntervalData iv;
    iv.adv_u = flow.u;
    iv.adv_v = flow.v;
    iv.theta_cond = hs.theta_cond;
    iv.kfx = hs.kfx;
    iv.kfy = hs.kfy;
    iv.visc_src = visc;
    iv.q_src = q_src;
    iv.coup_src = coup;
    history.steps.push_back(std::move(iv));
    history.t.push_back(t);
    history.theta.push_back(theta);
    history.reports.push_back(report());
  }
}

ThermoReport Simulation::report() const {
  ThermoReport r;
  r.t = t;
  const EnergyFields en = energies(xg, qg, cfg.potential, flow, theta, poly);
  r.kinetic = en.kinetic;
  r.heat_content = en.heat_content;
  r.elastic = en.elastic;
  r.entropic = en.entropic;
  r.mixing = en.mixing;
  r.H_theta = en.H_theta;
  r.total_E = en.total_E;
  r.entropy_total = en.entropy_total;
  r.xi_total = xi_cum;
  const double group =
      en.kinetic + en.H_theta + en.elastic + en.entropic + en.mixing;
  r.energy_eq_residual = group + xi_cum - group0 - fv_cum;
  r.energy_balance_residual = en.total_E - E0_total - fv_cum;
  r.min_theta = theta.minCoeff();
  r.min_phi = min_phi_run;
  const ArrayXX nP = poly.number_density(qg);
  r.nP_min = nP.minCoeff();
  r.nP_max = nP.maxCoeff();
  const auto norms = apriori_norms(xg, qg, cfg.potential, cfg.material, theta,
                                   poly, theta_max_audit);
  r.norm_theta_Lp = norms.at("norm_theta_Lp");
  r.norm_log_theta_W12 = norms.at("norm_log_theta_W12");
  r.norm_theta_beta2_W12 = norms.at("norm_theta_beta2_W12");
  r.norm_x_fisher = norms.at("norm_x_fisher");
  r.norm_q_fisher = norms.at("norm_q_fisher");
  r.norm_q_flux = norms.at("norm_q_flux");
  r.norm_sublevel_dissipation = norms.at("norm_sublevel_dissipation");
  r.xi_instant = xi_prev;
  r.fv_instant = fv_prev;
  return r;
}

Checkpoint Simulation::to_checkpoint() const {
  Checkpoint ck;
  ck.config_text = config_to_text(cfg);
  ck.n_x = xg.n_x;
  ck.n_y = xg.n_y;
  ck.n_r = qg.n_r;
  ck.n_a = qg.n_a;
  ck.time = t;
  ck.step = step;
  ck.audit = {E0_total,    group0,      xi_cum,
              fv_cum,      xi_prev,     fv_prev,
              nP_lo0,      nP_hi0,      theta_min0,
              mass0,       mass_prev,   min_phi_run,
              clipped_total, max_step_mass_drift, theta_max_audit};
  ck.u = flow.u;
  ck.v = flow.v;
  ck.p = flow.p;
  ck.theta = theta;
  ck.phi = poly.phi;
  return ck;
}

void Simulation::restore(const Checkpoint& ck) {
  if (ck.n_x != xg.n_x || ck.n_y != xg.n_y || ck.n_r != qg.n_r ||
      ck.n_a != qg.n_a)
    throw io_error("checkpoint dimensions do not match the configured grids");
  if (ck.audit.size() != kAuditCount)
    throw io_error("checkpoint audit block has unexpected size");
  flow.u = ck.u;
  flow.v = ck.v;
  flow.p = ck.p;
  flow.sync(xg);
  theta = ck.theta;
  poly.phi = ck.phi;
  t = ck.time;
  step = ck.step;
  std::size_t a = 0;
  E0_total = ck.audit[a++];
  group0 = ck.audit[a++];
  xi_cum = ck.audit[a++];
  fv_cum = ck.audit[a++];
  xi_prev = ck.audit[a++];
  fv_prev = ck.audit[a++];
  nP_lo0 = ck.audit[a++];
  nP_hi0 = ck.audit[a++];
  theta_min0 = ck.audit[a++];
  mass0 = ck.audit[a++];
  mass_prev = ck.audit[a++];
  min_phi_run = ck.audit[a++];
  clipped_total = ck.audit[a++];
  max_step_mass_drift = ck.audit[a++];
  theta_max_audit = ck.audit[a++];
  if (record_history) {  // the weak-form record restarts at the resume point
    history = RunHistory{};
    history.dt = cfg.dt;
    history.t.push_back(t);
    history.theta.push_back(theta);
    history.reports.push_back(report());
  }
}

Simulation simulation_from_checkpoint(const Checkpoint& ck) {
  Simulation sim(parse_config_text(ck.config_text));
  sim.restore(ck);
  return sim;
}

RunOutcome run_scenario(Simulation& sim, const std::string& out_dir,
                        bool strict) {
  namespace fs = std::filesystem;
  const ScenarioConfig& cfg = sim.cfg;
  RunOutcome out;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  out.csv_path = (dir / (cfg.label + ".csv")).string();
  out.checkpoint_path = (dir / (cfg.label + ".ckpt")).string();
  const std::string lg_path =
      (dir / (cfg.label + "_last_good.ckpt")).string();

  std::ofstream csv(out.csv_path, std::ios::trunc);
  if (!csv) throw io_error("cannot open CSV for writing: " + out.csv_path);
  csv << csv_header() << "\n";
  auto emit = [&](const ThermoReport& r) {
    out.rows.push_back(r);
    csv << csv_row(r) << "\n";
    csv.flush();
  };

  const auto total_steps = static_cast<std::uint64_t>(
      std::llround(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  emit(sim.report());
  Checkpoint last_good = sim.to_checkpoint();

  while (sim.step < total_steps) {
    try {
      sim.advance();
      // hard invariants the substeps cannot see in isolation
      if (sim.max_step_mass_drift >
          1e-8 * std::max(1.0, std::abs(sim.mass0)))
        throw solver_error("polymer mass drifted beyond the hard bound");
      if (sim.min_phi_run < -1e-12)
        throw positivity_error(
            "configuration density fell below the hard negativity bound");
    } catch (const std::exception& e) {
      write_checkpoint(lg_path, last_good);
      out.exit_code = 3;
      out.message = "aborted at step " + std::to_string(sim.step) + ": " +
                    e.what() + " (last consistent state: " + lg_path + ")";
      return out;
    }
    last_good = sim.to_checkpoint();
    if (sim.step % static_cast<std::uint64_t>(cfg.output_every) == 0 ||
        sim.step == total_steps)
      emit(sim.report());
  }
  write_checkpoint(out.checkpoint_path, last_good);

  // run-level audits (informational unless --strict)
  auto tolerance = [&](const std::string& name, double dflt) {
    const auto it = cfg.tolerances.find(name);
    return it == cfg.tolerances.end() ? dflt : it->second;
  };
  const ThermoReport& last = out.rows.back();
  const double escale = std::max(1.0, std::abs(sim.E0_total));
  if (std::abs(last.energy_eq_residual) >
      tolerance("energy_eq", 5e-2) * escale)
    out.audit_failures.push_back("energy equality residual " +
                                 fmt17(last.energy_eq_residual) +
                                 " exceeds tolerance");
  if (std::abs(last.energy_balance_residual) >
      tolerance("energy_balance", 5e-2) * escale)
    out.audit_failures.push_back("total-energy balance residual " +
                                 fmt17(last.energy_balance_residual) +
                                 " exceeds tolerance");
  const BoundsCheck bc = number_density_bounds(sim.xg, sim.qg, sim.poly,
                                               {sim.nP_lo0, sim.nP_hi0});
  if (!bc.pass)
    out.audit_failures.push_back(
        "number density left its initial bounds: [" + fmt17(bc.min_nP) + ", " +
        fmt17(bc.max_nP) + "] vs [" + fmt17(bc.lo0) + ", " + fmt17(bc.hi0) +
        "]");
  if (sim.max_step_mass_drift >
      tolerance("mass_drift", 1e-10) * std::max(1.0, std::abs(sim.mass0)))
    out.audit_failures.push_back("per-step polymer mass drift " +
                                 fmt17(sim.max_step_mass_drift) +
                                 " exceeds tolerance");
  if (!(last.min_theta > 0.0))
    out.audit_failures.push_back("temperature lost positivity");
  if (last.min_phi < -1e-12)
    out.audit_failures.push_back("configuration density went negative");
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].xi_total < out.rows[i - 1].xi_total) {
      out.audit_failures.push_back(
          "cumulative entropy production decreased between output rows");
      break;
    }
  if (strict && !out.audit_failures.empty()) out.exit_code = 2;
  return out;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            bool allow_unsafe, bool strict, int picard,
            const std::string& resume_path) {
  ScenarioConfig cfg = load_config(config_path);
  if (picard > 0) cfg.picard_iters = picard;
  cfg.validate();
  if (!allow_unsafe) {
    const ValidationReport vr = validate_assumptions(cfg.potential, 4096);
    if (!vr.pass) {
      std::cerr << "potential rejected: " << vr.summary
                << " (use --allow-unsafe-potential to override)\n";
      return 1;
    }
  }
  Simulation sim(cfg);
  if (!resume_path.empty()) sim.restore(read_checkpoint(resume_path));
  RunOutcome out = run_scenario(sim, out_dir, strict);
  for (const auto& f : out.audit_failures)
    std::cerr << "AUDIT FAIL: " << f << "\n";
  if (!out.message.empty()) std::cerr << out.message << "\n";
  std::cout << "csv: " << out.csv_path << "\n";
  if (out.exit_code != 3)
    std::cout << "checkpoint: " << out.checkpoint_path << "\n";
  return out.exit_code;
}

int cmd_check(const std::string& ckpt_path) {
  const Checkpoint ck = read_checkpoint(ckpt_path);
  Simulation sim = simulation_from_checkpoint(ck);
  const ThermoReport r = sim.report();
  std::cout << csv_header() << "\n" << csv_row(r) << "\n";
  const EnergyFields en =
      energies(sim.xg, sim.qg, sim.cfg.potential, sim.flow, sim.theta,
               sim.poly);
  std::cout << "time = " << fmt17(r.t) << "\n";
  std::cout << "step = " << ck.step << "\n";
  std::cout << "xi_instant = " << fmt17(r.xi_instant) << "\n";
  std::cout << "fv_instant = " << fmt17(r.fv_instant) << "\n";
  std::cout << "psi_identity_max_error = " << fmt17(en.max_identity_error)
            << "\n";
  std::cout << "clipped_mass_total = " << fmt17(sim.clipped_total) << "\n";
  return 0;
}

int cmd_equilibrium(const std::string& config_path,
                    const std::string& out_dir) {
  ScenarioConfig cfg = load_config(config_path);
  cfg.validate();
  if (cfg.theta_init.kind != ThetaInit::Kind::Constant) {
    std::cerr << "equilibrium requires a uniform initial temperature "
                 "(init.theta = constant(c))\n";
    return 1;
  }
  cfg.phi_init = PhiInit{PhiInit::Kind::Equilibrium, 1.0};
  cfg.v_init = VInit{VInit::Kind::Zero, 0.0};
  Simulation sim(cfg);
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string path =
      (dir / (cfg.label + "_equilibrium.ckpt")).string();
  write_checkpoint(path, sim.to_checkpoint());
  std::cout << "checkpoint: " << path << "\n";
  return 0;
}

int cmd_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw io_error("cannot open CSV: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty CSV: " + csv_path);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != names.size())
      throw io_error("CSV row has wrong column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error("CSV has no data rows: " + csv_path);
  auto col = [&](const std::string& n) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return i;
    throw io_error("CSV is missing column " + n);
  };

  int failures = 0;
  auto verdict = [&](bool ok, const std::string& what,
                     const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << ": " << what << " (" << detail
              << ")\n";
    if (!ok) ++failures;
  };

  const std::size_t c_xi = col("xi_total"), c_mt = col("min_theta"),
                    c_mp = col("min_phi"), c_eq = col("energy_eq_residual"),
                    c_eb = col("energy_balance_residual"),
                    c_np_lo = col("nP_min"), c_np_hi = col("nP_max"),
                    c_E = col("total_E");

  bool xi_monotone = true, theta_pos = true, phi_ok = true, np_ok = true;
  const double np_lo0 = rows.front()[c_np_lo], np_hi0 = rows.front()[c_np_hi];
  const double np_tol = 1e-8 + 1e-6 * std::abs(np_hi0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i && rows[i][c_xi] < rows[i - 1][c_xi]) xi_monotone = false;
    if (!(rows[i][c_mt] > 0.0)) theta_pos = false;
    if (rows[i][c_mp] < -1e-12) phi_ok = false;
    if (rows[i][c_np_lo] < np_lo0 - np_tol ||
        rows[i][c_np_hi] > np_hi0 + np_tol)
      np_ok = false;
  }
  const double escale = std::max(1.0, std::abs(rows.front()[c_E]));
  verdict(xi_monotone, "cumulative entropy production nondecreasing",
          "final " + fmt17(rows.back()[c_xi]));
  verdict(theta_pos, "temperature stays positive",
          "min " + fmt17(rows.back()[c_mt]));
  verdict(phi_ok, "configuration density stays nonnegative",
          "run min " + fmt17(rows.back()[c_mp]));
  verdict(np_ok, "number density within initial bounds",
          "[" + fmt17(rows.back()[c_np_lo]) + ", " +
              fmt17(rows.back()[c_np_hi]) + "]");
  verdict(std::abs(rows.back()[c_eq]) <= 5e-2 * escale,
          "energy equality residual within 5e-2 of scale",
          fmt17(rows.back()[c_eq]));
  verdict(std::abs(rows.back()[c_eb]) <= 5e-2 * escale,
          "total-energy balance residual within 5e-2 of scale",
          fmt17(rows.back()[c_eb]));
  std::cout << (failures == 0 ? "all checks passed" :
                                std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{
      "Structure-preserving simulator for nonisothermal dilute polymeric "
      "fluids with a built-in thermodynamic audit harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", ckpt_path, csv_path, resume_path;
  bool allow_unsafe = false, strict = false;
  int picard = -1;

  auto* run = app.add_subcommand("run", "run a scenario; write CSV + checkpoint");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--output-dir", out_dir, "directory for outputs");
  run->add_flag("--allow-unsafe-potential", allow_unsafe,
                "skip the spring-potential assumption gate");
  run->add_option("--picard-iters", picard,
                  "override heat.picard_iters from the config");
  run->add_flag("--strict", strict, "audit failures exit nonzero");
  run->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* check = app.add_subcommand("check", "audit one checkpoint");
  check->add_option("checkpoint", ckpt_path, "checkpoint file")->required();

  auto* equil = app.add_subcommand(
      "equilibrium", "write the analytic equilibrium state for a config");
  equil->add_option("config", config_path, "scenario config file")->required();
  equil->add_option("--output-dir", out_dir, "directory for outputs");

  auto* rep =
      app.add_subcommand("report", "summarize a CSV audit trail as pass/fail");
  rep->add_option("csv", csv_path, "CSV file from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(run))
      return cmd_run(config_path, out_dir, allow_unsafe, strict, picard,
                     resume_path);
    if (app.got_subcommand(check)) return cmd_check(ckpt_path);
    if (app.got_subcommand(equil)) return cmd_equilibrium(config_path, out_dir);
    if (app.got_subcommand(rep)) return cmd_report(csv_path);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace pkin
