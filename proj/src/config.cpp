#include "pkin/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pkin {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "config line " << line << ": " << msg;
  throw config_error(os.str());
}

double to_double(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  fail(line, key + ": '" + v + "' is not a number");
}

int to_int(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return static_cast<int>(x);
  } catch (const std::exception&) {
  }
  fail(line, key + ": '" + v + "' is not an integer");
}

struct NameArgs {
  std::string name;
  std::vector<std::string> args;
};

/// "shear(1.0)" -> {shear, {"1.0"}}; "zero" -> {zero, {}}.
NameArgs split_name_args(int line, const std::string& key,
                         const std::string& v) {
  NameArgs out;
  const auto open = v.find('(');
  if (open == std::string::npos) {
    out.name = trim(v);
    return out;
  }
  const auto close = v.rfind(')');
  if (close == std::string::npos || close < open ||
      !trim(v.substr(close + 1)).empty())
    fail(line, key + ": malformed value '" + v + "'");
  out.name = trim(v.substr(0, open));
  std::string inner = v.substr(open + 1, close - open - 1);
  std::stringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.args.push_back(tok);
  }
  return out;
}

std::vector<double> parse_list(int line, const std::string& key,
                               std::string v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[' && v.back() == ']')
    v = v.substr(1, v.size() - 2);
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(to_double(line, key, tok));
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig c;
  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(raw.substr(0, eq));
    const std::string val = trim(raw.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (val.empty()) fail(line, key + ": empty value");

    if (key == "potential.kind") {
      if (val == "warner")
        c.potential.kind = SpringKind::WarnerFENE;
      else if (val == "fene_like")
        c.potential.kind = SpringKind::FENELike;
      else
        fail(line, "potential.kind: '" + val +
                       "' is not supported (use warner or fene_like)");
    } else if (key == "potential.H") {
      c.potential.H = to_double(line, key, val);
    } else if (key == "potential.b") {
      c.potential.b = to_double(line, key, val);
    } else if (key == "potential.r") {
      c.potential.r = to_double(line, key, val);
    } else if (key == "qgrid.n_r") {
      c.n_r = to_int(line, key, val);
    } else if (key == "qgrid.n_a") {
      c.n_a = to_int(line, key, val);
    } else if (key == "xgrid.n_x") {
      c.n_x = to_int(line, key, val);
    } else if (key == "xgrid.n_y") {
      c.n_y = to_int(line, key, val);
    } else if (key == "xgrid.L") {
      c.L = to_double(line, key, val);
    } else if (key == "xgrid.bc") {
      if (val == "periodic")
        c.bc = XGrid::BC::Periodic;
      else if (val == "noflux")
        c.bc = XGrid::BC::NoFlux;
      else
        fail(line, "xgrid.bc: '" + val + "' (use periodic or noflux)");
    } else if (key == "flow.nu_floor") {
      c.material.nu_floor = to_double(line, key, val);
    } else if (key == "flow.nu_profile") {
      if (val == "constant")
        c.material.nu_profile = NuProfile::Constant;
      else if (val == "rational_decay")
        c.material.nu_profile = NuProfile::RationalDecay;
      else
        fail(line,
             "flow.nu_profile: '" + val + "' (use constant or rational_decay)");
    } else if (key == "flow.f") {
      const NameArgs na = split_name_args(line, key, val);
      if (na.name == "zero" && na.args.empty()) {
        c.forcing = Forcing{};
      } else if (na.name == "constant" && na.args.size() == 2) {
        c.forcing.kind = Forcing::Kind::Constant;
        c.forcing.fx = to_double(line, key, na.args[0]);
        c.forcing.fy = to_double(line, key, na.args[1]);
      } else if (na.name == "vortex_forcing" && na.args.size() <= 1) {
        c.forcing.kind = Forcing::Kind::Vortex;
        c.forcing.amp =
            na.args.empty() ? 1.0 : to_double(line, key, na.args[0]);
      } else {
        fail(line, "flow.f: '" + val +
                       "' (use zero, constant(fx,fy), or vortex_forcing)");
      }
    } else if (key == "heat.kappa_c0") {
      c.material.kappa_c0 = to_double(line, key, val);
    } else if (key == "heat.kappa_c1") {
      c.material.kappa_c1 = to_double(line, key, val);
    } else if (key == "heat.beta") {
      c.material.beta = to_double(line, key, val);
    } else if (key == "heat.picard_iters") {
      c.picard_iters = to_int(line, key, val);
    } else if (key == "renorm.k_levels") {
      c.k_levels = parse_list(line, key, val);
    } else if (key == "renorm.eps") {
      c.renorm_eps = to_double(line, key, val);
    } else if (key == "time.dt") {
      c.dt = to_double(line, key, val);
    } else if (key == "time.t_end") {
      c.t_end = to_double(line, key, val);
    } else if (key == "time.output_every") {
      c.output_every = to_int(line, key, val);
    } else if (key == "init.theta") {
      const NameArgs na = split_name_args(line, key, val);
      if (na.name == "constant" && na.args.size() == 1) {
        c.theta_init.kind = ThetaInit::Kind::Constant;
        c.theta_init.c = to_double(line, key, na.args[0]);
      } else if (na.name == "profile" && na.args.size() == 1 &&
                 na.args[0] == "hot_spot") {
        c.theta_init.kind = ThetaInit::Kind::HotSpot;
      } else {
        fail(line, "init.theta: '" + val +
                       "' (use constant(c) or profile(hot_spot))");
      }
    } else if (key == "init.phi") {
      const NameArgs na = split_name_args(line, key, val);
      if (na.name == "equilibrium" && na.args.empty()) {
        c.phi_init.kind = PhiInit::Kind::Equilibrium;
      } else if (na.name == "uniform" && na.args.size() <= 1) {
        c.phi_init.kind = PhiInit::Kind::Uniform;
        c.phi_init.c = na.args.empty() ? 1.0 : to_double(line, key, na.args[0]);
      } else if (na.name == "gaussian_bump" && na.args.empty()) {
        c.phi_init.kind = PhiInit::Kind::GaussianBump;
      } else {
        fail(line, "init.phi: '" + val +
                       "' (use equilibrium, uniform(c), or gaussian_bump)");
      }
    } else if (key == "init.v") {
      const NameArgs na = split_name_args(line, key, val);
      if (na.name == "zero" && na.args.empty()) {
        c.v_init.kind = VInit::Kind::Zero;
      } else if (na.name == "taylor_green" && na.args.empty()) {
        c.v_init.kind = VInit::Kind::TaylorGreen;
      } else if (na.name == "shear" && na.args.size() == 1) {
        c.v_init.kind = VInit::Kind::Shear;
        c.v_init.gamma = to_double(line, key, na.args[0]);
      } else {
        fail(line,
             "init.v: '" + val + "' (use zero, taylor_green, or shear(g))");
      }
    } else if (key == "audit.theta_max") {
      c.theta_max = to_double(line, key, val);
    } else if (key.rfind("audit.tol.", 0) == 0) {
      const std::string name = key.substr(std::string("audit.tol.").size());
      if (name.empty()) fail(line, "audit.tol.: missing tolerance name");
      c.tolerances[name] = to_double(line, key, val);
    } else if (key == "run.label") {
      c.label = val;
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  return c;
}

void ScenarioConfig::validate() const {
  if (potential.kind == SpringKind::Custom)
    throw config_error(
        "potential.kind: custom potentials have no closed form; use warner "
        "or fene_like");
  if (!(potential.H > 0.0) || !(potential.b > 0.0))
    throw config_error("potential.H and potential.b must be > 0");
  if (potential.kind == SpringKind::FENELike &&
      !(potential.r > 0.0 && potential.r < 1.0))
    throw config_error("potential.r must lie in (0, 1) for fene_like");
  material.validate();
  if (n_r < 2 || n_a < 4)
    throw config_error("qgrid.n_r must be >= 2 and qgrid.n_a >= 4");
  if (n_x < 2 || n_y < 2)
    throw config_error("xgrid.n_x and xgrid.n_y must be >= 2");
  if (!(L > 0.0)) throw config_error("xgrid.L must be > 0");
  if (!(dt > 0.0)) throw config_error("time.dt must be > 0");
  if (!(t_end >= dt)) throw config_error("time.t_end must be >= time.dt");
  if (output_every < 1) throw config_error("time.output_every must be >= 1");
  if (picard_iters < 1) throw config_error("heat.picard_iters must be >= 1");
  if (!(theta_init.c > 0.0))
    throw config_error(
        "init.theta: the initial temperature must be >= a positive floor");
  if (phi_init.kind == PhiInit::Kind::Uniform && phi_init.c < 0.0)
    throw config_error("init.phi: uniform(c) needs c >= 0");
  if (!(renorm_eps > 0.0 && renorm_eps < 1.0))
    throw config_error("renorm.eps must lie in (0, 1)");
  for (double k : k_levels)
    if (!(k >= 1.0))
      throw config_error("renorm.k_levels: every level must be >= 1");
  if (theta_max == 0.0)
    throw config_error("audit.theta_max must be positive (or omitted)");
}

XGrid ScenarioConfig::make_xgrid() const { return XGrid(n_x, n_y, L, L, bc); }

QGrid ScenarioConfig::make_qgrid() const {
  return QGrid(n_r, n_a, potential.b);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string config_to_text(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "potential.kind = "
     << (c.potential.kind == SpringKind::WarnerFENE ? "warner" : "fene_like")
     << "\n";
  os << "potential.H = " << fmt(c.potential.H) << "\n";
  os << "potential.b = " << fmt(c.potential.b) << "\n";
  os << "potential.r = " << fmt(c.potential.r) << "\n";
  os << "qgrid.n_r = " << c.n_r << "\n";
  os << "qgrid.n_a = " << c.n_a << "\n";
  os << "xgrid.n_x = " << c.n_x << "\n";
  os << "xgrid.n_y = " << c.n_y << "\n";
  os << "xgrid.L = " << fmt(c.L) << "\n";
  os << "xgrid.bc = " << (c.bc == XGrid::BC::Periodic ? "periodic" : "noflux")
     << "\n";
  os << "flow.nu_floor = " << fmt(c.material.nu_floor) << "\n";
  os << "flow.nu_profile = "
     << (c.material.nu_profile == NuProfile::Constant ? "constant"
                                                      : "rational_decay")
     << "\n";
  switch (c.forcing.kind) {
    case Forcing::Kind::Zero:
      os << "flow.f = zero\n";
      break;
    case Forcing::Kind::Constant:
      os << "flow.f = constant(" << fmt(c.forcing.fx) << ", "
         << fmt(c.forcing.fy) << ")\n";
      break;
    case Forcing::Kind::Vortex:
      os << "flow.f = vortex_forcing(" << fmt(c.forcing.amp) << ")\n";
      break;
  }
  os << "heat.kappa_c0 = " << fmt(c.material.kappa_c0) << "\n";
  os << "heat.kappa_c1 = " << fmt(c.material.kappa_c1) << "\n";
  os << "heat.beta = " << fmt(c.material.beta) << "\n";
  os << "heat.picard_iters = " << c.picard_iters << "\n";
  if (!c.k_levels.empty()) {
    os << "renorm.k_levels = ";
    for (std::size_t i = 0; i < c.k_levels.size(); ++i)
      os << (i ? ", " : "") << fmt(c.k_levels[i]);
    os << "\n";
  }
  os << "renorm.eps = " << fmt(c.renorm_eps) << "\n";
  os << "time.dt = " << fmt(c.dt) << "\n";
  os << "time.t_end = " << fmt(c.t_end) << "\n";
  os << "time.output_every = " << c.output_every << "\n";
  if (c.theta_init.kind == ThetaInit::Kind::Constant)
    os << "init.theta = constant(" << fmt(c.theta_init.c) << ")\n";
  else
    os << "init.theta = profile(hot_spot)\n";
  switch (c.phi_init.kind) {
    case PhiInit::Kind::Equilibrium:
      os << "init.phi = equilibrium\n";
      break;
    case PhiInit::Kind::Uniform:
      os << "init.phi = uniform(" << fmt(c.phi_init.c) << ")\n";
      break;
    case PhiInit::Kind::GaussianBump:
      os << "init.phi = gaussian_bump\n";
      break;
  }
  switch (c.v_init.kind) {
    case VInit::Kind::Zero:
      os << "init.v = zero\n";
      break;
    case VInit::Kind::TaylorGreen:
      os << "init.v = taylor_green\n";
      break;
    case VInit::Kind::Shear:
      os << "init.v = shear(" << fmt(c.v_init.gamma) << ")\n";
      break;
  }
  os << "audit.theta_max = " << fmt(c.theta_max) << "\n";
  for (const auto& kv : c.tolerances)
    os << "audit.tol." << kv.first << " = " << fmt(kv.second) << "\n";
  os << "run.label = " << c.label << "\n";
  return os.str();
}

}  // namespace pkin
