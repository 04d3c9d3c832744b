#include "rendezvous/mission.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rendezvous {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kEarthMu = 3.986004418e14;  // [m^3/s^2]

double length_scale(const std::string& unit) {
  if (unit == "m") return 1.0;
  if (unit == "km") return 1000.0;
  throw std::invalid_argument("mission config: unknown length unit '" + unit +
                              "' (use \"m\" or \"km\")");
}

double velocity_scale(const std::string& unit) {
  if (unit == "m/s") return 1.0;
  if (unit == "km/s") return 1000.0;
  throw std::invalid_argument("mission config: unknown velocity unit '" + unit +
                              "' (use \"m/s\" or \"km/s\")");
}

Vector6d parse_state(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw std::invalid_argument("mission config: missing field '" + field + "'");
  const json& s = j.at(field);
  for (const char* key : {"position", "velocity"})
    if (!s.contains(key) || !s.at(key).is_array() || s.at(key).size() != 3)
      throw std::invalid_argument("mission config: '" + field + "." + key +
                                  "' must be a 3-array");
  const double ls = length_scale(s.value("position_unit", std::string("m")));
  const double vs = velocity_scale(s.value("velocity_unit", std::string("m/s")));
  Vector6d x;
  for (int i = 0; i < 3; ++i) {
    x(i) = s.at("position").at(i).get<double>() * ls;
    x(i + 3) = s.at("velocity").at(i).get<double>() * vs;
  }
  return x;
}

IrlsConfig parse_irls(const json& j) {
  IrlsConfig c;
  if (!j.contains("irls")) return c;
  const json& s = j.at("irls");
  c.jmax = s.value("jmax", c.jmax);
  c.eps0 = s.value("eps0", c.eps0);
  c.eps_bar = s.value("eps_bar", c.eps_bar);
  c.tau = s.value("tau", c.tau);
  c.tol_u = s.value("tol_u", c.tol_u);
  c.r = s.value("r", c.r);
  if (s.contains("weight_rule")) {
    const std::string v = s.at("weight_rule").get<std::string>();
    if (v == "paper") c.weight_rule = WeightRule::per_entry;
    else if (v == "block") c.weight_rule = WeightRule::block_norm;
    else throw std::invalid_argument("mission config: weight_rule must be paper|block");
  }
  if (s.contains("eps_rule")) {
    const std::string v = s.at("eps_rule").get<std::string>();
    if (v == "paper") c.eps_rule = EpsRule::max_entry;
    else if (v == "sorted") c.eps_rule = EpsRule::sorted_r;
    else throw std::invalid_argument("mission config: eps_rule must be paper|sorted");
  }
  if (s.contains("scaling")) {
    const std::string v = s.at("scaling").get<std::string>();
    if (v == "none") c.scaling = ScalingMode::none;
    else if (v == "normalized") c.scaling = ScalingMode::normalized;
    else throw std::invalid_argument("mission config: scaling must be none|normalized");
  }
  return c;
}

MissionSpec preset_gto() {
  MissionSpec s;
  s.name = "gto";
  s.orbit = OrbitParams::from_elements(24616e3, 0.73074, kEarthMu);
  s.nu0 = 0.1 * M_PI;
  s.nuf = 5.2;
  s.N = 600;
  s.x0_physical << 0.0, 10000.0, 0.0, 0.0, -3.0, 0.0;
  s.xf_physical.setZero();
  s.solver_mode = SolverMode::l1;
  // The eps schedule advances one weighted step per iteration, so runs to
  // eps_bar take tens of thousands of cheap 6x6 solves.
  s.irls.jmax = 200000;
  return s;
}

MissionSpec preset_atv() {
  MissionSpec s;
  s.name = "atv";
  s.orbit = OrbitParams::from_elements(6763e3, 0.0052, kEarthMu);
  s.nu0 = 0.0;
  s.nuf = 8.1831;
  s.N = 50;
  // In-plane 4-state embedded as (x, 0, z, xdot, 0, zdot).
  s.x0_physical << -30000.0, 0.0, 500.0, 8.5140, 0.0, 0.0;
  s.xf_physical << -100.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  s.solver_mode = SolverMode::l1;
  // The l21 weight coupling settles slowly here (~5e5 iterations); each
  // iteration is a 6x6 solve, so the whole run stays around a second.
  s.irls.jmax = 2000000;
  return s;
}

void validate(const MissionSpec& s) {
  if (!(s.nuf > s.nu0))
    throw std::invalid_argument("mission config: nuf must exceed nu0");
  if (s.N < 1) throw std::invalid_argument("mission config: N must be >= 1");
  if (!(s.impulse_threshold > 0.0 && s.impulse_threshold < 1.0))
    throw std::invalid_argument("mission config: impulse_threshold must be in (0,1)");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

const char* to_string(SolverMode m) { return m == SolverMode::l1 ? "l1" : "l21"; }

MissionSpec parse_mission_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("mission config: ") + e.what());
  }
  MissionSpec s;
  s.name = j.value("mission", std::string("custom"));
  double a_m = 0.0;
  if (!j.contains("a")) throw std::invalid_argument("mission config: missing field 'a'");
  if (j.at("a").is_object())
    a_m = j.at("a").at("value").get<double>() *
          length_scale(j.at("a").value("unit", std::string("m")));
  else
    a_m = j.at("a").get<double>();
  if (!j.contains("e")) throw std::invalid_argument("mission config: missing field 'e'");
  s.orbit = OrbitParams::from_elements(a_m, j.at("e").get<double>(),
                                       j.value("mu", kEarthMu));
  if (!j.contains("nu0") || !j.contains("nuf"))
    throw std::invalid_argument("mission config: missing field 'nu0' or 'nuf'");
  s.nu0 = j.at("nu0").get<double>();
  s.nuf = j.at("nuf").get<double>();
  s.N = j.value("N", 100);
  s.x0_physical = parse_state(j, "x0");
  s.xf_physical = parse_state(j, "xf");
  const std::string mode = j.value("mode", std::string("l1"));
  if (mode == "l1") s.solver_mode = SolverMode::l1;
  else if (mode == "l21") s.solver_mode = SolverMode::l21;
  else throw std::invalid_argument("mission config: mode must be l1|l21");
  s.irls = parse_irls(j);
  s.impulse_threshold = j.value("impulse_threshold", s.impulse_threshold);
  const std::string cm = j.value("control_model", std::string("impulse"));
  if (cm == "impulse") s.control_model = ControlModel::impulse_dv;
  else if (cm == "zoh") s.control_model = ControlModel::accel_zoh;
  else throw std::invalid_argument("mission config: control_model must be impulse|zoh");
  validate(s);
  return s;
}

MissionSpec load_mission(const std::string& source) {
  if (source == "gto") return preset_gto();
  if (source == "atv") return preset_atv();
  std::ifstream in(source);
  if (!in)
    throw std::invalid_argument("unknown preset or unreadable config file: '" +
                                source + "' (presets: gto, atv)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mission_json(buf.str());
}

ImpulseTable extract_impulses(const ControlSchedule& U, const AnomalyGrid& grid,
                              double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("extract_impulses: threshold must be in (0,1)");
  ImpulseTable table;
  double max_norm = 0.0;
  for (int k = 0; k < U.stages(); ++k)
    max_norm = std::max(max_norm, U.stage(k).norm());
  table.threshold_abs = threshold * max_norm;
  for (int k = 0; k < U.stages(); ++k) {
    const Eigen::Vector3d dv = U.stage(k);
    if (dv.norm() > table.threshold_abs && max_norm > 0.0)
      table.entries.push_back({grid.node(k), k, dv, dv.norm()});
  }
  return table;
}

RunArtifacts run_mission(const MissionSpec& spec) {
  validate(spec);
  RunArtifacts art;
  art.spec = spec;
  if (spec.orbit.scaling_marginal())
    art.warnings.push_back(
        "eccentricity >= 1/sqrt(2): the scaled-coordinate change of variables "
        "is outside its stated comfort zone; results remain well defined");

  const AnomalyGrid grid(spec.nu0, spec.nuf, spec.N);
  DiscretizeOptions dopt;
  dopt.model = spec.control_model;
  const DiscreteLTV sys = discretize(spec.orbit, grid, dopt);

  const StateVector x0t =
      to_tilde(spec.orbit, spec.nu0, {spec.x0_physical, Frame::physical});
  const StateVector xft =
      to_tilde(spec.orbit, spec.nuf, {spec.xf_physical, Frame::physical});
  art.stacked = stack(sys, x0t, xft);

  art.report = spec.solver_mode == SolverMode::l1 ? irls_l1(art.stacked, spec.irls)
                                                  : irls_l21(art.stacked, spec.irls);

  art.tilde_traj = propagate(sys, x0t, art.report.u_star);
  art.physical_traj.resize(art.tilde_traj.size());
  for (int k = 0; k <= grid.N; ++k)
    art.physical_traj[k] =
        to_physical(spec.orbit, grid.node(k), art.tilde_traj[k]).v;

  art.impulses =
      extract_impulses(art.report.u_star, grid, spec.impulse_threshold);
  return art;
}

std::string summary_json(const RunArtifacts& art) {
  ordered_json j;
  j["mission"] = art.spec.name;
  j["mode"] = to_string(art.spec.solver_mode);
  j["N"] = art.spec.N;
  j["norm_l1"] = art.report.norm_l1;
  j["norm_l21"] = art.report.norm_l21;
  j["residual"] = art.report.residual;
  j["iterations"] = art.report.iterations;
  j["status"] = to_string(art.report.status);
  j["eps_final"] = art.report.eps_history.empty() ? art.spec.irls.eps0
                                                  : art.report.eps_history.back();
  ordered_json imps = ordered_json::array();
  for (const ImpulseEntry& e : art.impulses.entries) {
    ordered_json o;
    o["nu"] = e.nu;
    o["k"] = e.k;
    o["dv"] = {e.dv(0), e.dv(1), e.dv(2)};
    o["mag"] = e.mag;
    imps.push_back(o);
  }
  j["impulses"] = imps;
  ordered_json cfg;
  cfg["jmax"] = art.spec.irls.jmax;
  cfg["eps0"] = art.spec.irls.eps0;
  cfg["eps_bar"] = art.spec.irls.eps_bar;
  cfg["tau"] = art.spec.irls.tau;
  cfg["tol_u"] = art.spec.irls.tol_u;
  cfg["weight_rule"] =
      art.spec.irls.weight_rule == WeightRule::per_entry ? "paper" : "block";
  cfg["eps_rule"] =
      art.spec.irls.eps_rule == EpsRule::max_entry ? "paper" : "sorted";
  cfg["r"] = art.spec.irls.r;
  cfg["scaling"] =
      art.spec.irls.scaling == ScalingMode::none ? "none" : "normalized";
  cfg["control_model"] =
      art.spec.control_model == ControlModel::impulse_dv ? "impulse" : "zoh";
  cfg["impulse_threshold"] = art.spec.impulse_threshold;
  j["solver_config"] = cfg;
  if (!art.warnings.empty()) j["warnings"] = art.warnings;
  return j.dump(2) + "\n";
}

void write_artifacts(const RunArtifacts& art, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const AnomalyGrid grid(art.spec.nu0, art.spec.nuf, art.spec.N);

  {
    std::ofstream f(fs::path(out_dir) / "trajectory.csv");
    if (!f) throw std::runtime_error("cannot write trajectory.csv in " + out_dir);
    f << "k,nu_rad,x_m,y_m,z_m,xdot_mps,ydot_mps,zdot_mps,xt,yt,zt,xt_p,yt_p,zt_p\n";
    for (int k = 0; k < static_cast<int>(art.physical_traj.size()); ++k) {
      f << k << ',' << fmt(grid.node(k));
      for (int i = 0; i < 6; ++i) f << ',' << fmt(art.physical_traj[k](i));
      for (int i = 0; i < 6; ++i) f << ',' << fmt(art.tilde_traj[k].v(i));
      f << '\n';
    }
  }
  {
    std::ofstream f(fs::path(out_dir) / "control.csv");
    if (!f) throw std::runtime_error("cannot write control.csv in " + out_dir);
    f << "k,nu_rad,ux,uy,uz,stage_norm2,stage_norm1\n";
    for (int k = 0; k < art.report.u_star.stages(); ++k) {
      const Eigen::Vector3d u = art.report.u_star.stage(k);
      f << k << ',' << fmt(grid.node(k)) << ',' << fmt(u(0)) << ',' << fmt(u(1))
        << ',' << fmt(u(2)) << ',' << fmt(u.norm()) << ','
        << fmt(u.cwiseAbs().sum()) << '\n';
    }
  }
  {
    std::ofstream f(fs::path(out_dir) / "convergence.csv");
    if (!f) throw std::runtime_error("cannot write convergence.csv in " + out_dir);
    f << "j,eps\n";
    for (size_t j = 0; j < art.report.eps_history.size(); ++j)
      f << (j + 1) << ',' << fmt(art.report.eps_history[j]) << '\n';
  }
  {
    std::ofstream f(fs::path(out_dir) / "summary.json");
    if (!f) throw std::runtime_error("cannot write summary.json in " + out_dir);
    f << summary_json(art);
  }
}

}  // namespace rendezvous
