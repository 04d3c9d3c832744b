#pragma once

// End-to-end orchestration: presets and JSON mission configs, unit
// conversion through the coordinate map, solver invocation, impulse
// extraction, and CSV/JSON artifact emission.

#include "rendezvous/irls.hpp"

#include <string>
#include <vector>

namespace rendezvous {

enum class SolverMode { l1, l21 };
const char* to_string(SolverMode m);

struct MissionSpec {
  std::string name;
  OrbitParams orbit;
  double nu0 = 0.0;   // [rad]
  double nuf = 0.0;   // [rad]
  int N = 0;
  Vector6d x0_physical = Vector6d::Zero();  // [m, m, m, m/s, m/s, m/s]
  Vector6d xf_physical = Vector6d::Zero();
  SolverMode solver_mode = SolverMode::l1;
  IrlsConfig irls;
  double impulse_threshold = 1e-3;  // fraction of the max per-stage norm
  ControlModel control_model = ControlModel::impulse_dv;
};

// Presets "gto" (out-of-plane transfer-orbit rendezvous, N=600) and "atv"
// (in-plane station approach, N=50); anything else is read as a path to a
// JSON config. Throws std::invalid_argument with a field diagnostic on
// malformed or inconsistent input.
MissionSpec load_mission(const std::string& source);

// Parses a JSON config document. Lengths carry explicit unit strings
// ("m"/"km", "m/s"/"km/s"); angles are always radians.
MissionSpec parse_mission_json(const std::string& text);

struct ImpulseEntry {
  double nu = 0.0;          // [rad]
  int k = 0;                // stage index
  Eigen::Vector3d dv = Eigen::Vector3d::Zero();  // [m/s]
  double mag = 0.0;         // ||dv||_2
};

// Stages whose norm clears threshold * max-stage-norm, in anomaly order.
struct ImpulseTable {
  std::vector<ImpulseEntry> entries;
  double threshold_abs = 0.0;
};

// threshold must lie in (0,1); adjacent qualifying stages stay separate.
ImpulseTable extract_impulses(const ControlSchedule& U, const AnomalyGrid& grid,
                              double threshold);

struct RunArtifacts {
  MissionSpec spec;
  IrlsReport report;
  StackedSystem stacked;
  std::vector<StateVector> tilde_traj;       // N+1 scaled states
  std::vector<Vector6d> physical_traj;       // N+1 physical states
  ImpulseTable impulses;
  std::vector<std::string> warnings;
};

// Full pipeline: convert endpoints, discretize, stack, solve, propagate,
// convert back, extract impulses. Solver failure statuses are reported in
// the artifacts, not thrown.
RunArtifacts run_mission(const MissionSpec& spec);

// Writes trajectory.csv, control.csv, convergence.csv, summary.json into
// out_dir (created if needed). Identical artifacts yield identical bytes.
void write_artifacts(const RunArtifacts& art, const std::string& out_dir);

// The summary document alone (also what write_artifacts stores).
std::string summary_json(const RunArtifacts& art);

}  // namespace rendezvous
