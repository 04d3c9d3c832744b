#pragma once

// Discrete LTV model on a uniform true-anomaly grid: stage matrices
// (A(k), B(k)), discrete transition products, the stacked terminal
// constraint (C_N, beta, b), and trajectory propagation.

#include "rendezvous/orbit.hpp"

#include <vector>

namespace rendezvous {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Uniform grid of N stages over [nu0, nuf]; node(k) = nu0 + alpha*k,
// node(N) pinned to nuf. Control dimension is fixed at 3.
struct AnomalyGrid {
  double nu0 = 0.0;
  double nuf = 0.0;
  int N = 0;
  double alpha = 0.0;  // sampling period (nuf-nu0)/N [rad]
  static constexpr int m = 3;

  AnomalyGrid() = default;
  AnomalyGrid(double nu0_, double nuf_, int N_);
  double node(int k) const { return k == N ? nuf : nu0 + alpha * k; }
};

// How a stage's control enters the discrete model.
//   impulse_dv: u(k) is a physical delta-v [m/s] applied at node(k); B(k)
//     propagates the resulting scaled-velocity jump (rho_k/omega_k per unit
//     delta-v) across the stage. Reproduces the benchmark missions.
//   accel_zoh: u(k) is held constant over the stage and enters through the
//     continuous input matrix; B(k) is the stage integral of Phi*Bc by
//     Gauss-Legendre quadrature.
enum class ControlModel { impulse_dv, accel_zoh };

struct DiscretizeOptions {
  ControlModel model = ControlModel::accel_zoh;
  int gl_nodes = 5;        // quadrature order per stage (accel_zoh)
  bool self_check = true;  // re-integrate with doubled nodes, compare
};

// Stage matrices of x(k+1) = A(k) x(k) + B(k) u(k), k = 0..N-1.
struct DiscreteLTV {
  AnomalyGrid grid;
  std::vector<Matrix6d> A;
  std::vector<Matrix63d> B;
};

// Control schedule: stacked vector U = [u(0); u(1); ...; u(N-1)] with
// per-stage 3-vector views. The two views index the same storage.
struct ControlSchedule {
  Eigen::VectorXd stacked;

  ControlSchedule() = default;
  explicit ControlSchedule(Eigen::VectorXd u) : stacked(std::move(u)) {}
  static ControlSchedule zero(int stages) {
    return ControlSchedule(Eigen::VectorXd::Zero(3 * stages));
  }
  int stages() const { return static_cast<int>(stacked.size()) / 3; }
  Eigen::Vector3d stage(int k) const { return stacked.segment<3>(3 * k); }
  void set_stage(int k, const Eigen::Vector3d& u) { stacked.segment<3>(3 * k) = u; }
};

// Terminal-constraint system: reach xf from x0 means C_N U = b with
// b = xf - beta and beta the homogeneous terminal state.
struct StackedSystem {
  AnomalyGrid grid;
  RowMatrixXd C_N;      // 6 x 3N, block tau = Phi_d(N, tau+1) B(tau)
  Vector6d beta;        // Phi_d(N,0) x0
  Vector6d b;           // xf - beta
  StateVector x0, xf;   // scaled frame
};

// Builds A(k) from the transition matrix and B(k) per the control model.
// Throws std::runtime_error if the quadrature self-check sees a relative
// change above 1e-8 when the node count is doubled.
DiscreteLTV discretize(const OrbitParams& params, const AnomalyGrid& grid,
                       const DiscretizeOptions& opts = {});

// Product A(k-1)...A(m); identity when k == m. Throws std::invalid_argument
// unless 0 <= m <= k <= N.
Matrix6d discrete_stm(const DiscreteLTV& sys, int k, int m);

// Assembles the stacked system. x0 and xf must be in the scaled frame
// (convert with l_matrix first); throws std::invalid_argument otherwise.
StackedSystem stack(const DiscreteLTV& sys, const StateVector& x0,
                    const StateVector& xf);

// Runs the recursion x(k+1) = A(k) x(k) + B(k) u(k) and returns all N+1
// scaled states. U must have exactly N stages.
std::vector<StateVector> propagate(const DiscreteLTV& sys, const StateVector& x0,
                                   const ControlSchedule& U);

}  // namespace rendezvous
