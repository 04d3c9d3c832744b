#pragma once

// Iteratively reweighted least squares for minimum-l1 and minimum-l2/l1
// control sequences subject to the stacked terminal constraint C U = b.
// Each iteration solves a weighted minimum-norm step through the 6x6
// Gramian and then tightens the smoothing parameter eps.

#include "rendezvous/ltv.hpp"

#include <string>
#include <vector>

namespace rendezvous {

enum class WeightRule { per_entry, block_norm };
enum class EpsRule { max_entry, sorted_r };
enum class ScalingMode { none, normalized };

struct IrlsConfig {
  int jmax = 500;          // iteration cap
  double eps0 = 1.0;       // initial smoothing parameter
  double eps_bar = 1e-6;   // success threshold on eps
  double tau = 1e-12;      // Tikhonov shift, relative to trace(Gramian)/m
  double tol_u = 1e-9;     // stall tolerance on ||u_next - u_prev||_inf
  WeightRule weight_rule = WeightRule::block_norm;  // l2/l1 mode only
  EpsRule eps_rule = EpsRule::sorted_r;
  int r = 6;               // sparsity index of the sorted-r eps rule
  ScalingMode scaling = ScalingMode::normalized;
};

// Strictly positive per-entry weights w; the weighted norm is sum w_l u_l^2.
struct WeightState {
  Eigen::VectorXd w;
  explicit WeightState(Eigen::VectorXd weights);
  static WeightState unit(int n) { return WeightState(Eigen::VectorXd::Ones(n)); }
};

enum class IrlsStatus { converged, eps_not_reached, stalled, max_iterations };
const char* to_string(IrlsStatus s);
bool is_success(IrlsStatus s);

// Weighted-quadratic value at the previous and current iterate under the
// weights that produced the current one; minimization makes after <= before.
struct SurrogateSample {
  double before = 0.0;
  double after = 0.0;
};

struct IrlsReport {
  ControlSchedule u_star;
  double norm_l1 = 0.0;    // sum |U_l|
  double norm_l21 = 0.0;   // sum of per-stage Euclidean norms (NaN if size%3)
  double residual = 0.0;   // ||C U - b|| / (1 + ||b||)
  std::vector<double> eps_history;
  int iterations = 0;
  IrlsStatus status = IrlsStatus::max_iterations;
  std::vector<SurrogateSample> surrogate;
};

// Minimizer of sum w_l U_l^2 subject to C U = b, regularized by an absolute
// shift tau on the Gramian diagonal; tau = 0 gives the exact weighted
// min-norm point. Iterative refinement keeps the constraint residual at
// roundoff level regardless of tau. Throws std::runtime_error when the
// Gramian is numerically singular (uncontrollable system or degenerate
// weights).
Eigen::VectorXd weighted_min_norm(const RowMatrixXd& C, const WeightState& weights,
                                  const Eigen::VectorXd& b, double tau);

// Direct Gramian C W^{-1} C^T.
Eigen::MatrixXd gramian(const RowMatrixXd& C, const WeightState& weights);

// The recursive Gramian accumulation, valid when every stage shares the
// same (A, B); cross-checks the direct product.
Matrix6d gramian_recursion(const Matrix6d& A, const Matrix63d& B, int N,
                           const WeightState& weights);

// One eps-schedule update; never increases eps and never returns a negative
// value. max_entry compares against the largest (signed) element of u;
// sorted_r divides the (r+1)-th largest magnitude by the vector length,
// clamping r to len(u)-1 so short vectors keep a usable schedule.
double eps_update(double eps_prev, const Eigen::VectorXd& u, EpsRule rule,
                  int r = 6);

// Shared solver core: mode-specific weight updates over a general m x n
// system. l21 mode requires n divisible by 3.
enum class IrlsMode { l1, l21 };
IrlsReport irls_solve(const RowMatrixXd& C, const Eigen::VectorXd& b,
                      IrlsMode mode, const IrlsConfig& config);

IrlsReport irls_l1(const StackedSystem& stacked, const IrlsConfig& config);
IrlsReport irls_l21(const StackedSystem& stacked, const IrlsConfig& config);

}  // namespace rendezvous
