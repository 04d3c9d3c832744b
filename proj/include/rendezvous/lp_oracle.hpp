#pragma once

// Independent verification tools: an exact dense-simplex solver for the
// minimum-l1 problem min ||U||_1 s.t. C U = b, and KKT optimality
// certificates for l1 and block-l2/l1 candidate solutions.

#include "rendezvous/ltv.hpp"

#include <string>

namespace rendezvous {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  Eigen::VectorXd U;
  double objective = 0.0;  // sum |U_i| recomputed from U
  LpStatus status = LpStatus::optimal;
  int pivot_count = 0;
};

// Two-phase primal simplex with Bland's anti-cycling rule on the split
// reformulation min 1'(u+ + u-) s.t. C(u+ - u-) = b, u+, u- >= 0. The final
// basis' dual prices are checked against every column before the result is
// declared optimal. Unbounded cannot occur (objective >= 0).
LpSolution solve_l1_lp(const Eigen::MatrixXd& C, const Eigen::VectorXd& b);

struct CertificateResult {
  bool accepted = false;
  double max_violation = 0.0;
  std::string detail;
};

// l1 optimality: exists lambda with (C' lambda)_i = sign(U_i) on the active
// set {|U_i| > tol} and |(C' lambda)_i| <= 1 + tol elsewhere; lambda is fit
// by least squares on the active set. Feasibility C U = b is checked to
// tol * (1 + ||b||) first. tol <= 0 selects the default 1e-6 * ||U||_inf.
CertificateResult certificate_l1(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& U, double tol = -1.0);

// Block analog for sum ||u(k)||_2: C_k' lambda = u_k/||u_k|| on active
// blocks, ||C_k' lambda||_2 <= 1 + tol on inactive ones.
CertificateResult certificate_l21(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& U, double tol = -1.0);

}  // namespace rendezvous
