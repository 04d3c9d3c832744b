#include "rendezvous/lp_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rendezvous {
namespace {

// Dense revised simplex over A x = d, x >= 0, d >= 0, starting from the
// all-artificial identity basis (artificial j for row j lives at column
// nc + j). Bland's rule: entering column is the lowest eligible index;
// leaving row breaks ratio ties by lowest basis column. The basis inverse
// is refreshed by LU every pivot; m <= 6 keeps that trivial. Artificials
// never re-enter once out.
struct Simplex {
  const Eigen::MatrixXd& A;  // m x nc, rows pre-flipped so d >= 0
  const Eigen::VectorXd& d;
  int m, nc;
  std::vector<int> basis;
  std::vector<char> in_basis;
  int pivots = 0;

  Simplex(const Eigen::MatrixXd& A_, const Eigen::VectorXd& d_)
      : A(A_), d(d_), m(static_cast<int>(A_.rows())), nc(static_cast<int>(A_.cols())) {
    basis.resize(m);
    in_basis.assign(nc, 0);
    for (int i = 0; i < m; ++i) basis[i] = nc + i;
  }

  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= nc)
        B(basis[i] - nc, i) = 1.0;
      else
        B.col(i) = A.col(basis[i]);
    }
    return B;
  }

  // Minimizes cost'x (+ art_cost per unit of artificial) from the current
  // basis; returns the objective at termination.
  double run(const Eigen::VectorXd& cost, double art_cost) {
    const double Amax = std::max(1.0, A.cwiseAbs().maxCoeff());
    for (;;) {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix());
      const Eigen::VectorXd xB = lu.solve(d);
      Eigen::VectorXd cB(m);
      for (int i = 0; i < m; ++i)
        cB(i) = basis[i] >= nc ? art_cost : cost(basis[i]);
      const Eigen::VectorXd y = lu.transpose().solve(cB);

      const double enter_tol =
          1e-11 * std::max(1.0, y.lpNorm<Eigen::Infinity>() * Amax);
      int enter = -1;
      for (int j = 0; j < nc; ++j) {
        if (in_basis[j]) continue;
        if (cost(j) - y.dot(A.col(j)) < -enter_tol) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) {
        double obj = 0.0;
        for (int i = 0; i < m; ++i) obj += cB(i) * std::max(xB(i), 0.0);
        return obj;
      }

      const Eigen::VectorXd dir = lu.solve(A.col(enter));
      const double piv_tol = 1e-11 * Amax;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (dir(i) <= piv_tol) continue;
        const double ratio = std::max(xB(i), 0.0) / dir(i);
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::fabs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0)
        throw std::runtime_error("solve_l1_lp: unbounded direction (cannot happen)");
      if (basis[leave] < nc) in_basis[basis[leave]] = 0;
      basis[leave] = enter;
      in_basis[enter] = 1;
      ++pivots;
    }
  }
};

}  // namespace

LpSolution solve_l1_lp(const Eigen::MatrixXd& C, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  if (b.size() != m) throw std::invalid_argument("solve_l1_lp: rhs length mismatch");
  if (!C.allFinite() || !b.allFinite())
    throw std::invalid_argument("solve_l1_lp: entries must be finite");

  Eigen::MatrixXd A(m, 2 * n);
  A.leftCols(n) = C;
  A.rightCols(n) = -C;
  Eigen::VectorXd d = b;
  for (int i = 0; i < m; ++i) {
    if (d(i) < 0.0) {
      d(i) = -d(i);
      A.row(i) = -A.row(i);
    }
  }

  Simplex sx(A, d);

  const Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(2 * n);
  const double art_total = sx.run(phase1_cost, 1.0);
  LpSolution sol;
  sol.pivot_count = sx.pivots;
  if (art_total > 1e-8 * (1.0 + d.sum())) {
    sol.status = LpStatus::infeasible;
    sol.U = Eigen::VectorXd::Zero(n);
    return sol;
  }

  // Phase 2: any artificial still basic stays at zero level with zero cost.
  const Eigen::VectorXd cost = Eigen::VectorXd::Ones(2 * n);
  sx.run(cost, 0.0);
  sol.pivot_count = sx.pivots;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sx.basis_matrix());
  const Eigen::VectorXd xB = lu.solve(d);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < m; ++i)
    if (sx.basis[i] < 2 * n) x(sx.basis[i]) = std::max(xB(i), 0.0);
  sol.U = x.head(n) - x.tail(n);
  sol.objective = sol.U.cwiseAbs().sum();
  sol.status = LpStatus::optimal;

  // Final duality check: every structural reduced cost nonnegative.
  Eigen::VectorXd cB(m);
  for (int i = 0; i < m; ++i) cB(i) = sx.basis[i] >= 2 * n ? 0.0 : 1.0;
  const Eigen::VectorXd y = lu.transpose().solve(cB);
  const double check_tol =
      1e-7 * std::max(1.0, y.lpNorm<Eigen::Infinity>() *
                               std::max(1.0, A.cwiseAbs().maxCoeff()));
  for (int j = 0; j < 2 * n; ++j)
    if (1.0 - y.dot(A.col(j)) < -check_tol)
      throw std::runtime_error("solve_l1_lp: duality check failed at termination");
  return sol;
}

namespace {

CertificateResult reject(const std::string& why, double violation) {
  return {false, violation, why};
}

}  // namespace

CertificateResult certificate_l1(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& U, double tol) {
  const int n = static_cast<int>(C.cols());
  if (U.size() != n) throw std::invalid_argument("certificate_l1: length mismatch");
  const double umax = n ? U.cwiseAbs().maxCoeff() : 0.0;
  const double t = tol > 0.0 ? tol : (umax > 0.0 ? 1e-6 * umax : 1e-12);

  const double feas =
      (C * U - b).lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
  if (feas > t) return reject("infeasible: CU != b within tol", feas);

  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (std::fabs(U(i)) > t) active.push_back(i);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(C.rows());
  if (!active.empty()) {
    Eigen::MatrixXd Act(active.size(), C.rows());
    Eigen::VectorXd s(active.size());
    for (size_t k = 0; k < active.size(); ++k) {
      Act.row(k) = C.col(active[k]).transpose();
      s(k) = U(active[k]) > 0.0 ? 1.0 : -1.0;
    }
    lambda = Act.colPivHouseholderQr().solve(s);
  }

  const Eigen::VectorXd g = C.transpose() * lambda;
  double viol = feas;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(U(i)) > t)
      viol = std::max(viol, std::fabs(g(i) - (U(i) > 0.0 ? 1.0 : -1.0)));
    else
      viol = std::max(viol, std::fabs(g(i)) - 1.0);
  }
  if (viol > t) return reject("dual conditions violated", viol);
  return {true, viol, "ok"};
}

CertificateResult certificate_l21(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& U, double tol) {
  const int n = static_cast<int>(C.cols());
  if (U.size() != n || n % 3 != 0)
    throw std::invalid_argument("certificate_l21: need 3-entry blocks");
  const int K = n / 3;

  double max_block = 0.0;
  for (int k = 0; k < K; ++k)
    max_block = std::max(max_block, U.segment<3>(3 * k).norm());
  const double t = tol > 0.0 ? tol : (max_block > 0.0 ? 1e-6 * max_block : 1e-12);

  const double feas =
      (C * U - b).lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
  if (feas > t) return reject("infeasible: CU != b within tol", feas);

  std::vector<int> active;
  for (int k = 0; k < K; ++k)
    if (U.segment<3>(3 * k).norm() > t) active.push_back(k);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(C.rows());
  if (!active.empty()) {
    Eigen::MatrixXd Act(3 * active.size(), C.rows());
    Eigen::VectorXd s(3 * active.size());
    for (size_t k = 0; k < active.size(); ++k) {
      const int blk = active[k];
      Act.middleRows(3 * k, 3) = C.middleCols(3 * blk, 3).transpose();
      s.segment<3>(3 * k) = U.segment<3>(3 * blk).normalized();
    }
    lambda = Act.colPivHouseholderQr().solve(s);
  }

  double viol = feas;
  for (int k = 0; k < K; ++k) {
    const Eigen::Vector3d gk = C.middleCols(3 * k, 3).transpose() * lambda;
    if (U.segment<3>(3 * k).norm() > t)
      viol = std::max(viol,
                      (gk - U.segment<3>(3 * k).normalized()).lpNorm<Eigen::Infinity>());
    else
      viol = std::max(viol, gk.norm() - 1.0);
  }
  if (viol > t) return reject("block dual conditions violated", viol);
  return {true, viol, "ok"};
}

}  // namespace rendezvous
