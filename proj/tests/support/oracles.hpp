#pragma once

// Independent reference computations for the test suites. Everything here
// avoids the library's own code paths: the dynamics matrix is rebuilt from
// its definition, integrals use different quadratures, and linear-algebra
// answers come from generic dense factorizations instead of the solver's
// Gramian route.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

// Continuous system matrix of the scaled relative dynamics, written out from
// its definition instead of calling the library.
inline Eigen::Matrix<double, 6, 6> dynamics_matrix(double e, double nu) {
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
  A(0, 3) = 1.0;
  A(1, 4) = 1.0;
  A(2, 5) = 1.0;
  A(3, 5) = 2.0;
  A(4, 1) = -1.0;
  A(5, 2) = 3.0 / (1.0 + e * std::cos(nu));
  A(5, 3) = -2.0;
  return A;
}

// Classic fixed-step RK4 for the homogeneous matrix system X' = A(nu) X,
// X(nu0) = I. steps ~ 20000 over a few radians puts the local error well
// below the 1e-6 comparison tolerances.
inline Eigen::Matrix<double, 6, 6> rk4_stm(double e, double nu0, double nu,
                                           int steps) {
  using M6 = Eigen::Matrix<double, 6, 6>;
  M6 X = M6::Identity();
  const double h = (nu - nu0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = nu0 + h * i;
    const M6 k1 = dynamics_matrix(e, t) * X;
    const M6 k2 = dynamics_matrix(e, t + 0.5 * h) * (X + 0.5 * h * k1);
    const M6 k3 = dynamics_matrix(e, t + 0.5 * h) * (X + 0.5 * h * k2);
    const M6 k4 = dynamics_matrix(e, t + h) * (X + h * k3);
    X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return X;
}

// Matrix exponential by scaling and squaring over a plain Taylor series;
// fine for the well-scaled 6x6 arguments used in the tests.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  int squarings = 0;
  double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd S = M / std::ldexp(1.0, squarings);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * S / k;
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / pp;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    x[i] = -xi;
    x[n - 1 - i] = xi;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
  }
}

// Composite 64-point Gauss-Legendre integral of rho(tau)^-2 over [nu0, nu],
// one panel per radian. Independent reference for the J quadrature.
inline double j_integral(double e, double nu0, double nu) {
  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::fabs(nu - nu0))));
  const double hp = (nu - nu0) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = nu0 + p * hp, b = a + hp;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 64; ++i) {
      const double rho = 1.0 + e * std::cos(mid + half * x[i]);
      acc += half * w[i] / (rho * rho);
    }
  }
  return acc;
}

// Weighted minimum-norm point through the full KKT system
// [diag(w) C^T; C 0] [u; lambda] = [0; b], solved by one dense LU. The
// library computes the same point through the 6x6 Gramian instead.
inline Eigen::VectorXd kkt_min_norm(const Eigen::MatrixXd& C,
                                    const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& b) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = w.asDiagonal();
  K.topRightCorner(n, m) = C.transpose();
  K.bottomLeftCorner(m, n) = C;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.tail(m) = b;
  return K.fullPivLu().solve(rhs).head(n);
}

// Exhaustive minimum-l1 solve for small instances: every invertible
// m-column basis gives a basic solution of C u = b; the optimum of
// min sum|u_i| s.t. C u = b is attained at one of them (or at u = 0).
inline double enumerate_l1(const Eigen::MatrixXd& C, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  if (b.norm() == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(m);
  // Iterate over all m-subsets of {0..n-1} in lexicographic order.
  for (int i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = C.col(idx[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      const Eigen::VectorXd u = lu.solve(b);
      if ((B * u - b).norm() <= 1e-9 * (1.0 + b.norm()))
        best = std::min(best, u.cwiseAbs().sum());
    }
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace oracles
