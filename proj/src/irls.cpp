#include "rendezvous/irls.hpp"

#include "rendezvous/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rendezvous {
namespace {

// Builds the weighted Gramian C W^{-1} C^T from row pointers; inv_w holds
// the elementwise reciprocals of the weights.
Eigen::MatrixXd gramian_from_inv(const RowMatrixXd& C, const double* inv_w) {
  const auto& ops = kernels::active();
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i) {
    const double* ri = C.data() + static_cast<long>(i) * n;
    for (int j = i; j < m; ++j) {
      const double* rj = C.data() + static_cast<long>(j) * n;
      const double g = ops.wdot(ri, rj, inv_w, n);
      G(i, j) = g;
      G(j, i) = g;
    }
  }
  return G;
}

// Weighted min-norm step with an absolute Tikhonov shift on a precomputed
// Gramian. The shifted factorization preconditions an iterative refinement
// against the unshifted Gramian, so the returned point satisfies C U = b to
// roundoff even with tau > 0.
Eigen::VectorXd min_norm_step(const RowMatrixXd& C, const double* inv_w,
                              const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                              double tau_abs) {
  const auto& ops = kernels::active();
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  Eigen::MatrixXd Gs = G;
  Gs.diagonal().array() += tau_abs;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Gs);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("weighted_min_norm: Gramian factorization failed");

  const double bscale = 1.0 + b.norm();
  Eigen::VectorXd lam = ldlt.solve(b);
  Eigen::VectorXd res = b - G * lam;
  for (int pass = 0; pass < 3 && res.norm() > 1e-14 * bscale; ++pass) {
    lam += ldlt.solve(res);
    res = b - G * lam;
  }
  if (!(res.norm() <= 1e-6 * bscale))
    throw std::runtime_error(
        "weighted_min_norm: Gramian numerically singular (residual did not "
        "converge)");

  Eigen::VectorXd u(n);
  ops.combine(C.data(), m, n, inv_w, lam.data(), u.data());
  return u;
}

double relative_residual(const RowMatrixXd& C, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& b) {
  const auto& ops = kernels::active();
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ri = b(i) - ops.dot(C.data() + static_cast<long>(i) * n,
                                     u.data(), n);
    acc += ri * ri;
  }
  return std::sqrt(acc) / (1.0 + b.norm());
}

double block_l21_norm(const Eigen::VectorXd& u) {
  if (u.size() % 3 != 0) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (long k = 0; k < u.size() / 3; ++k) acc += u.segment<3>(3 * k).norm();
  return acc;
}

void update_inv_weights(const Eigen::VectorXd& u, double eps, IrlsMode mode,
                        WeightRule rule, Eigen::VectorXd& inv_w) {
  const auto& ops = kernels::active();
  const int n = static_cast<int>(u.size());
  if (mode == IrlsMode::l1) {
    ops.inv_weights_l1(u.data(), eps, inv_w.data(), n);
  } else if (rule == WeightRule::per_entry) {
    ops.inv_weights_quarter(u.data(), eps, inv_w.data(), n);
  } else {
    for (int k = 0; k < n / 3; ++k) {
      const double t =
          std::sqrt(u.segment<3>(3 * k).squaredNorm() + eps * eps);
      inv_w(3 * k) = inv_w(3 * k + 1) = inv_w(3 * k + 2) = t;
    }
  }
}

}  // namespace

WeightState::WeightState(Eigen::VectorXd weights) : w(std::move(weights)) {
  for (long i = 0; i < w.size(); ++i)
    if (!(w(i) > 0.0) || !std::isfinite(w(i)))
      throw std::invalid_argument("WeightState: weights must be positive and finite");
}

const char* to_string(IrlsStatus s) {
  switch (s) {
    case IrlsStatus::converged: return "converged";
    case IrlsStatus::eps_not_reached: return "eps-not-reached";
    case IrlsStatus::stalled: return "stalled";
    case IrlsStatus::max_iterations: return "max-iterations";
  }
  return "unknown";
}

bool is_success(IrlsStatus s) {
  return s == IrlsStatus::converged || s == IrlsStatus::stalled;
}

Eigen::VectorXd weighted_min_norm(const RowMatrixXd& C, const WeightState& weights,
                                  const Eigen::VectorXd& b, double tau) {
  if (weights.w.size() != C.cols())
    throw std::invalid_argument("weighted_min_norm: weight length mismatch");
  if (b.size() != C.rows())
    throw std::invalid_argument("weighted_min_norm: rhs length mismatch");
  const Eigen::VectorXd inv_w = weights.w.cwiseInverse();
  return min_norm_step(C, inv_w.data(), gramian_from_inv(C, inv_w.data()), b,
                       tau);
}

Eigen::MatrixXd gramian(const RowMatrixXd& C, const WeightState& weights) {
  if (weights.w.size() != C.cols())
    throw std::invalid_argument("gramian: weight length mismatch");
  const Eigen::VectorXd inv_w = weights.w.cwiseInverse();
  return gramian_from_inv(C, inv_w.data());
}

Matrix6d gramian_recursion(const Matrix6d& A, const Matrix63d& B, int N,
                           const WeightState& weights) {
  if (weights.w.size() != 3 * static_cast<long>(N))
    throw std::invalid_argument("gramian_recursion: weight length mismatch");
  const auto Winv = [&](int k) -> Eigen::Matrix3d {
    return Eigen::Vector3d(weights.w.segment<3>(3 * k))
        .cwiseInverse()
        .asDiagonal();
  };
  // Stage 0's stacked block carries the longest transition product, so the
  // seed takes W(0) and each sweep conjugates everything accumulated so far
  // by one more A before adding the next-later stage. H(N-1) then matches
  // the direct product C W^{-1} C^T for constant (A, B).
  Matrix6d H = B * Winv(0) * B.transpose();
  for (int i = 1; i < N; ++i)
    H = A * H * A.transpose() + B * Winv(i) * B.transpose();
  return H;
}

double eps_update(double eps_prev, const Eigen::VectorXd& u, EpsRule rule,
                  int r) {
  if (!(eps_prev > 0.0)) throw std::invalid_argument("eps_update: eps_prev must be > 0");
  const int n = static_cast<int>(u.size());
  if (n == 0) return 0.0;
  if (rule == EpsRule::max_entry)
    return std::max(0.0, std::min(eps_prev, u.maxCoeff()));
  const int r_eff = std::min(std::max(r, 0), n - 1);
  std::vector<double> mags(u.size());
  for (int i = 0; i < n; ++i) mags[i] = std::fabs(u(i));
  std::nth_element(mags.begin(), mags.begin() + r_eff, mags.end(),
                   std::greater<double>());
  return std::min(eps_prev, mags[r_eff] / n);
}

IrlsReport irls_solve(const RowMatrixXd& C, const Eigen::VectorXd& b,
                      IrlsMode mode, const IrlsConfig& config) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  if (n < m) throw std::invalid_argument("irls_solve: need at least m columns");
  if (b.size() != m) throw std::invalid_argument("irls_solve: rhs length mismatch");
  if (mode == IrlsMode::l21 && n % 3 != 0)
    throw std::invalid_argument("irls_solve: l21 mode needs 3-entry stages");
  if (config.jmax < 1 || !(config.eps_bar > 0.0) || !(config.tau >= 0.0))
    throw std::invalid_argument("irls_solve: invalid config");

  const auto& ops = kernels::active();

  // Seed weights: unit, or the squared column norms. The latter makes the
  // first step the min-norm solution in column-equilibrated variables, which
  // is the only iteration where the mixed units of C can hurt; later weights
  // always come from the physical iterate, so the objective is untouched.
  Eigen::VectorXd inv_w(n);
  if (config.scaling == ScalingMode::normalized) {
    for (int l = 0; l < n; ++l) {
      const double d2 = C.col(l).squaredNorm();
      inv_w(l) = 1.0 / std::max(d2, 1e-300);
    }
  } else {
    inv_w.setOnes();
  }

  IrlsReport rep;
  double eps = config.eps0;
  Eigen::VectorXd u, u_prev;
  for (int j = 1; j <= config.jmax; ++j) {
    // Tikhonov shift is relative to the current Gramian scale.
    const Eigen::MatrixXd G = gramian_from_inv(C, inv_w.data());
    const double tau_abs = config.tau * G.trace() / m;
    u = min_norm_step(C, inv_w.data(), G, b, tau_abs);
    rep.iterations = j;

    if (j >= 2) {
      double before = 0.0, after = 0.0;
      for (int l = 0; l < n; ++l) {
        before += u_prev(l) * u_prev(l) / inv_w(l);
        after += u(l) * u(l) / inv_w(l);
      }
      rep.surrogate.push_back({before, after});
    }

    // The schedule only tightens. The floor keeps eps representable next to
    // the iterate (so the weight update stays positive) and scales with u, so
    // the map b -> u stays exactly positively homogeneous.
    const double umax = u.cwiseAbs().maxCoeff();
    const double eps_floor = 5e-15 * umax;
    eps = std::min(
        eps, std::max(eps_update(eps, u, config.eps_rule, config.r), eps_floor));
    rep.eps_history.push_back(eps);

    // Terminate on the iterate, not on the schedule: eps can undershoot
    // eps_bar through near-zero entries while slowly-separating stages are
    // still smeared. A zero iterate (b = 0) is exactly optimal and must exit
    // before the weight update zeroes the weights.
    const bool settled =
        umax == 0.0 ||
        (j >= 2 && ops.max_abs_diff(u.data(), u_prev.data(), n) <= config.tol_u);
    if (settled) {
      if (eps <= config.eps_bar) {
        rep.status = IrlsStatus::converged;
        break;
      }
      if (eps <= eps_floor) {
        rep.status = IrlsStatus::stalled;
        break;
      }
      // Self-consistent (u, eps) fixed point above eps_bar: the weights have
      // settled around a smeared iterate. Force the schedule down and go on.
      eps = std::max(0.5 * eps, eps_floor);
    }
    update_inv_weights(u, eps, mode, config.weight_rule, inv_w);
    u_prev = u;
    if (j == config.jmax) {
      if (eps <= config.eps_bar) {
        // The smoothing target was reached; the budget ran out polishing the
        // iterate past that point (support exchanges with tiny cost gaps can
        // take arbitrarily long to finish). Report the schedule's verdict.
        rep.status = IrlsStatus::converged;
      } else {
        // Out of budget above the target: distinguish a stagnated schedule
        // from one still moving.
        const auto& h = rep.eps_history;
        const bool stagnant =
            h.size() >= 2 && h.back() >= 0.999 * h[h.size() - 2];
        rep.status =
            stagnant ? IrlsStatus::eps_not_reached : IrlsStatus::max_iterations;
      }
    }
  }

  rep.u_star = ControlSchedule(u);
  rep.norm_l1 = ops.sum_abs(u.data(), n);
  rep.norm_l21 = block_l21_norm(u);
  rep.residual = relative_residual(C, u, b);
  return rep;
}

IrlsReport irls_l1(const StackedSystem& stacked, const IrlsConfig& config) {
  return irls_solve(stacked.C_N, stacked.b, IrlsMode::l1, config);
}

IrlsReport irls_l21(const StackedSystem& stacked, const IrlsConfig& config) {
  return irls_solve(stacked.C_N, stacked.b, IrlsMode::l21, config);
}

}  // namespace rendezvous
