#include "rendezvous/ltv.hpp"

#include <cmath>
#include <stdexcept>

namespace rendezvous {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence; machine-accurate for the orders used here.
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[order - 1 - i] = t;
    w[i] = w[order - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Stage integral of Phi(nu_next, sigma) Bc(sigma) over [nu_k, nu_next].
Matrix63d stage_input_integral(const OrbitParams& params, double nu_k,
                               double nu_next, int order) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  const double half = 0.5 * (nu_next - nu_k);
  const double mid = 0.5 * (nu_next + nu_k);
  Matrix63d acc = Matrix63d::Zero();
  for (int q = 0; q < order; ++q) {
    const double sigma = mid + half * x[q];
    const auto [Ac, Bc] = continuous_matrices(params, sigma);
    (void)Ac;
    acc += w[q] * (stm(params, sigma, nu_next) * Bc);
  }
  return half * acc;
}

}  // namespace

AnomalyGrid::AnomalyGrid(double nu0_, double nuf_, int N_)
    : nu0(nu0_), nuf(nuf_), N(N_) {
  if (!(nuf > nu0)) throw std::invalid_argument("grid: nuf must exceed nu0");
  if (N < 1) throw std::invalid_argument("grid: N must be >= 1");
  alpha = (nuf - nu0) / N;
}

DiscreteLTV discretize(const OrbitParams& params, const AnomalyGrid& grid,
                       const DiscretizeOptions& opts) {
  DiscreteLTV sys;
  sys.grid = grid;
  sys.A.resize(grid.N);
  sys.B.resize(grid.N);
  for (int k = 0; k < grid.N; ++k) {
    const double nu_k = grid.node(k);
    const double nu_next = grid.node(k + 1);
    sys.A[k] = stm(params, nu_k, nu_next);
    if (opts.model == ControlModel::impulse_dv) {
      const AnomalyPoint ap = eval_anomaly(params, nu_k, nu_k);
      Matrix63d Bimp = Matrix63d::Zero();
      Bimp.block<3, 3>(3, 0) = (ap.rho / ap.omega) * Eigen::Matrix3d::Identity();
      sys.B[k] = sys.A[k] * Bimp;
    } else {
      sys.B[k] = stage_input_integral(params, nu_k, nu_next, opts.gl_nodes);
      if (opts.self_check) {
        const Matrix63d fine =
            stage_input_integral(params, nu_k, nu_next, 2 * opts.gl_nodes);
        const double scale = std::max(fine.cwiseAbs().maxCoeff(), 1.0e-300);
        if (((sys.B[k] - fine).cwiseAbs().maxCoeff() / scale) > 1e-8)
          throw std::runtime_error(
              "discretize: stage input quadrature did not converge at stage " +
              std::to_string(k));
      }
    }
  }
  return sys;
}

Matrix6d discrete_stm(const DiscreteLTV& sys, int k, int m) {
  if (m > k || m < 0 || k > sys.grid.N)
    throw std::invalid_argument("discrete_stm: need 0 <= m <= k <= N");
  Matrix6d P = Matrix6d::Identity();
  for (int i = m; i < k; ++i) P = sys.A[i] * P;
  return P;
}

StackedSystem stack(const DiscreteLTV& sys, const StateVector& x0,
                    const StateVector& xf) {
  if (x0.frame != Frame::tilde || xf.frame != Frame::tilde)
    throw std::invalid_argument("stack: states must be in the scaled frame");
  const int N = sys.grid.N;
  StackedSystem st;
  st.grid = sys.grid;
  st.x0 = x0;
  st.xf = xf;
  st.C_N.resize(6, 3 * N);
  // Descending sweep: P = Phi_d(N, k+1), extended one factor per stage.
  Matrix6d P = Matrix6d::Identity();
  for (int k = N - 1; k >= 0; --k) {
    st.C_N.block<6, 3>(0, 3 * k) = P * sys.B[k];
    P = P * sys.A[k];
  }
  st.beta = P * x0.v;
  st.b = xf.v - st.beta;
  return st;
}

std::vector<StateVector> propagate(const DiscreteLTV& sys, const StateVector& x0,
                                   const ControlSchedule& U) {
  if (x0.frame != Frame::tilde)
    throw std::invalid_argument("propagate: state must be in the scaled frame");
  if (U.stacked.size() != 3 * static_cast<long>(sys.grid.N))
    throw std::invalid_argument("propagate: control schedule has wrong length");
  std::vector<StateVector> traj(sys.grid.N + 1);
  traj[0] = x0;
  for (int k = 0; k < sys.grid.N; ++k)
    traj[k + 1] = {sys.A[k] * traj[k].v + sys.B[k] * U.stage(k), Frame::tilde};
  return traj;
}

}  // namespace rendezvous
