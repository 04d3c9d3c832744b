#include "rendezvous/orbit.hpp"

#include <cmath>

namespace rendezvous {
namespace {

// Adaptive Simpson on [a, b] to absolute tolerance tol. The integrand
// rho(tau)^-2 is smooth and periodic, so recursion depth stays shallow;
// the cap only guards against pathological tolerances.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  // Seed panels no wider than ~0.5 rad so long spans start well resolved.
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double pa = a + i * w;
    const double pb = (i + 1 == panels) ? b : pa + w;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa), fm = f(pm), fb = f(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / panels, 48);
  }
  return sign * total;
}

}  // namespace

OrbitParams OrbitParams::from_elements(double a_m, double e, double mu) {
  if (!(a_m > 0.0)) throw std::invalid_argument("orbit: semi-major axis must be positive");
  if (!(mu > 0.0)) throw std::invalid_argument("orbit: mu must be positive");
  if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("orbit: eccentricity must be in [0,1)");
  OrbitParams o;
  o.a = a_m;
  o.e = e;
  o.mu = mu;
  o.p = a_m * (1.0 - e * e);
  o.h = std::sqrt(mu * o.p);
  o.n = std::sqrt(mu / (a_m * a_m * a_m));
  o.gamma = mu / std::pow(o.h, 1.5);
  return o;
}

bool OrbitParams::scaling_marginal() const { return e >= 1.0 / std::sqrt(2.0); }

AnomalyPoint eval_anomaly(const OrbitParams& params, double nu, double nu0) {
  const double e = params.e;
  AnomalyPoint ap;
  ap.nu = nu;
  ap.rho = 1.0 + e * std::cos(nu);
  ap.rho_prime = -e * std::sin(nu);
  ap.s = ap.rho * std::sin(nu);
  ap.c = ap.rho * std::cos(nu);
  ap.s_prime = std::cos(nu) + e * std::cos(2.0 * nu);
  ap.c_prime = -(std::sin(nu) + e * std::sin(2.0 * nu));
  const double one_m_e2 = 1.0 - e * e;
  ap.omega = params.n * ap.rho * ap.rho / std::pow(one_m_e2, 1.5);
  ap.J = adaptive_simpson(
      [e](double tau) {
        const double r = 1.0 + e * std::cos(tau);
        return 1.0 / (r * r);
      },
      nu0, nu, 1e-12);
  return ap;
}

std::pair<Matrix6d, Matrix63d> continuous_matrices(const OrbitParams& params,
                                                   double nu) {
  const double rho = 1.0 + params.e * std::cos(nu);
  Matrix6d Ac = Matrix6d::Zero();
  Ac(0, 3) = 1.0;
  Ac(1, 4) = 1.0;
  Ac(2, 5) = 1.0;
  Ac(3, 5) = 2.0;
  Ac(4, 1) = -1.0;
  Ac(5, 2) = 3.0 / rho;
  Ac(5, 3) = -2.0;

  const double g3 = params.gamma * params.gamma * params.gamma;
  const double scale = 1.0 / (g3 * rho * rho * rho * rho);
  Matrix63d Bc = Matrix63d::Zero();
  Bc.block<3, 3>(3, 0) = scale * Eigen::Matrix3d::Identity();
  return {Ac, Bc};
}

CoordinateMap l_matrix(const OrbitParams& params, double nu) {
  const AnomalyPoint ap = eval_anomaly(params, nu, nu);
  if (!(ap.rho > 0.0)) throw std::domain_error("l_matrix: rho <= 0");
  CoordinateMap m;
  m.L = Matrix6d::Zero();
  m.Linv = Matrix6d::Zero();
  const double g = ap.rho / ap.omega;
  for (int i = 0; i < 3; ++i) {
    m.L(i, i) = ap.rho;
    m.L(i + 3, i) = ap.rho_prime;
    m.L(i + 3, i + 3) = g;
    m.Linv(i, i) = 1.0 / ap.rho;
    m.Linv(i + 3, i) = -ap.rho_prime * ap.omega / (ap.rho * ap.rho);
    m.Linv(i + 3, i + 3) = ap.omega / ap.rho;
  }
  return m;
}

StateVector to_tilde(const OrbitParams& params, double nu, const StateVector& x) {
  if (x.frame == Frame::tilde) return x;
  return {l_matrix(params, nu).L * x.v, Frame::tilde};
}

StateVector to_physical(const OrbitParams& params, double nu, const StateVector& x) {
  if (x.frame == Frame::physical) return x;
  return {l_matrix(params, nu).Linv * x.v, Frame::physical};
}

namespace {

// Fundamental matrix of the scaled dynamics evaluated at one anomaly point.
Matrix6d phi_nu(double e, const AnomalyPoint& a) {
  const double r = a.rho, s = a.s, c = a.c, sp = a.s_prime, cp = a.c_prime,
               J = a.J;
  Matrix6d P = Matrix6d::Zero();
  P(0, 0) = 1.0;
  P(0, 2) = -c * (1.0 + 1.0 / r);
  P(0, 3) = s * (1.0 + 1.0 / r);
  P(0, 5) = 3.0 * r * r * J;
  P(1, 1) = c / r;
  P(1, 4) = s / r;
  P(2, 2) = s;
  P(2, 3) = c;
  P(2, 5) = 2.0 - 3.0 * e * s * J;
  P(3, 2) = 2.0 * s;
  P(3, 3) = 2.0 * c - e;
  P(3, 5) = 3.0 * (1.0 - 2.0 * e * s * J);
  P(4, 1) = -s / r;
  P(4, 4) = c / r;
  P(5, 2) = sp;
  P(5, 3) = cp;
  P(5, 5) = -3.0 * e * (sp * J + s / (r * r));
  return P;
}

// Inverse of the fundamental matrix at the departure anomaly (J = 0 there).
// The out-of-plane block is the transpose of phi_nu's rotation; the printed
// form that repeats the forward rotation fails the identity check at nu0.
Matrix6d phi_nu0_inv(double e, const AnomalyPoint& a) {
  const double r = a.rho, s = a.s, c = a.c;
  const double q = 1.0 - e * e;
  Matrix6d P = Matrix6d::Zero();
  P(0, 0) = q;
  P(0, 2) = 3.0 * e * (s / r) * (1.0 + 1.0 / r);
  P(0, 3) = -e * s * (1.0 + 1.0 / r);
  P(0, 5) = -e * c + 2.0;
  P(1, 1) = c * q / r;
  P(1, 4) = -s * q / r;
  P(2, 2) = -3.0 * (s / r) * (1.0 + e * e / r);
  P(2, 3) = s * (1.0 + 1.0 / r);
  P(2, 5) = c - 2.0 * e;
  P(3, 2) = -3.0 * (c / r + e);
  P(3, 3) = c * (1.0 + 1.0 / r) + e;
  P(3, 5) = -s;
  P(4, 1) = s * q / r;
  P(4, 4) = c * q / r;
  P(5, 2) = 3.0 * r + e * e - 1.0;
  P(5, 3) = -r * r;
  P(5, 5) = e * s;
  return P / q;
}

}  // namespace

Matrix6d stm(const OrbitParams& params, double nu0, double nu) {
  const AnomalyPoint at_nu = eval_anomaly(params, nu, nu0);
  const AnomalyPoint at_nu0 = eval_anomaly(params, nu0, nu0);
  return phi_nu(params.e, at_nu) * phi_nu0_inv(params.e, at_nu0);
}

}  // namespace rendezvous
