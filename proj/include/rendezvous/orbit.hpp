#pragma once

// Target-orbit kinematics for linearized relative motion with true anomaly
// as the independent variable: anomaly-dependent scalars, the continuous
// system matrices, the physical<->scaled coordinate map L, and the closed
// form state transition matrix of the scaled dynamics.

#include <Eigen/Dense>

#include <stdexcept>

namespace rendezvous {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;

// Constants of the target orbit. Derived fields are fixed on construction.
struct OrbitParams {
  double a = 0.0;      // semi-major axis [m]
  double e = 0.0;      // eccentricity
  double mu = 0.0;     // gravitational parameter [m^3/s^2]
  double p = 0.0;      // semi-latus rectum a(1-e^2) [m]
  double h = 0.0;      // angular momentum sqrt(mu*p) [m^2/s]
  double n = 0.0;      // mean motion sqrt(mu/a^3) [rad/s]
  double gamma = 0.0;  // mu/h^(3/2)

  // Throws std::invalid_argument unless a > 0, mu > 0, 0 <= e < 1.
  static OrbitParams from_elements(double a_m, double e, double mu);

  // The scaled-coordinate transformation degrades as e -> 1; flag raised at
  // e >= 1/sqrt(2) so callers can emit a diagnostic. Not an error: the STM
  // below is well defined for all e < 1.
  bool scaling_marginal() const;
};

// Every anomaly-dependent scalar needed by the matrices, evaluated once.
struct AnomalyPoint {
  double nu = 0.0;        // true anomaly [rad], unwrapped
  double rho = 0.0;       // 1 + e*cos(nu)
  double rho_prime = 0.0; // -e*sin(nu)
  double s = 0.0;         // rho*sin(nu)
  double c = 0.0;         // rho*cos(nu)
  double s_prime = 0.0;   // cos(nu) + e*cos(2 nu)
  double c_prime = 0.0;   // -(sin(nu) + e*sin(2 nu))
  double omega = 0.0;     // anomaly rate dnu/dt [rad/s]
  double J = 0.0;         // integral of rho(tau)^-2 from nu0 to nu [rad]
};

enum class Frame { physical, tilde };

// Six relative-motion coordinates plus the frame they are expressed in:
// physical [x y z xdot ydot zdot] in meters and m/s, or scaled
// [xt yt zt xt' yt' zt'] in meters and meters/radian.
struct StateVector {
  Vector6d v = Vector6d::Zero();
  Frame frame = Frame::physical;
};

// All anomaly scalars at nu; J uses lower limit nu0 (adaptive quadrature,
// absolute tolerance 1e-12; negative when nu < nu0).
AnomalyPoint eval_anomaly(const OrbitParams& params, double nu, double nu0);

// Continuous matrices of the scaled dynamics at nu: x' = Ac(nu) x + Bc(nu) u.
// Both are 2*pi-periodic in nu.
std::pair<Matrix6d, Matrix63d> continuous_matrices(const OrbitParams& params,
                                                   double nu);

// Coordinate map and its inverse at nu: x_tilde = L x_physical.
// L has rho on the position diagonal, rho' coupling positions into the
// derivative rows, and rho/omega on the derivative diagonal.
struct CoordinateMap {
  Matrix6d L;
  Matrix6d Linv;
};
CoordinateMap l_matrix(const OrbitParams& params, double nu);

StateVector to_tilde(const OrbitParams& params, double nu, const StateVector& x);
StateVector to_physical(const OrbitParams& params, double nu, const StateVector& x);

// State transition matrix of the homogeneous scaled dynamics from nu0 to nu,
// assembled from the closed-form fundamental matrix and its inverse at nu0.
// stm(params, nu0, nu0) is the identity.
Matrix6d stm(const OrbitParams& params, double nu0, double nu);

}  // namespace rendezvous
