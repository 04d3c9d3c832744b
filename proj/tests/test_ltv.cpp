#include <doctest.h>

#include <rendezvous/ltv.hpp>

#include <oracles.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace rendezvous;

namespace {

const double kMu = 3.986004418e14;

OrbitParams atv() { return OrbitParams::from_elements(6763e3, 0.0052, kMu); }
OrbitParams gto() { return OrbitParams::from_elements(24616e3, 0.73074, kMu); }

DiscreteLTV impulse_system(const OrbitParams& p, const AnomalyGrid& g) {
  DiscretizeOptions opts;
  opts.model = ControlModel::impulse_dv;
  return discretize(p, g, opts);
}

}  // namespace

TEST_SUITE("ltv") {

TEST_CASE("anomaly grid nodes and validation") {
  const AnomalyGrid g(0.0, 8.1831, 50);
  CHECK(g.alpha == doctest::Approx((8.1831 - 0.0) / 50).epsilon(1e-15));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(50) == 8.1831);  // pinned exactly, no accumulated rounding
  CHECK(g.node(7) == doctest::Approx(7 * g.alpha).epsilon(1e-15));
  CHECK_THROWS_AS(AnomalyGrid(1.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(AnomalyGrid(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("circular one-step stage matrix equals the matrix exponential") {
  // e = 0 makes the system matrix constant, so the stage transition is expm.
  const auto circ = OrbitParams::from_elements(7000e3, 0.0, kMu);
  const AnomalyGrid g(0.2, 0.2 + 0.37, 1);
  const auto sys = impulse_system(circ, g);
  const Eigen::MatrixXd ref = oracles::expm(oracles::dynamics_matrix(0.0, 0.0) * g.alpha);
  CHECK((sys.A[0] - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("stage input matrices: quadrature self-check and node doubling") {
  const AnomalyGrid g(0.0, 8.1831, 40);
  DiscretizeOptions five;
  five.model = ControlModel::accel_zoh;
  five.gl_nodes = 5;
  five.self_check = false;
  DiscretizeOptions ten = five;
  ten.gl_nodes = 10;
  const auto s5 = discretize(atv(), g, five);
  const auto s10 = discretize(atv(), g, ten);
  for (int k = 0; k < g.N; ++k) {
    const double scale = s10.B[k].cwiseAbs().maxCoeff();
    CHECK((s5.B[k] - s10.B[k]).cwiseAbs().maxCoeff() < 1e-8 * scale);
  }

  DiscretizeOptions checked;
  checked.model = ControlModel::accel_zoh;
  checked.self_check = true;
  CHECK_NOTHROW(discretize(gto(), AnomalyGrid(0.1 * M_PI, 5.2, 40), checked));
}

TEST_CASE("impulse-model stage input is the velocity response at the node") {
  const AnomalyGrid g(0.0, 8.1831, 10);
  const auto sys = impulse_system(atv(), g);
  for (int k = 0; k < g.N; ++k) {
    const auto pt = eval_anomaly(atv(), g.node(k), g.nu0);
    Matrix63d jump = Matrix63d::Zero();
    jump.bottomRows<3>() = (pt.rho / pt.omega) * Eigen::Matrix3d::Identity();
    const Matrix63d expect = sys.A[k] * jump;
    CHECK((sys.B[k] - expect).cwiseAbs().maxCoeff() < 1e-12 * expect.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("transfer-orbit build: all stage transitions invertible") {
  const auto sys = impulse_system(gto(), AnomalyGrid(0.1 * M_PI, 5.2, 600));
  REQUIRE(static_cast<int>(sys.A.size()) == 600);
  REQUIRE(static_cast<int>(sys.B.size()) == 600);
  for (const auto& A : sys.A) {
    // The continuous system matrix is traceless, so every STM has unit
    // determinant; a healthy build keeps that visible numerically.
    CHECK(std::fabs(std::fabs(A.determinant()) - 1.0) < 1e-9);
  }
}

TEST_CASE("discrete transition products: identity, composition, bad indices") {
  const auto sys = impulse_system(atv(), AnomalyGrid(0.0, 8.1831, 12));
  CHECK((discrete_stm(sys, 3, 3) - Matrix6d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const Matrix6d lhs = discrete_stm(sys, 10, 4);
  const Matrix6d rhs = discrete_stm(sys, 10, 7) * discrete_stm(sys, 7, 4);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(discrete_stm(sys, 2, 5), std::invalid_argument);
  CHECK_THROWS_AS(discrete_stm(sys, 13, 0), std::invalid_argument);
}

TEST_CASE("full product of stage transitions matches the span transition") {
  for (int N : {200, 400, 800}) {
    const auto sys = impulse_system(gto(), AnomalyGrid(0.1 * M_PI, 5.2, N));
    const Matrix6d direct = stm(gto(), 0.1 * M_PI, 5.2);
    const Matrix6d prod = discrete_stm(sys, N, 0);
    CHECK((prod - direct).cwiseAbs().maxCoeff() < 1e-9 * direct.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("stacked system invariants") {
  const auto p = atv();
  const AnomalyGrid g(0.0, 8.1831, 8);
  const auto sys = impulse_system(p, g);

  StateVector zero;
  zero.frame = Frame::tilde;
  CHECK(stack(sys, zero, zero).b.norm() == 0.0);

  StateVector x0 = zero, xf = zero;
  x0.v << 120.0, -40.0, 7.5, 3.0, 0.2, -1.0;
  xf.v << -5.0, 0.0, 1.0, 0.0, 0.0, 0.0;
  const auto st = stack(sys, x0, xf);
  CHECK((st.beta - discrete_stm(sys, g.N, 0) * x0.v).norm() < 1e-12 * st.beta.norm());
  CHECK((st.b - (xf.v - st.beta)).norm() == 0.0);
  for (int k = 0; k < g.N; ++k) {
    const Matrix63d blk = discrete_stm(sys, g.N, k + 1) * sys.B[k];
    CHECK((st.C_N.middleCols<3>(3 * k) - blk).cwiseAbs().maxCoeff() <
          1e-12 * blk.cwiseAbs().maxCoeff());
  }

  const auto one = impulse_system(p, AnomalyGrid(0.0, 1.0, 1));
  const auto st1 = stack(one, zero, zero);
  CHECK((st1.C_N - one.B[0]).cwiseAbs().maxCoeff() == 0.0);

  StateVector phys;  // frame defaults to physical
  CHECK_THROWS_AS(stack(sys, phys, zero), std::invalid_argument);
  CHECK_THROWS_AS(stack(sys, zero, phys), std::invalid_argument);
}

TEST_CASE("propagation: homogeneous, superposition, length check") {
  const auto sys = impulse_system(atv(), AnomalyGrid(0.0, 8.1831, 9));
  StateVector x0;
  x0.frame = Frame::tilde;
  x0.v << 50.0, 10.0, -3.0, 0.5, 0.0, 2.0;

  const auto traj = propagate(sys, x0, ControlSchedule::zero(9));
  REQUIRE(static_cast<int>(traj.size()) == 10);
  CHECK((traj.back().v - discrete_stm(sys, 9, 0) * x0.v).norm() <
        1e-12 * traj.back().v.norm());

  StateVector origin;
  origin.frame = Frame::tilde;
  auto U = ControlSchedule::zero(9);
  U.set_stage(4, Eigen::Vector3d(0.3, -0.1, 0.7));
  const auto kick = propagate(sys, origin, U);
  const Vector6d expect = discrete_stm(sys, 9, 5) * sys.B[4] * U.stage(4);
  CHECK((kick.back().v - expect).norm() < 1e-12 * expect.norm());

  CHECK_THROWS_AS(propagate(sys, x0, ControlSchedule::zero(8)), std::invalid_argument);
}

TEST_CASE("terminal state equals the stacked affine map on random inputs") {
  const auto sys = impulse_system(gto(), AnomalyGrid(0.1 * M_PI, 5.2, 20));
  StateVector zero;
  zero.frame = Frame::tilde;
  const auto st = stack(sys, zero, zero);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    StateVector x0;
    x0.frame = Frame::tilde;
    ControlSchedule U = ControlSchedule::zero(20);
    for (int i = 0; i < 6; ++i) x0.v(i) = 1e3 * g(rng);
    for (int i = 0; i < U.stacked.size(); ++i) U.stacked(i) = g(rng);
    const Vector6d last = propagate(sys, x0, U).back().v;
    const Vector6d affine = discrete_stm(sys, 20, 0) * x0.v + st.C_N * U.stacked;
    CHECK((last - affine).norm() <= 1e-9 * (1.0 + last.norm()));
  }
}

}  // TEST_SUITE
