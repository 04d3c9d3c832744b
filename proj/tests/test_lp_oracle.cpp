#include <doctest.h>

#include <rendezvous/irls.hpp>
#include <rendezvous/lp_oracle.hpp>

#include <oracles.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace rendezvous;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd C(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) C(i, j) = g(rng);
  return C;
}

// Right-hand side reachable by construction: b = C U0 for a random U0.
Eigen::VectorXd feasible_rhs(std::mt19937_64& rng, const Eigen::MatrixXd& C) {
  std::normal_distribution<double> g;
  Eigen::VectorXd u0(C.cols());
  for (int i = 0; i < u0.size(); ++i) u0(i) = g(rng);
  return C * u0;
}

}  // namespace

TEST_SUITE("lp_oracle") {

TEST_CASE("identity system returns the right-hand side itself") {
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(3);
  b << 1.0, -2.0, 3.0;
  const LpSolution sol = solve_l1_lp(C, b);
  CHECK(sol.status == LpStatus::optimal);
  CHECK((sol.U - b).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(sol.objective == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("single-row system picks the cheapest column") {
  Eigen::MatrixXd C(1, 2);
  C << 1.0, 2.0;
  Eigen::VectorXd b(1);
  b << 2.0;
  const LpSolution sol = solve_l1_lp(C, b);
  CHECK(sol.status == LpStatus::optimal);
  CHECK(sol.U(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.U(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-12));

  b << 0.0;
  const LpSolution zero = solve_l1_lp(C, b);
  CHECK(zero.status == LpStatus::optimal);
  CHECK(zero.U.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.objective == 0.0);
}

TEST_CASE("solutions satisfy the constraints on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> stages(3, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 * stages(rng);
    const Eigen::MatrixXd C = random_matrix(rng, 6, n);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const LpSolution sol = solve_l1_lp(C, b);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK((C * sol.U - b).norm() <= 1e-9 * (1.0 + b.norm()));
    CHECK(sol.objective == doctest::Approx(sol.U.cwiseAbs().sum()).epsilon(1e-12));
    CHECK(sol.pivot_count > 0);
  }
}

TEST_CASE("objective is invariant under column permutation") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 12;
    const Eigen::MatrixXd C = random_matrix(rng, 4, n);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const double ref = solve_l1_lp(C, b).objective;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd Cp(4, n);
    for (int j = 0; j < n; ++j) Cp.col(j) = C.col(perm[j]);
    const double shuffled = solve_l1_lp(Cp, b).objective;
    CHECK(shuffled == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("objective matches exhaustive basis enumeration") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd C = random_matrix(rng, 6, 12);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const double lp = solve_l1_lp(C, b).objective;
    const double brute = oracles::enumerate_l1(C, b);
    CHECK(lp == doctest::Approx(brute).epsilon(1e-9));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd C = random_matrix(rng, 3, 9);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const double lp = solve_l1_lp(C, b).objective;
    const double brute = oracles::enumerate_l1(C, b);
    CHECK(lp == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("inconsistent duplicated row is reported infeasible") {
  Eigen::MatrixXd C(2, 3);
  C << 1.0, 2.0, -1.0,
       1.0, 2.0, -1.0;
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  const LpSolution sol = solve_l1_lp(C, b);
  CHECK(sol.status == LpStatus::infeasible);
}

TEST_CASE("l1 certificate accepts LP optima and rejects other points") {
  Eigen::MatrixXd C(1, 2);
  C << 1.0, 2.0;
  Eigen::VectorXd b(1);
  b << 2.0;
  Eigen::VectorXd star(2), dense(2), shifted(2);
  star << 0.0, 1.0;      // the vertex the LP returns
  dense << 0.4, 0.8;     // feasible min-2-norm point, objective 1.2
  shifted << 0.2, 0.9;   // feasible, objective 1.1
  CHECK(certificate_l1(C, b, star).accepted);
  CHECK_FALSE(certificate_l1(C, b, dense).accepted);
  CHECK_FALSE(certificate_l1(C, b, shifted).accepted);

  // Infeasible candidates fail before any dual fit.
  Eigen::VectorXd off(2);
  off << 0.0, 1.5;
  const CertificateResult r = certificate_l1(C, b, off);
  CHECK_FALSE(r.accepted);
  CHECK(r.max_violation > 0.0);
}

TEST_CASE("l1 certificate on random LP solutions and null-space shifts") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 * (4 + trial % 5);
    const Eigen::MatrixXd C = random_matrix(rng, 6, n);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const LpSolution sol = solve_l1_lp(C, b);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(certificate_l1(C, b, sol.U).accepted);

    // A null-space shift keeps feasibility but leaves the optimal vertex.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(n - 6);
    Eigen::VectorXd mix(n - 6);
    for (int j = 0; j < n - 6; ++j) mix(j) = gauss(rng);
    Eigen::VectorXd z = null_basis * mix;
    z *= 0.5 * sol.U.cwiseAbs().maxCoeff() / z.lpNorm<Eigen::Infinity>();
    CHECK_FALSE(certificate_l1(C, b, sol.U + z).accepted);
  }
}

TEST_CASE("block certificate: single active block construction") {
  // Block 1 reaches b at cost sqrt(3); block 2 needs twice the magnitude.
  Eigen::MatrixXd C(3, 6);
  C << Eigen::Matrix3d::Identity(), 0.5 * Eigen::Matrix3d::Identity();
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);

  Eigen::VectorXd star = Eigen::VectorXd::Zero(6);
  star.head<3>() = b;
  CHECK(certificate_l21(C, b, star).accepted);

  // Min-2-norm point spreads over both blocks; the dual conditions demand
  // lambda = b/sqrt(3) from block 1 and 2 b/sqrt(3) from block 2 at once.
  Eigen::VectorXd dense(6);
  dense.head<3>() = 0.8 * b;
  dense.tail<3>() = 0.4 * b;
  CHECK((C * dense - b).norm() < 1e-12);
  CHECK_FALSE(certificate_l21(C, b, dense).accepted);

  // Reaching b through the expensive block alone also fails the gradient
  // bound on the inactive cheap block.
  Eigen::VectorXd costly = Eigen::VectorXd::Zero(6);
  costly.tail<3>() = 2.0 * b;
  CHECK((C * costly - b).norm() < 1e-12);
  CHECK_FALSE(certificate_l21(C, b, costly).accepted);
}

TEST_CASE("block certificate accepts converged l2/l1 iterates") {
  std::mt19937_64 rng(314);
  IrlsConfig cfg;
  cfg.jmax = 100000;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 * (5 + trial);
    const Eigen::MatrixXd C = random_matrix(rng, 6, n);
    const Eigen::VectorXd b = feasible_rhs(rng, C);
    const IrlsReport rep = irls_solve(C, b, IrlsMode::l21, cfg);
    REQUIRE(is_success(rep.status));
    const CertificateResult cert = certificate_l21(C, b, rep.u_star.stacked, 1e-3);
    CHECK(cert.accepted);
  }
}

}  // TEST_SUITE
