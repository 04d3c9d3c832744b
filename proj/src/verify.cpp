#include "rendezvous/verify.hpp"

#include "rendezvous/irls.hpp"
#include "rendezvous/lp_oracle.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace rendezvous {

bool OracleSuiteResult::all_passed(const OracleSuiteConfig& cfg) const {
  return l1_within_upper == instances && l1_above_lower == instances &&
         cert_lp_accepted == instances && cert_perturbed_rejected == instances &&
         l21_cert_accepted >=
             static_cast<int>(std::ceil(cfg.l21_accept_fraction * instances));
}

OracleSuiteResult run_oracle_suite(const OracleSuiteConfig& cfg) {
  OracleSuiteResult out;
  out.instances = cfg.instances;

  using clock = std::chrono::steady_clock;
  double irls_lp_seconds = 0.0;

  for (int inst = 0; inst < cfg.instances; ++inst) {
    std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * (inst + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> stages(cfg.min_stages, cfg.max_stages);

    const int N = stages(rng);
    const int n = 3 * N;
    RowMatrixXd C(6, n);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = gauss(rng);
    Eigen::VectorXd u_feas(n);
    for (int j = 0; j < n; ++j) u_feas(j) = gauss(rng);
    const Eigen::VectorXd b = C * u_feas;

    const auto t0 = clock::now();
    // Generous iteration budget: each step is a 6x6 solve, and the ratio
    // bound needs the iteration to finish sparsifying, not merely stabilize.
    IrlsConfig icfg;
    icfg.jmax = 100000;
    const IrlsReport rep = irls_solve(C, b, IrlsMode::l1, icfg);
    const LpSolution lp = solve_l1_lp(C, b);
    irls_lp_seconds += std::chrono::duration<double>(clock::now() - t0).count();

    const double ratio = rep.norm_l1 / lp.objective;
    const double undershoot = lp.objective - rep.norm_l1;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    out.worst_undershoot = std::max(out.worst_undershoot, undershoot);
    if (rep.norm_l1 <= (1.0 + cfg.ratio_bound) * lp.objective)
      ++out.l1_within_upper;
    else {
      std::ostringstream os;
      os << "instance " << inst << ": irls " << rep.norm_l1 << " vs lp "
         << lp.objective << " (ratio " << ratio << ")";
      out.failures.push_back(os.str());
    }
    if (undershoot <= cfg.undershoot_bound)
      ++out.l1_above_lower;
    else {
      std::ostringstream os;
      os << "instance " << inst << ": irls undercuts lp by " << undershoot;
      out.failures.push_back(os.str());
    }

    const CertificateResult c_lp = certificate_l1(C, b, lp.U);
    if (c_lp.accepted)
      ++out.cert_lp_accepted;
    else {
      std::ostringstream os;
      os << "instance " << inst << ": certificate rejected LP solution ("
         << c_lp.detail << ", violation " << c_lp.max_violation << ")";
      out.failures.push_back(os.str());
    }

    // Feasible but suboptimal point: shift along the null space of C by half
    // the solution's peak magnitude. That touches most coordinates, so no
    // 6-dimensional dual can match every active sign.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(n - 6);
    Eigen::VectorXd mix(n - 6);
    for (int j = 0; j < n - 6; ++j) mix(j) = gauss(rng);
    Eigen::VectorXd z = null_basis * mix;
    z *= 0.5 * lp.U.cwiseAbs().maxCoeff() / z.lpNorm<Eigen::Infinity>();
    const CertificateResult c_bad = certificate_l1(C, b, lp.U + z);
    if (!c_bad.accepted)
      ++out.cert_perturbed_rejected;
    else {
      std::ostringstream os;
      os << "instance " << inst << ": certificate accepted a suboptimal point";
      out.failures.push_back(os.str());
    }

    const IrlsReport rep21 = irls_solve(C, b, IrlsMode::l21, icfg);
    const CertificateResult c21 =
        certificate_l21(C, b, rep21.u_star.stacked, cfg.l21_tol);
    if (c21.accepted)
      ++out.l21_cert_accepted;
    else {
      std::ostringstream os;
      os << "instance " << inst << ": l21 certificate violation "
         << c21.max_violation << " (" << c21.detail << ")";
      out.failures.push_back(os.str());
    }
  }

  out.elapsed_irls_lp_s = irls_lp_seconds;
  return out;
}

}  // namespace rendezvous
