// Command-line front end: `rendezvous run` executes a mission and writes
// artifacts; `rendezvous verify` runs the randomized oracle-equivalence
// suite. Exit codes: 0 success, 1 usage or config error, 2 solver or
// verification failure.

#include <CLI11.hpp>

#include "rendezvous/lp_oracle.hpp"
#include "rendezvous/mission.hpp"
#include "rendezvous/verify.hpp"

#include <cstdio>
#include <string>

namespace {

using namespace rendezvous;

int cmd_run(const std::string& mission, const std::string& mode, int N, int jmax,
            double eps_bar, double tau, const std::string& weight_rule,
            const std::string& eps_rule, const std::string& control_model,
            bool run_lp_check, std::string out_dir) {
  MissionSpec spec = load_mission(mission);
  if (!mode.empty()) spec.solver_mode = mode == "l1" ? SolverMode::l1 : SolverMode::l21;
  if (N > 0) spec.N = N;
  if (jmax > 0) spec.irls.jmax = jmax;
  if (eps_bar > 0) spec.irls.eps_bar = eps_bar;
  if (tau >= 0) spec.irls.tau = tau;
  if (!weight_rule.empty())
    spec.irls.weight_rule =
        weight_rule == "paper" ? WeightRule::per_entry : WeightRule::block_norm;
  if (!eps_rule.empty())
    spec.irls.eps_rule = eps_rule == "paper" ? EpsRule::max_entry : EpsRule::sorted_r;
  if (!control_model.empty())
    spec.control_model =
        control_model == "impulse" ? ControlModel::impulse_dv : ControlModel::accel_zoh;
  if (out_dir.empty())
    out_dir = spec.name + "-" + to_string(spec.solver_mode) + "-N" +
              std::to_string(spec.N);

  RunArtifacts art = run_mission(spec);
  for (const std::string& w : art.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  std::printf("mission %s  mode %s  N %d\n", spec.name.c_str(),
              to_string(spec.solver_mode), spec.N);
  std::printf("status %s  iterations %d  eps_final %.6g\n",
              to_string(art.report.status), art.report.iterations,
              art.report.eps_history.empty() ? spec.irls.eps0
                                             : art.report.eps_history.back());
  std::printf("norm_l1 %.10g  norm_l21 %.10g  residual %.3e\n",
              art.report.norm_l1, art.report.norm_l21, art.report.residual);
  std::printf("impulses above threshold: %zu\n", art.impulses.entries.size());
  for (const ImpulseEntry& e : art.impulses.entries)
    std::printf("  k %4d  nu %10.6f  dv [%12.6g %12.6g %12.6g]  mag %.6g\n", e.k,
                e.nu, e.dv(0), e.dv(1), e.dv(2), e.mag);

  if (run_lp_check) {
    const LpSolution lp = solve_l1_lp(art.stacked.C_N, art.stacked.b);
    std::printf("lp objective %.10g  pivots %d\n", lp.objective, lp.pivot_count);
    if (lp.status == LpStatus::optimal && lp.objective > 0)
      std::printf("irls/lp ratio %.9f\n", art.report.norm_l1 / lp.objective);
    const CertificateResult cert =
        spec.solver_mode == SolverMode::l1
            ? certificate_l1(art.stacked.C_N, art.stacked.b,
                             art.report.u_star.stacked)
            : certificate_l21(art.stacked.C_N, art.stacked.b,
                              art.report.u_star.stacked);
    std::printf("certificate %s  max violation %.3e%s%s\n",
                cert.accepted ? "accepted" : "rejected", cert.max_violation,
                cert.detail.empty() ? "" : "  ", cert.detail.c_str());
  }

  write_artifacts(art, out_dir);
  std::printf("artifacts written to %s/\n", out_dir.c_str());
  return is_success(art.report.status) ? 0 : 2;
}

int cmd_verify(int instances, std::uint64_t seed) {
  OracleSuiteConfig cfg;
  cfg.instances = instances;
  cfg.seed = seed;
  const OracleSuiteResult res = run_oracle_suite(cfg);
  std::printf("instances              %d\n", res.instances);
  std::printf("l1 within upper bound  %d\n", res.l1_within_upper);
  std::printf("l1 above lower bound   %d\n", res.l1_above_lower);
  std::printf("lp certs accepted      %d\n", res.cert_lp_accepted);
  std::printf("perturbed rejected     %d\n", res.cert_perturbed_rejected);
  std::printf("l21 certs accepted     %d\n", res.l21_cert_accepted);
  std::printf("worst irls/lp ratio    %.12f\n", res.worst_ratio);
  std::printf("worst undershoot       %.3e\n", res.worst_undershoot);
  std::printf("irls+lp time           %.2f s\n", res.elapsed_irls_lp_s);
  for (const std::string& f : res.failures)
    std::fprintf(stderr, "failure: %s\n", f.c_str());
  const bool ok = res.all_passed(cfg);
  std::printf("%s\n", ok ? "all checks passed" : "CHECKS FAILED");
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-fuel rendezvous planner for elliptical target orbits"};
  app.require_subcommand(1);

  std::string mission, mode, weight_rule, eps_rule, control_model, out_dir;
  int N = 0, jmax = 0;
  double eps_bar = 0.0, tau = -1.0;
  bool lp_check = false;

  CLI::App* run = app.add_subcommand("run", "solve a mission and write artifacts");
  run->add_option("--mission", mission, "preset name (gto, atv) or JSON config path")
      ->required();
  run->add_option("--mode", mode, "norm to minimize")
      ->check(CLI::IsMember({"l1", "l21"}));
  run->add_option("--N", N, "number of control stages")->check(CLI::PositiveNumber);
  run->add_option("--jmax", jmax, "IRLS iteration cap")->check(CLI::PositiveNumber);
  run->add_option("--eps-bar", eps_bar, "IRLS smoothing target")
      ->check(CLI::PositiveNumber);
  run->add_option("--tau", tau, "relative Tikhonov shift")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--weight-rule", weight_rule, "l2/l1 weight rule")
      ->check(CLI::IsMember({"paper", "block"}));
  run->add_option("--eps-rule", eps_rule, "smoothing schedule")
      ->check(CLI::IsMember({"paper", "sorted"}));
  run->add_option("--control-model", control_model, "stage input model")
      ->check(CLI::IsMember({"impulse", "zoh"}));
  run->add_flag("--verify", lp_check,
                "cross-check against the simplex oracle and KKT certificate");
  run->add_option("--out", out_dir, "output directory (default <mission>-<mode>-N<N>)");

  int instances = 200;
  std::uint64_t seed = 42;
  CLI::App* verify = app.add_subcommand("verify", "randomized oracle-equivalence suite");
  verify->add_option("--instances", instances, "number of random systems")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed())
      return cmd_run(mission, mode, N, jmax, eps_bar, tau, weight_rule, eps_rule,
                     control_model, lp_check, out_dir);
    return cmd_verify(instances, seed);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
