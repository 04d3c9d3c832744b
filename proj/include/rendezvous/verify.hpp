#pragma once

// Randomized oracle-equivalence suite: IRLS-l1 against the simplex optimum,
// l1 certificates on LP outputs and on deliberately perturbed points, and
// l2/l1 certificates on the block-IRLS output.

#include <cstdint>
#include <string>
#include <vector>

namespace rendezvous {

struct OracleSuiteConfig {
  int instances = 200;
  std::uint64_t seed = 42;
  int min_stages = 3;   // stacked width 3*stages
  int max_stages = 10;
  double ratio_bound = 1e-3;    // irls <= (1+bound)*lp
  double undershoot_bound = 1e-9;  // irls >= lp - bound
  double l21_tol = 1e-3;        // certificate tolerance for block solutions
  double l21_accept_fraction = 0.95;
};

struct OracleSuiteResult {
  int instances = 0;
  int l1_within_upper = 0;      // irls norm under the ratio bound
  int l1_above_lower = 0;       // irls norm not below lp - undershoot
  int cert_lp_accepted = 0;     // certificate_l1 accepts the LP solution
  int cert_perturbed_rejected = 0;  // null-space-shifted points rejected
  int l21_cert_accepted = 0;    // certificate_l21 accepts block IRLS output
  double worst_ratio = 0.0;     // max irls/lp over the batch
  double worst_undershoot = 0.0;  // max lp - irls
  double elapsed_irls_lp_s = 0.0;
  std::vector<std::string> failures;

  bool all_passed(const OracleSuiteConfig& cfg) const;
};

OracleSuiteResult run_oracle_suite(const OracleSuiteConfig& cfg);

}  // namespace rendezvous
