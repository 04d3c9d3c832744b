#include "rendezvous/kernels.hpp"

#include <cmath>

// Reference backend. Per-element operation sequences deliberately mirror the
// AVX2 lanes (fma, sqrt, sqrt(sqrt)) so elementwise outputs match bitwise.

namespace rendezvous::kernels {
namespace {

void s_inv_weights_l1(const double* u, double eps, double* inv_w, int n) {
  const double e2 = eps * eps;
  for (int l = 0; l < n; ++l) inv_w[l] = std::sqrt(std::fma(u[l], u[l], e2));
}

void s_inv_weights_quarter(const double* u, double eps, double* inv_w, int n) {
  const double e2 = eps * eps;
  for (int l = 0; l < n; ++l)
    inv_w[l] = std::sqrt(std::sqrt(std::fma(u[l], u[l], e2)));
}

double s_wdot(const double* a, const double* b, const double* w, int n) {
  double acc = 0.0;
  for (int l = 0; l < n; ++l) acc = std::fma(a[l] * b[l], w[l], acc);
  return acc;
}

double s_dot(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int l = 0; l < n; ++l) acc = std::fma(a[l], b[l], acc);
  return acc;
}

void s_combine(const double* C, int m, int n, const double* inv_w,
               const double* lam, double* u) {
  for (int l = 0; l < n; ++l) u[l] = 0.0;
  for (int i = 0; i < m; ++i) {
    const double* row = C + static_cast<long>(i) * n;
    const double li = lam[i];
    for (int l = 0; l < n; ++l) u[l] = std::fma(li, row[l], u[l]);
  }
  for (int l = 0; l < n; ++l) u[l] *= inv_w[l];
}

double s_sum_abs(const double* u, int n) {
  double acc = 0.0;
  for (int l = 0; l < n; ++l) acc += std::fabs(u[l]);
  return acc;
}

double s_max_abs(const double* u, int n) {
  double m = 0.0;
  for (int l = 0; l < n; ++l) m = std::fmax(m, std::fabs(u[l]));
  return m;
}

double s_max_abs_diff(const double* a, const double* b, int n) {
  double m = 0.0;
  for (int l = 0; l < n; ++l) m = std::fmax(m, std::fabs(a[l] - b[l]));
  return m;
}

}  // namespace

const Ops scalar_ops = {
    "scalar",       s_inv_weights_l1, s_inv_weights_quarter,
    s_wdot,         s_dot,            s_combine,
    s_sum_abs,      s_max_abs,        s_max_abs_diff,
};

}  // namespace rendezvous::kernels
