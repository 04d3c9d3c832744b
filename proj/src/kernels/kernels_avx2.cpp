#include "rendezvous/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

// AVX2/FMA backend. This translation unit is compiled with -mavx2 -mfma and
// must only be entered through the dispatch table after a CPUID check.
// Tails (n % 4) fall back to the same fma/sqrt scalar sequences as the
// reference backend, keeping elementwise kernels bitwise-identical.

namespace rendezvous::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

void v_inv_weights_l1(const double* u, double eps, double* inv_w, int n) {
  const __m256d e2 = _mm256_set1_pd(eps * eps);
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d x = _mm256_loadu_pd(u + l);
    _mm256_storeu_pd(inv_w + l, _mm256_sqrt_pd(_mm256_fmadd_pd(x, x, e2)));
  }
  const double s = eps * eps;
  for (; l < n; ++l) inv_w[l] = std::sqrt(std::fma(u[l], u[l], s));
}

void v_inv_weights_quarter(const double* u, double eps, double* inv_w, int n) {
  const __m256d e2 = _mm256_set1_pd(eps * eps);
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d x = _mm256_loadu_pd(u + l);
    __m256d r = _mm256_sqrt_pd(_mm256_fmadd_pd(x, x, e2));
    _mm256_storeu_pd(inv_w + l, _mm256_sqrt_pd(r));
  }
  const double s = eps * eps;
  for (; l < n; ++l) inv_w[l] = std::sqrt(std::sqrt(std::fma(u[l], u[l], s)));
}

double v_wdot(const double* a, const double* b, const double* w, int n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int l = 0;
  for (; l + 8 <= n; l += 8) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + l + 4), _mm256_loadu_pd(b + l + 4));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + l), acc0);
    acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(w + l + 4), acc1);
  }
  for (; l + 4 <= n; l += 4) {
    __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l));
    acc0 = _mm256_fmadd_pd(p, _mm256_loadu_pd(w + l), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; l < n; ++l) acc = std::fma(a[l] * b[l], w[l], acc);
  return acc;
}

double v_dot(const double* a, const double* b, int n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  int l = 0;
  for (; l + 8 <= n; l += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l + 4), _mm256_loadu_pd(b + l + 4), acc1);
  }
  for (; l + 4 <= n; l += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; l < n; ++l) acc = std::fma(a[l], b[l], acc);
  return acc;
}

void v_combine(const double* C, int m, int n, const double* inv_w,
               const double* lam, double* u) {
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int i = 0; i < m; ++i) {
      const double* row = C + static_cast<long>(i) * n;
      acc = _mm256_fmadd_pd(_mm256_set1_pd(lam[i]), _mm256_loadu_pd(row + l), acc);
    }
    _mm256_storeu_pd(u + l, _mm256_mul_pd(acc, _mm256_loadu_pd(inv_w + l)));
  }
  for (; l < n; ++l) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      acc = std::fma(lam[i], C[static_cast<long>(i) * n + l], acc);
    u[l] = acc * inv_w[l];
  }
}

double v_sum_abs(const double* u, int n) {
  __m256d acc = _mm256_setzero_pd();
  int l = 0;
  for (; l + 4 <= n; l += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(u + l)));
  double s = hsum(acc);
  for (; l < n; ++l) s += std::fabs(u[l]);
  return s;
}

double v_max_abs(const double* u, int n) {
  __m256d acc = _mm256_setzero_pd();
  int l = 0;
  for (; l + 4 <= n; l += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(u + l)));
  double m = hmax(acc);
  for (; l < n; ++l) m = std::fmax(m, std::fabs(u[l]));
  return m;
}

double v_max_abs_diff(const double* a, const double* b, int n) {
  __m256d acc = _mm256_setzero_pd();
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l));
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  double m = hmax(acc);
  for (; l < n; ++l) m = std::fmax(m, std::fabs(a[l] - b[l]));
  return m;
}

}  // namespace

const Ops avx2_ops = {
    "avx2",         v_inv_weights_l1, v_inv_weights_quarter,
    v_wdot,         v_dot,            v_combine,
    v_sum_abs,      v_max_abs,        v_max_abs_diff,
};

}  // namespace rendezvous::kernels

#endif  // x86_64
