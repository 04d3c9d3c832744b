#pragma once

// Low-level array kernels used by the IRLS inner loop, with a scalar
// reference implementation and an AVX2 variant selected at runtime.
//
// Contract between backends:
//   - elementwise kernels (inv_weights_*, combine) produce bitwise-identical
//     results: the scalar path uses std::fma and sqrt(sqrt(x)) so that each
//     output element is the same sequence of correctly rounded operations
//     the vector path performs per lane;
//   - reductions (wdot, dot, sum_abs, max_abs, max_abs_diff) may differ by
//     accumulation order and are equivalence-tested to 1e-13 relative.
//
// Matrices are handed in row-major: row i of an m x n matrix C starts at
// C + i*n. All lengths are element counts.

namespace rendezvous::kernels {

struct Ops {
  const char* name;

  // inv_w[l] = sqrt(u[l]^2 + eps^2)            (reciprocal of the l1 weight)
  void (*inv_weights_l1)(const double* u, double eps, double* inv_w, int n);

  // inv_w[l] = (u[l]^2 + eps^2)^(1/4), computed as sqrt(sqrt(.))
  void (*inv_weights_quarter)(const double* u, double eps, double* inv_w, int n);

  // sum_l a[l]*b[l]*w[l]
  double (*wdot)(const double* a, const double* b, const double* w, int n);

  // sum_l a[l]*b[l]
  double (*dot)(const double* a, const double* b, int n);

  // u[l] = inv_w[l] * sum_i lam[i]*C[i*n + l]   (weighted adjoint combine)
  void (*combine)(const double* C, int m, int n, const double* inv_w,
                  const double* lam, double* u);

  // sum_l |u[l]|
  double (*sum_abs)(const double* u, int n);

  // max_l |u[l]|
  double (*max_abs)(const double* u, int n);

  // max_l |a[l]-b[l]|
  double (*max_abs_diff)(const double* a, const double* b, int n);
};

enum class Backend { scalar, avx2 };

// Currently selected kernel table. Defaults to the best available backend;
// stable after first use unless select() is called.
const Ops& active();
Backend active_backend();

// Force a backend (tests). Returns false if unsupported on this CPU.
bool select(Backend);
Backend best_available();
bool available(Backend);

extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif

}  // namespace rendezvous::kernels
