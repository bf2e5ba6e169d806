#pragma once

namespace ptreg::kernels {

// Dense double-precision primitives behind every hot loop in the library.
// Each operation has a scalar reference implementation and may have SIMD
// variants. All variants of one operation compute the same quantity with a
// fixed accumulation order, so results are bit-deterministic for a given
// backend; different backends may disagree in the last few ulps (FMA,
// vectorized reductions). Equivalence between backends is enforced by test.
struct Backend {
  const char* name;

  // C (m x n) = A (m x k) * B (k x n); "+=" when accumulate. Row-major.
  void (*gemm_nn)(double* c, const double* a, const double* b, int m, int k,
                  int n, bool accumulate);
  // C (m x n) = A (m x k) * B^T with B stored (n x k) row-major.
  void (*gemm_nt)(double* c, const double* a, const double* b, int m, int k,
                  int n, bool accumulate);

  double (*dot)(const double* a, const double* b, int n);
  double (*sum_sq_diff)(const double* a, const double* b, int n);

  void (*axpy)(double* y, const double* x, double alpha, int n);  // y += a*x
  void (*scale)(double* x, double alpha, int n);
  // Plane rotation, in place: (x, y) <- (c*x - s*y, s*x + c*y).
  void (*rot)(double* x, double* y, double c, double s, int n);

  void (*sgd_step)(double* theta, const double* g, double lr, int n);
  // Adam moment update + parameter step. bc1 = 1-beta1^t, bc2 = 1-beta2^t.
  void (*adam_step)(double* theta, double* m, double* v, const double* g,
                    double lr, double beta1, double beta2, double eps,
                    double bc1, double bc2, int n);
};

const Backend& scalar_backend();

// AVX2+FMA variant; null when the CPU or build does not support it.
const Backend* avx2_backend();

// Backend used by the library. Chosen once per process: the environment
// variable PTREG_KERNELS (values: auto, scalar, avx2; default auto) forces a
// choice, otherwise the best supported variant wins. Selection is stable for
// the lifetime of the process, which keeps seeded runs bit-reproducible on a
// given machine and build.
const Backend& active();

}  // namespace ptreg::kernels
