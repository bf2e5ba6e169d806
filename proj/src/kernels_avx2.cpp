#include "ptreg/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#define PTREG_AVX2_BUILD 1
#include <immintrin.h>

#include <cmath>
#include <cstring>
#endif

namespace ptreg::kernels {

#if defined(PTREG_AVX2_BUILD)
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void gemm_nn(double* c, const double* a, const double* b, int m, int k, int n,
             bool accumulate) {
  const int n4 = n - (n & 3);
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<long>(i) * n;
    if (!accumulate) std::memset(ci, 0, sizeof(double) * n);
    const double* ai = a + static_cast<long>(i) * k;
    for (int l = 0; l < k; ++l) {
      const double ail = ai[l];
      const double* bl = b + static_cast<long>(l) * n;
      const __m256d va = _mm256_set1_pd(ail);
      int j = 0;
      for (; j < n4; j += 4) {
        __m256d vc = _mm256_loadu_pd(ci + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(bl + j), vc);
        _mm256_storeu_pd(ci + j, vc);
      }
      for (; j < n; ++j) ci[j] += ail * bl[j];
    }
  }
}

inline double dot_impl(const double* a, const double* b, int n) {
  const int n4 = n - (n & 3);
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i < n4; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemm_nt(double* c, const double* a, const double* b, int m, int k, int n,
             bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const double* ai = a + static_cast<long>(i) * k;
    double* ci = c + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double s = dot_impl(ai, b + static_cast<long>(j) * k, k);
      ci[j] = accumulate ? ci[j] + s : s;
    }
  }
}

double dot(const double* a, const double* b, int n) {
  return dot_impl(a, b, n);
}

double sum_sq_diff(const double* a, const double* b, int n) {
  const int n4 = n - (n & 3);
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double* y, const double* x, double alpha, int n) {
  const int n4 = n - (n & 3);
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i < n4; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, double alpha, int n) {
  const int n4 = n - (n & 3);
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i < n4; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void rot(double* x, double* y, double c, double s, int n) {
  const int n4 = n - (n & 3);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, vx, _mm256_mul_pd(vs, vy)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vx, _mm256_mul_pd(vc, vy)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void sgd_step(double* theta, const double* g, double lr, int n) {
  const int n4 = n - (n & 3);
  const __m256d vlr = _mm256_set1_pd(lr);
  int i = 0;
  for (; i < n4; i += 4) {
    __m256d vt = _mm256_loadu_pd(theta + i);
    vt = _mm256_fnmadd_pd(vlr, _mm256_loadu_pd(g + i), vt);
    _mm256_storeu_pd(theta + i, vt);
  }
  for (; i < n; ++i) theta[i] -= lr * g[i];
}

void adam_step(double* theta, double* m, double* v, const double* g, double lr,
               double beta1, double beta2, double eps, double bc1, double bc2,
               int n) {
  const int n4 = n - (n & 3);
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vc1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vc2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vilr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    vm = _mm256_fmadd_pd(vc1, vg, _mm256_mul_pd(vb1, vm));
    vv = _mm256_fmadd_pd(vc2, _mm256_mul_pd(vg, vg), _mm256_mul_pd(vb2, vv));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(vm, vbc1);
    const __m256d vhat = _mm256_div_pd(vv, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    __m256d vt = _mm256_loadu_pd(theta + i);
    vt = _mm256_sub_pd(vt, _mm256_div_pd(_mm256_mul_pd(vilr, mhat), denom));
    _mm256_storeu_pd(theta + i, vt);
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

constexpr Backend kAvx2 = {
    "avx2", gemm_nn, gemm_nt,  dot,      sum_sq_diff,
    axpy,   scale,   rot,      sgd_step, adam_step,
};

}  // namespace

const Backend* avx2_backend() {
  static const Backend* backend =
      (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
          ? &kAvx2
          : nullptr;
  return backend;
}

#else

const Backend* avx2_backend() { return nullptr; }

#endif

}  // namespace ptreg::kernels
