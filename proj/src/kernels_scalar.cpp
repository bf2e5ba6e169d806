#include "ptreg/kernels.hpp"

#include <cmath>
#include <cstring>

namespace ptreg::kernels {
namespace {

void gemm_nn(double* c, const double* a, const double* b, int m, int k, int n,
             bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<long>(i) * n;
    if (!accumulate) std::memset(ci, 0, sizeof(double) * n);
    const double* ai = a + static_cast<long>(i) * k;
    for (int l = 0; l < k; ++l) {
      const double ail = ai[l];
      const double* bl = b + static_cast<long>(l) * n;
      for (int j = 0; j < n; ++j) ci[j] += ail * bl[j];
    }
  }
}

void gemm_nt(double* c, const double* a, const double* b, int m, int k, int n,
             bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const double* ai = a + static_cast<long>(i) * k;
    double* ci = c + static_cast<long>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* bj = b + static_cast<long>(j) * k;
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += ai[l] * bj[l];
      ci[j] = accumulate ? ci[j] + s : s;
    }
  }
}

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_diff(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double* y, const double* x, double alpha, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double* x, double alpha, int n) {
  for (int i = 0; i < n; ++i) x[i] *= alpha;
}

void rot(double* x, double* y, double c, double s, int n) {
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void sgd_step(double* theta, const double* g, double lr, int n) {
  for (int i = 0; i < n; ++i) theta[i] -= lr * g[i];
}

void adam_step(double* theta, double* m, double* v, const double* g, double lr,
               double beta1, double beta2, double eps, double bc1, double bc2,
               int n) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

constexpr Backend kScalar = {
    "scalar", gemm_nn, gemm_nt,  dot,      sum_sq_diff,
    axpy,     scale,   rot,      sgd_step, adam_step,
};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

}  // namespace ptreg::kernels
