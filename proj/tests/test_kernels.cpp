#include <doctest.h>

#include <cmath>
#include <vector>

#include "ptreg/kernels.hpp"
#include "ptreg/rng.hpp"

using namespace ptreg;

namespace {

std::vector<double> random_vec(Rng& rng, int n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("scalar gemm_nn against a hand example") {
  // [[1,2],[3,4]] * [[5,6],[7,8]] = [[19,22],[43,50]]
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{5, 6, 7, 8};
  std::vector<double> c(4, -1.0);
  kernels::scalar_backend().gemm_nn(c.data(), a.data(), b.data(), 2, 2, 2,
                                    false);
  CHECK(c == std::vector<double>{19, 22, 43, 50});
  kernels::scalar_backend().gemm_nn(c.data(), a.data(), b.data(), 2, 2, 2,
                                    true);
  CHECK(c == std::vector<double>{38, 44, 86, 100});
}

TEST_CASE("scalar gemm_nt against a hand example") {
  // A * B^T with B = [[5,6],[7,8]]: [[17,23],[39,53]]
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{5, 6, 7, 8};
  std::vector<double> c(4, 0.0);
  kernels::scalar_backend().gemm_nt(c.data(), a.data(), b.data(), 2, 2, 2,
                                    false);
  CHECK(c == std::vector<double>{17, 23, 39, 53});
}

TEST_CASE("avx2 backend matches the scalar reference") {
  const kernels::Backend* simd = kernels::avx2_backend();
  if (!simd) return;  // nothing to compare on this machine
  const kernels::Backend& ref = kernels::scalar_backend();

  Rng rng(20240517);
  // Sizes straddle the vector width to exercise the tails.
  for (int m : {1, 2, 3, 5, 8}) {
    for (int k : {1, 3, 4, 7, 16}) {
      for (int n : {1, 2, 4, 6, 13}) {
        const auto a = random_vec(rng, m * k);
        const auto b = random_vec(rng, k * n);
        const auto bt = random_vec(rng, n * k);
        std::vector<double> c0(m * n), c1(m * n);

        ref.gemm_nn(c0.data(), a.data(), b.data(), m, k, n, false);
        simd->gemm_nn(c1.data(), a.data(), b.data(), m, k, n, false);
        CHECK(rel_diff(c1, c0) < 1e-13);

        ref.gemm_nt(c0.data(), a.data(), bt.data(), m, k, n, true);
        simd->gemm_nt(c1.data(), a.data(), bt.data(), m, k, n, true);
        CHECK(rel_diff(c1, c0) < 1e-13);
      }
    }
  }

  for (int n : {1, 2, 4, 5, 9, 33, 128}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    CHECK(std::abs(simd->dot(x.data(), y.data(), n) -
                   ref.dot(x.data(), y.data(), n)) <=
          1e-13 * (1.0 + std::abs(ref.dot(x.data(), y.data(), n))));
    CHECK(std::abs(simd->sum_sq_diff(x.data(), y.data(), n) -
                   ref.sum_sq_diff(x.data(), y.data(), n)) <=
          1e-13 * (1.0 + ref.sum_sq_diff(x.data(), y.data(), n)));

    auto y0 = y, y1 = y;
    ref.axpy(y0.data(), x.data(), 0.37, n);
    simd->axpy(y1.data(), x.data(), 0.37, n);
    CHECK(rel_diff(y1, y0) < 1e-14);

    auto s0 = x, s1 = x;
    ref.scale(s0.data(), -1.25, n);
    simd->scale(s1.data(), -1.25, n);
    CHECK(s0 == s1);  // scaling is a single rounding either way

    auto rx0 = x, ry0 = y, rx1 = x, ry1 = y;
    const double c = std::cos(0.71), sn = std::sin(0.71);
    ref.rot(rx0.data(), ry0.data(), c, sn, n);
    simd->rot(rx1.data(), ry1.data(), c, sn, n);
    CHECK(rel_diff(rx1, rx0) < 1e-14);
    CHECK(rel_diff(ry1, ry0) < 1e-14);

    auto t0 = x, t1 = x;
    ref.sgd_step(t0.data(), y.data(), 0.01, n);
    simd->sgd_step(t1.data(), y.data(), 0.01, n);
    CHECK(rel_diff(t1, t0) < 1e-14);

    auto th0 = x, th1 = x;
    std::vector<double> m0(n, 0.1), v0(n, 0.2), m1(n, 0.1), v1(n, 0.2);
    ref.adam_step(th0.data(), m0.data(), v0.data(), y.data(), 0.001, 0.9,
                  0.999, 1e-8, 0.1, 0.001, n);
    simd->adam_step(th1.data(), m1.data(), v1.data(), y.data(), 0.001, 0.9,
                    0.999, 1e-8, 0.1, 0.001, n);
    CHECK(rel_diff(th1, th0) < 1e-12);
    CHECK(rel_diff(m1, m0) < 1e-13);
    CHECK(rel_diff(v1, v0) < 1e-13);
  }
}

TEST_CASE("active backend is one of the registered variants") {
  const kernels::Backend& b = kernels::active();
  const bool known = &b == &kernels::scalar_backend() ||
                     (kernels::avx2_backend() && &b == kernels::avx2_backend());
  CHECK(known);
}
