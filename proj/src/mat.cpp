#include "ptreg/mat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ptreg/kernels.hpp"

namespace ptreg {
namespace {

[[noreturn]] void dims_error(const std::string& what) {
  throw std::invalid_argument(what);
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (!a.same_shape(b))
    dims_error(std::string(op) + ": shape mismatch, " +
               std::to_string(a.rows) + "x" + std::to_string(a.cols) +
               " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

void require_square(const Mat& a, const char* op) {
  if (!a.square())
    dims_error(std::string(op) + ": expected square matrix, got " +
               std::to_string(a.rows) + "x" + std::to_string(a.cols));
}

}  // namespace

std::size_t Mat::check_dims(int r, int c) {
  if (r < 1 || c < 1)
    dims_error("Mat: dimensions must be positive, got " + std::to_string(r) +
               "x" + std::to_string(c));
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(c);
}

Mat::Mat(int r, int c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != check_dims(r, c))
    dims_error("Mat: data length " + std::to_string(data.size()) +
               " does not match " + std::to_string(r) + "x" +
               std::to_string(c));
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows)
    dims_error("matmul: inner dimensions disagree, " + std::to_string(a.cols) +
               " vs " + std::to_string(b.rows));
  Mat c(a.rows, b.cols);
  kernels::active().gemm_nn(c.ptr(), a.ptr(), b.ptr(), a.rows, a.cols, b.cols,
                            false);
  return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  if (a.cols != b.cols)
    dims_error("matmul_nt: inner dimensions disagree, " +
               std::to_string(a.cols) + " vs " + std::to_string(b.cols));
  Mat c(a.rows, b.rows);
  kernels::active().gemm_nt(c.ptr(), a.ptr(), b.ptr(), a.rows, a.cols, b.rows,
                            false);
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Mat add(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "add");
  Mat c = a;
  kernels::active().axpy(c.ptr(), b.ptr(), 1.0, static_cast<int>(c.size()));
  return c;
}

Mat sub(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "sub");
  Mat c = a;
  kernels::active().axpy(c.ptr(), b.ptr(), -1.0, static_cast<int>(c.size()));
  return c;
}

Mat scaled(const Mat& a, double alpha) {
  Mat c = a;
  kernels::active().scale(c.ptr(), alpha, static_cast<int>(c.size()));
  return c;
}

Mat symmetrized(const Mat& a) {
  require_square(a, "symmetrized");
  Mat s(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

double trace(const Mat& a) {
  require_square(a, "trace");
  double t = 0.0;
  for (int i = 0; i < a.rows; ++i) t += a(i, i);
  return t;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double x : a.data) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

Mat partial_trace(const Mat& m, const BlockSpec& spec) {
  const int q = spec.outer;
  const int mm = spec.inner;
  if (q < 1 || mm < 1)
    dims_error("partial_trace: block spec must be positive");
  const int side = q * mm;
  if (m.rows != side || m.cols != side)
    dims_error("partial_trace: expected " + std::to_string(side) + "x" +
               std::to_string(side) + " input, got " + std::to_string(m.rows) +
               "x" + std::to_string(m.cols));
  Mat out(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      double t = 0.0;
      for (int u = 0; u < mm; ++u) t += m(i * mm + u, j * mm + u);
      out(i, j) = t;
    }
  return out;
}

Mat matrix_unit(int n, int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    dims_error("matrix_unit: index (" + std::to_string(i) + ", " +
               std::to_string(j) + ") out of range for n=" + std::to_string(n));
  Mat e(n, n);
  e(i, j) = 1.0;
  return e;
}

EigResult sym_eig(const Mat& s) {
  require_square(s, "sym_eig");
  const int n = s.rows;
  const auto& k = kernels::active();

  Mat a = symmetrized(s);
  Mat vt = Mat::identity(n);  // rows hold eigenvectors (V^T)

  double fro2 = 0.0;
  for (double x : a.data) fro2 += x * x;

  const int max_sweeps = 50;
  double prev_off2 = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off2 += 2.0 * a(i, j) * a(i, j);
    // Stop at the round-off plateau: either the off-diagonal mass is
    // negligible or it no longer decreases.
    if (off2 == 0.0 || off2 <= 1e-26 * fro2 ||
        (sweep > 2 && off2 >= prev_off2))
      break;
    prev_off2 = off2;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        // Two-sided rotation J^T A J in the (p, q) plane: rotate the two
        // rows, then the two columns.
        k.rot(&a(p, 0), &a(q, 0), c, sn, n);
        for (int r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        k.rot(&vt(p, 0), &vt(q, 0), c, sn, n);
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) > a(y, y); });

  EigResult res;
  res.eigenvalues.resize(n);
  res.vectors = Mat(n, n);
  for (int kcol = 0; kcol < n; ++kcol) {
    const int src = order[kcol];
    res.eigenvalues[kcol] = a(src, src);
    // Sign normalization: largest-magnitude entry positive.
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = std::abs(vt(src, i));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double flip = vt(src, arg) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) res.vectors(i, kcol) = flip * vt(src, i);
  }
  return res;
}

bool is_psd(const Mat& s, double tol) {
  return min_eigenvalue(s) >= -tol;
}

double min_eigenvalue(const Mat& s) {
  const EigResult eig = sym_eig(s);
  return eig.eigenvalues.back();
}

double frobenius_mse(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "frobenius_mse");
  return kernels::active().sum_sq_diff(a.ptr(), b.ptr(),
                                       static_cast<int>(a.size()));
}

}  // namespace ptreg
