#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ptreg {

/// Dense real matrix, row-major.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(check_dims(r, c), 0.0) {}
  Mat(int r, int c, std::vector<double> values);

  static Mat identity(int n);

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  std::size_t size() const { return data.size(); }
  bool square() const { return rows == cols; }
  bool same_shape(const Mat& other) const {
    return rows == other.rows && cols == other.cols;
  }

 private:
  static std::size_t check_dims(int r, int c);
};

/// Block addressing: a square matrix of side outer*inner seen as an
/// outer x outer grid of inner x inner blocks.
struct BlockSpec {
  int outer = 1;
  int inner = 1;
};

/// Symmetric eigendecomposition result. Eigenvalues sorted descending,
/// eigenvectors are the matching orthonormal columns of `vectors`.
struct EigResult {
  std::vector<double> eigenvalues;
  Mat vectors;
};

Mat matmul(const Mat& a, const Mat& b);     // A * B
Mat matmul_nt(const Mat& a, const Mat& b);  // A * B^T
Mat transpose(const Mat& a);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scaled(const Mat& a, double alpha);
Mat symmetrized(const Mat& a);  // (A + A^T) / 2
double trace(const Mat& a);
double max_abs(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);

/// Trace of each inner x inner block: a qm x qm matrix collapses to q x q.
/// Linear, trace-preserving, PSD-preserving; the usual trace when outer = 1.
Mat partial_trace(const Mat& m, const BlockSpec& spec);

/// E_ij: all zeros with a single 1 at (i, j). Indices are zero-based.
Mat matrix_unit(int n, int i, int j);

/// Cyclic Jacobi eigendecomposition of the symmetric part of S. Sweep order
/// is fixed, so identical input bits give identical output bits. Each
/// eigenvector is sign-normalized (largest-magnitude entry positive).
EigResult sym_eig(const Mat& s);

/// True iff the symmetric part of S has min eigenvalue >= -tol.
bool is_psd(const Mat& s, double tol);

double min_eigenvalue(const Mat& s);

/// Sum of squared entry differences (squared Frobenius distance).
double frobenius_mse(const Mat& a, const Mat& b);

}  // namespace ptreg
