#include "ptreg/cpmap.hpp"

#include <cmath>
#include <string>

#include "ptreg/kernels.hpp"

namespace ptreg {

KrausLayer::KrausLayer(int p_in, int q_out, std::vector<Mat> operators)
    : p(p_in), q(q_out), kraus(std::move(operators)) {
  if (p < 1 || q < 1)
    throw std::invalid_argument("KrausLayer: dimensions must be positive");
  if (kraus.empty())
    throw std::invalid_argument("KrausLayer: needs at least one operator");
  for (const Mat& op : kraus)
    if (op.rows != q || op.cols != p)
      throw std::invalid_argument(
          "KrausLayer: operator shape " + std::to_string(op.rows) + "x" +
          std::to_string(op.cols) + " does not match " + std::to_string(q) +
          "x" + std::to_string(p));
}

NotCompletelyPositiveError::NotCompletelyPositiveError(double min_eig)
    : std::runtime_error("not completely positive: Choi min eigenvalue " +
                         std::to_string(min_eig)),
      min_eigenvalue(min_eig) {}

Mat apply(const KrausLayer& layer, const Mat& x) {
  if (x.rows != layer.p || x.cols != layer.p)
    throw std::invalid_argument(
        "apply: input must be " + std::to_string(layer.p) + "x" +
        std::to_string(layer.p) + ", got " + std::to_string(x.rows) + "x" +
        std::to_string(x.cols));
  const auto& k = kernels::active();
  Mat y(layer.q, layer.q);
  Mat tmp(layer.q, layer.p);
  for (std::size_t j = 0; j < layer.kraus.size(); ++j) {
    const Mat& a = layer.kraus[j];
    k.gemm_nn(tmp.ptr(), a.ptr(), x.ptr(), layer.q, layer.p, layer.p, false);
    k.gemm_nt(y.ptr(), tmp.ptr(), a.ptr(), layer.q, layer.p, layer.q, j > 0);
  }
  return y;
}

ChoiMatrix choi(const KrausLayer& layer) {
  const int p = layer.p;
  const int q = layer.q;
  const int side = p * q;
  ChoiMatrix c{p, q, Mat(side, side)};
  // Block (i, j) of the result is sum_k (col_i A_k)(col_j A_k)^T, so the
  // whole matrix is sum_k w_k w_k^T with w_k the column-block vectorization
  // of A_k. Rank-1 updates via the nt kernel.
  std::vector<double> w(static_cast<std::size_t>(side));
  for (std::size_t kk = 0; kk < layer.kraus.size(); ++kk) {
    const Mat& a = layer.kraus[kk];
    for (int i = 0; i < p; ++i)
      for (int s = 0; s < q; ++s) w[static_cast<std::size_t>(i) * q + s] = a(s, i);
    kernels::active().gemm_nt(c.mat.ptr(), w.data(), w.data(), side, 1, side,
                              kk > 0);
  }
  return c;
}

KrausLayer kraus_from_choi(const ChoiMatrix& c, double tol) {
  const int p = c.p;
  const int q = c.q;
  const int side = p * q;
  if (c.mat.rows != side || c.mat.cols != side)
    throw std::invalid_argument("kraus_from_choi: matrix side " +
                                std::to_string(c.mat.rows) +
                                " does not equal p*q = " +
                                std::to_string(side));
  const EigResult eig = sym_eig(c.mat);
  if (eig.eigenvalues.back() < -tol)
    throw NotCompletelyPositiveError(eig.eigenvalues.back());

  std::vector<Mat> ops;
  for (int k = 0; k < side; ++k) {
    const double lambda = eig.eigenvalues[k];
    if (lambda <= tol) break;  // sorted descending
    const double root = std::sqrt(lambda);
    Mat a(q, p);
    for (int i = 0; i < p; ++i)
      for (int s = 0; s < q; ++s) a(s, i) = root * eig.vectors(i * q + s, k);
    ops.push_back(std::move(a));
  }
  if (ops.empty()) ops.emplace_back(q, p);  // zero map, keep r >= 1
  return KrausLayer(p, q, std::move(ops));
}

StinespringForm to_stinespring(const KrausLayer& layer) {
  const int m = layer.r();
  StinespringForm sf{layer.p, layer.q, m, Mat(layer.q * m, layer.p)};
  for (int s = 0; s < layer.q; ++s)
    for (int u = 0; u < m; ++u)
      for (int col = 0; col < layer.p; ++col)
        sf.a(s * m + u, col) = layer.kraus[u](s, col);
  return sf;
}

Mat apply_stinespring(const StinespringForm& sf, const Mat& x) {
  if (x.rows != sf.p || x.cols != sf.p)
    throw std::invalid_argument(
        "apply_stinespring: input must be " + std::to_string(sf.p) + "x" +
        std::to_string(sf.p) + ", got " + std::to_string(x.rows) + "x" +
        std::to_string(x.cols));
  const Mat ax = matmul(sf.a, x);
  const Mat axat = matmul_nt(ax, sf.a);
  return partial_trace(axat, BlockSpec{sf.q, sf.m});
}

int kraus_rank(const KrausLayer& layer, double tol) {
  const EigResult eig = sym_eig(choi(layer).mat);
  const double top = eig.eigenvalues.front();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (double lambda : eig.eigenvalues)
    if (lambda > tol * top) ++rank;
  return rank;
}

}  // namespace ptreg
