#include "ptreg/baselines.hpp"

#include <cmath>
#include <string>

#include "ptreg/kernels.hpp"
#include "ptreg/rng.hpp"

namespace ptreg {
namespace {

// Relative eigenvalue threshold for numeric rank decisions in the
// pseudoinverse.
constexpr double kPinvTol = 1e-12;

std::vector<double> vec_rowmajor(const Mat& m) { return m.data; }

// Minimum-norm solution of min ||D w - t||^2 for all columns t of T:
// W = (D^T D)^+ D^T T, returned as a (cols(D) x cols(T)) matrix.
Mat min_norm_ls(const Mat& d, const Mat& t) {
  const Mat dt = transpose(d);
  const Mat gram = matmul(dt, d);
  const Mat rhs = matmul(dt, t);

  const EigResult eig = sym_eig(gram);
  const double top = eig.eigenvalues.front();
  const double cutoff = top > 0.0 ? kPinvTol * top : 0.0;

  // (V diag(1/lambda) V^T) rhs, dropping near-null directions.
  const Mat vt_rhs = matmul(transpose(eig.vectors), rhs);
  Mat scaled_rows = vt_rhs;
  for (int k = 0; k < scaled_rows.rows; ++k) {
    const double lambda = eig.eigenvalues[k];
    const double inv = lambda > cutoff ? 1.0 / lambda : 0.0;
    kernels::active().scale(&scaled_rows(k, 0), inv, scaled_rows.cols);
  }
  return matmul(eig.vectors, scaled_rows);
}

}  // namespace

Mat LinearMapCoeffs::predict(const Mat& x) const {
  if (x.rows != p || x.cols != p)
    throw std::invalid_argument("LinearMapCoeffs: input must be " +
                                std::to_string(p) + "x" + std::to_string(p));
  Mat y(q, q);
  const std::vector<double> vx = vec_rowmajor(x);
  for (int row = 0; row < coeffs.rows; ++row)
    y.data[row] = kernels::active().dot(&coeffs(row, 0), vx.data(),
                                        coeffs.cols) +
                  intercept[row];
  return y;
}

Mat TraceRegressionModel::predict(const Mat& x) const {
  Mat y(q, q);
  for (int s = 0; s < q; ++s)
    for (int t = 0; t < q; ++t)
      y(s, t) = forward(entry_models[static_cast<std::size_t>(s) * q + t],
                        x)(0, 0);
  return y;
}

TraceRegressionModel fit_trace_regression(const Dataset& data, int rank,
                                          const TrainConfig& cfg) {
  if (data.size() == 0)
    throw std::invalid_argument("fit_trace_regression: empty dataset");
  if (rank < 1)
    throw std::invalid_argument("fit_trace_regression: rank must be >= 1");
  TraceRegressionModel model;
  model.p = data.p;
  model.q = data.q;
  for (int s = 0; s < data.q; ++s)
    for (int t = 0; t < data.q; ++t) {
      Dataset entry;
      entry.p = data.p;
      entry.q = 1;
      for (std::size_t i = 0; i < data.size(); ++i) {
        Mat y(1, 1);
        y(0, 0) = data.targets[i](s, t);
        entry.add(data.inputs[i], std::move(y));
      }
      TrainConfig entry_cfg = cfg;
      entry_cfg.seed =
          mix_seed(cfg.seed, static_cast<std::uint64_t>(s) * data.q + t);
      auto [fitted, log] = fit(entry, {{1, rank}}, entry_cfg);
      model.entry_models.push_back(std::move(fitted));
    }
  return model;
}

LinearMapCoeffs fit_multivariate_ls(const Dataset& data) {
  const std::size_t l = data.size();
  if (l == 0) throw std::invalid_argument("fit_multivariate_ls: empty dataset");
  const int pp = data.p * data.p;
  const int qq = data.q * data.q;

  Mat design(static_cast<int>(l), pp);
  Mat targets(static_cast<int>(l), qq);
  for (std::size_t i = 0; i < l; ++i) {
    const auto vx = vec_rowmajor(data.inputs[i]);
    const auto vy = vec_rowmajor(data.targets[i]);
    std::copy(vx.begin(), vx.end(), &design(static_cast<int>(i), 0));
    std::copy(vy.begin(), vy.end(), &targets(static_cast<int>(i), 0));
  }

  const Mat wt = min_norm_ls(design, targets);  // p^2 x q^2
  LinearMapCoeffs out;
  out.p = data.p;
  out.q = data.q;
  out.coeffs = transpose(wt);
  out.intercept.assign(static_cast<std::size_t>(qq), 0.0);
  return out;
}

LinearMapCoeffs fit_reduced_rank(const Dataset& data, int k) {
  const int pp = data.p * data.p;
  const int qq = data.q * data.q;
  const int kmax = std::min(pp, qq);
  if (k < 1 || k > kmax)
    throw std::invalid_argument("fit_reduced_rank: k must be in [1, " +
                                std::to_string(kmax) + "]");
  LinearMapCoeffs ols = fit_multivariate_ls(data);
  if (k == kmax) return ols;

  // Left singular subspace of B from the q^2 x q^2 Gram matrix; truncation
  // is the projection U_k U_k^T B.
  const Mat gram = matmul_nt(ols.coeffs, ols.coeffs);
  const EigResult eig = sym_eig(gram);
  Mat uk(qq, k);
  for (int col = 0; col < k; ++col)
    for (int row = 0; row < qq; ++row) uk(row, col) = eig.vectors(row, col);
  LinearMapCoeffs out = ols;
  out.coeffs = matmul(uk, matmul(transpose(uk), ols.coeffs));
  return out;
}

}  // namespace ptreg
