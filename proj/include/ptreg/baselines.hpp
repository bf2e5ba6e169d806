#pragma once

#include "ptreg/train.hpp"

namespace ptreg {

/// Linear map on vectorized matrices: vec(Y) = B vec(X) + intercept, with B
/// of shape q^2 x p^2 (row-major vectorization). The intercept exists for
/// completeness and stays zero; none of the fitted models use one.
struct LinearMapCoeffs {
  int p = 0;
  int q = 0;
  Mat coeffs;
  std::vector<double> intercept;

  Mat predict(const Mat& x) const;
};

/// q^2 independent scalar (q = 1) partial-trace regressions, one per output
/// entry; the canonical lift of PSD-constrained trace regression to
/// matrix-valued outputs. Entry (s, t) is model s*q + t.
struct TraceRegressionModel {
  int p = 0;
  int q = 0;
  std::vector<StackedModel> entry_models;

  Mat predict(const Mat& x) const;
};

/// Fits each output entry as a rank-r PSD trace regression via the shared
/// training path. Entry (s, t) trains with seed mix_seed(cfg.seed, s*q + t).
TraceRegressionModel fit_trace_regression(const Dataset& data, int rank,
                                          const TrainConfig& cfg);

/// Minimum-norm least squares on the stacked vectorized design, via the
/// pseudoinverse of the normal equations. Exact when the planted map is
/// linear and the design spans the input space.
LinearMapCoeffs fit_multivariate_ls(const Dataset& data);

/// Ordinary least squares followed by truncation to the top-k singular
/// value expansion of the coefficient matrix.
LinearMapCoeffs fit_reduced_rank(const Dataset& data, int k);

}  // namespace ptreg
