#pragma once

#include <vector>

#include "ptreg/cpmap.hpp"

namespace ptreg {

/// Stack of CP-map layers with a PSD-preserving eigenvalue clamp between
/// consecutive layers. Depth 1 is a plain Kraus map; the activation is only
/// applied between layers, never after the last one.
struct StackedModel {
  std::vector<KrausLayer> layers;
  double activation_eps = 1e-4;

  StackedModel() = default;
  StackedModel(std::vector<KrausLayer> stack, double eps = 1e-4);

  int depth() const { return static_cast<int>(layers.size()); }
  int input_dim() const { return layers.front().p; }
  int output_dim() const { return layers.back().q; }
};

/// Eigenvalue clamp: U max(Lambda, eps) U^T of the symmetric part. Returns
/// the symmetric part unchanged when nothing clamps, so the activation is an
/// exact identity on well-conditioned PSD inputs.
Mat reeig(const Mat& s, double eps);

Mat forward(const StackedModel& model, const Mat& x);

/// Intermediates kept for backpropagation: pre[k] is layer k's raw output,
/// post[k] the activated version feeding layer k+1 (post has depth-1
/// entries). pre.back() is the model output.
struct ForwardCache {
  std::vector<Mat> pre;
  std::vector<Mat> post;
};

Mat forward_cached(const StackedModel& model, const Mat& x,
                   ForwardCache& cache);

}  // namespace ptreg
