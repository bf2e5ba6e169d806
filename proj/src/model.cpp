#include "ptreg/model.hpp"

#include <string>

namespace ptreg {

StackedModel::StackedModel(std::vector<KrausLayer> stack, double eps)
    : layers(std::move(stack)), activation_eps(eps) {
  if (layers.empty())
    throw std::invalid_argument("StackedModel: depth must be at least 1");
  if (activation_eps <= 0.0)
    throw std::invalid_argument("StackedModel: activation_eps must be > 0");
  for (std::size_t k = 0; k + 1 < layers.size(); ++k)
    if (layers[k].q != layers[k + 1].p)
      throw std::invalid_argument(
          "StackedModel: layer " + std::to_string(k) + " outputs " +
          std::to_string(layers[k].q) + " but layer " + std::to_string(k + 1) +
          " expects " + std::to_string(layers[k + 1].p));
}

Mat reeig(const Mat& s, double eps) {
  if (!s.square())
    throw std::invalid_argument("reeig: expected square matrix, got " +
                                std::to_string(s.rows) + "x" +
                                std::to_string(s.cols));
  const Mat sym = symmetrized(s);
  const EigResult eig = sym_eig(sym);
  if (eig.eigenvalues.back() >= eps) return sym;  // nothing clamps

  const int n = sym.rows;
  Mat scaled_vt(n, n);  // rows: clamped eigenvalue times eigenvector
  for (int k = 0; k < n; ++k) {
    const double lambda = std::max(eig.eigenvalues[k], eps);
    for (int i = 0; i < n; ++i) scaled_vt(k, i) = lambda * eig.vectors(i, k);
  }
  // U diag(clamped) U^T = U * scaled_vt.
  return symmetrized(matmul(eig.vectors, scaled_vt));
}

Mat forward(const StackedModel& model, const Mat& x) {
  Mat z = apply(model.layers.front(), x);
  for (std::size_t k = 1; k < model.layers.size(); ++k)
    z = apply(model.layers[k], reeig(z, model.activation_eps));
  return z;
}

Mat forward_cached(const StackedModel& model, const Mat& x,
                   ForwardCache& cache) {
  cache.pre.clear();
  cache.post.clear();
  Mat z = apply(model.layers.front(), x);
  cache.pre.push_back(z);
  for (std::size_t k = 1; k < model.layers.size(); ++k) {
    cache.post.push_back(reeig(cache.pre.back(), model.activation_eps));
    cache.pre.push_back(apply(model.layers[k], cache.post.back()));
  }
  return cache.pre.back();
}

}  // namespace ptreg
