#include "ptreg/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "ptreg/rng.hpp"

namespace ptreg {
namespace {

Mat gaussian_from(Rng& rng, int rows, int cols, double scale) {
  Mat m(rows, cols);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

Mat psd_from(Rng& rng, int p) {
  const Mat g = gaussian_from(rng, p, p, 1.0);
  return scaled(matmul_nt(g, g), 1.0 / static_cast<double>(p));
}

// Targets under the general two-parameter form sum_u A_u X B_u^T.
Mat apply_general(const KrausLayer& a, const KrausLayer& b, const Mat& x) {
  Mat y(a.q, a.q);
  for (int u = 0; u < a.r(); ++u) {
    const Mat t = matmul(a.kraus[u], x);
    const Mat term = matmul_nt(t, b.kraus[u]);
    for (std::size_t i = 0; i < y.size(); ++i)
      y.data[i] += term.data[i];
  }
  return y;
}

}  // namespace

KrausLayer random_kraus_map(int p, int q, int r, std::uint64_t seed,
                            double scale) {
  if (p < 1 || q < 1 || r < 1)
    throw std::invalid_argument("random_kraus_map: p, q, r must be >= 1");
  const double std_dev =
      scale >= 0.0 ? scale
                   : 1.0 / std::sqrt(static_cast<double>(p) *
                                     static_cast<double>(r));
  Rng rng(seed);
  std::vector<Mat> ops;
  ops.reserve(r);
  for (int j = 0; j < r; ++j) ops.push_back(gaussian_from(rng, q, p, std_dev));
  return KrausLayer(p, q, std::move(ops));
}

Mat random_psd(int p, std::uint64_t seed) {
  Rng rng(seed);
  return psd_from(rng, p);
}

Mat random_gaussian(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_from(rng, rows, cols, 1.0);
}

Dataset synth_dataset(const SyntheticTask& task, int n, InputLaw law) {
  if (n < 1) throw std::invalid_argument("synth_dataset: n must be >= 1");
  if (task.noise_sigma < 0.0)
    throw std::invalid_argument("synth_dataset: noise_sigma must be >= 0");
  if (task.general_b) {
    const KrausLayer& a = task.true_map.layers.front();
    if (task.true_map.depth() != 1)
      throw std::invalid_argument(
          "synth_dataset: the general form is depth-1 only");
    if (task.general_b->p != a.p || task.general_b->q != a.q ||
        task.general_b->r() != a.r())
      throw std::invalid_argument(
          "synth_dataset: general-form B must match A's shape and rank");
  }

  const int p = task.true_map.input_dim();
  const int q = task.true_map.output_dim();
  Rng rng(task.seed);
  Dataset data;
  data.p = p;
  data.q = q;
  for (int i = 0; i < n; ++i) {
    Mat x = law == InputLaw::psd ? psd_from(rng, p)
                                 : gaussian_from(rng, p, p, 1.0);
    Mat y = task.general_b
                ? apply_general(task.true_map.layers.front(), *task.general_b,
                                x)
                : forward(task.true_map, x);
    if (task.noise_sigma > 0.0) {
      const Mat noise = gaussian_from(rng, q, q, task.noise_sigma);
      y = add(y, symmetrized(noise));
    }
    data.add(std::move(x), std::move(y));
  }
  return data;
}

Mat planted_choi_target(int p, int q, int r, std::uint64_t seed) {
  return choi(random_kraus_map(p, q, r, seed)).mat;
}

ObservationMask block_missing_mask(const BlockLayout& layout,
                                   int offdiag_pairs, int diag_blocks,
                                   std::uint64_t seed) {
  const int p = layout.p;
  const int q = layout.q;
  const int max_pairs = p * (p - 1) / 2;
  if (offdiag_pairs < 0 || offdiag_pairs > max_pairs)
    throw std::invalid_argument("block_missing_mask: bad off-diagonal count");
  if (diag_blocks < 0 || diag_blocks > p)
    throw std::invalid_argument("block_missing_mask: bad diagonal count");

  Rng rng(seed);
  ObservationMask mask = ObservationMask::all(layout.side());
  auto hide_block = [&](int bi, int bj) {
    for (int s = 0; s < q; ++s)
      for (int t = 0; t < q; ++t) mask.set(bi * q + s, bj * q + t, false);
  };

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  for (std::size_t i = pairs.size() - 1; i > 0; --i)
    std::swap(pairs[i], pairs[rng.index(i + 1)]);
  for (int k = 0; k < offdiag_pairs; ++k)
    hide_block(pairs[k].first, pairs[k].second);  // set() mirrors (j, i)

  std::vector<int> diags(p);
  for (int i = 0; i < p; ++i) diags[i] = i;
  for (std::size_t i = diags.size() - 1; i > 0; --i)
    std::swap(diags[i], diags[rng.index(i + 1)]);
  for (int k = 0; k < diag_blocks; ++k) hide_block(diags[k], diags[k]);

  mask.validate();
  return mask;
}

ObservationMask random_entry_mask(int n, double missing_frac,
                                  std::uint64_t seed) {
  if (missing_frac < 0.0 || missing_frac >= 1.0)
    throw std::invalid_argument("random_entry_mask: fraction in [0, 1)");
  Rng rng(seed);
  std::vector<std::pair<int, int>> upper;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) upper.emplace_back(i, j);
  for (std::size_t i = upper.size() - 1; i > 0; --i)
    std::swap(upper[i], upper[rng.index(i + 1)]);

  const auto hide = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(upper.size()) - 1.0,
                       std::floor(missing_frac * upper.size())));
  ObservationMask mask = ObservationMask::all(n);
  for (std::size_t k = 0; k < hide; ++k)
    mask.set(upper[k].first, upper[k].second, false);
  mask.validate();
  return mask;
}

}  // namespace ptreg
