#include "ptreg/complete.hpp"

#include <cmath>
#include <string>

namespace ptreg {

ObservationMask::ObservationMask(int side)
    : n(side), observed(static_cast<std::size_t>(side) * side, 0) {
  if (side < 1)
    throw std::invalid_argument("ObservationMask: side must be positive");
}

ObservationMask ObservationMask::all(int side) {
  ObservationMask m(side);
  m.observed.assign(m.observed.size(), 1);
  return m;
}

int ObservationMask::count() const {
  int c = 0;
  for (auto v : observed) c += v != 0;
  return c;
}

void ObservationMask::validate() const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (at(i, j) != at(j, i))
        throw std::invalid_argument(
            "ObservationMask: asymmetric at (" + std::to_string(i) + ", " +
            std::to_string(j) + ")");
  if (count() == 0)
    throw std::invalid_argument("ObservationMask: no observed entries");
}

BlockTrainingSet block_training_set(const Mat& m_obs,
                                    const BlockLayout& layout,
                                    const ObservationMask& mask) {
  const int p = layout.p;
  const int q = layout.q;
  if (p < 1 || q < 1)
    throw std::invalid_argument("block_training_set: layout must be positive");
  if (m_obs.rows != layout.side() || m_obs.cols != layout.side())
    throw std::invalid_argument(
        "block_training_set: matrix side " + std::to_string(m_obs.rows) +
        " does not match layout " + std::to_string(p) + "*" +
        std::to_string(q));
  if (mask.n != layout.side())
    throw std::invalid_argument("block_training_set: mask side mismatch");
  mask.validate();

  BlockTrainingSet out;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      EntryMask em = EntryMask::all(q, q);
      Mat y(q, q);
      int observed = 0;
      for (int s = 0; s < q; ++s)
        for (int t = 0; t < q; ++t) {
          const bool on = mask.at(i * q + s, j * q + t);
          em.set(s, t, on);
          y(s, t) = on ? m_obs(i * q + s, j * q + t) : 0.0;
          observed += on;
        }
      if (observed == 0) continue;
      out.data.add(matrix_unit(p, i, j), std::move(y));
      out.masks.push_back(std::move(em));
      out.block_ids.emplace_back(i, j);
    }
  if (out.data.size() == 0)
    throw std::invalid_argument("block_training_set: no observed entries");
  return out;
}

ObservationMask mask_from_nans(const Mat& m) {
  if (!m.square())
    throw std::invalid_argument("mask_from_nans: expected square matrix");
  ObservationMask mask(m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!std::isnan(m(i, j)))
        mask.observed[static_cast<std::size_t>(i) * m.rows + j] = 1;
  mask.validate();
  return mask;
}

CompletionResult complete_matrix(const Mat& m_obs,
                                 const ObservationMask& mask,
                                 const BlockLayout& layout,
                                 const std::vector<LayerSpec>& arch,
                                 const TrainConfig& cfg) {
  BlockTrainingSet ts = block_training_set(m_obs, layout, mask);
  auto [model, log] = fit(ts.data, arch, cfg, &ts.masks);

  const int p = layout.p;
  const int q = layout.q;
  Mat hat(layout.side(), layout.side());
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const Mat block = forward(model, matrix_unit(p, i, j));
      for (int s = 0; s < q; ++s)
        for (int t = 0; t < q; ++t) hat(i * q + s, j * q + t) = block(s, t);
    }
  return {symmetrized(hat), std::move(model), std::move(log)};
}

CompletionResult complete_matrix(const Mat& m_obs, const BlockLayout& layout,
                                 const std::vector<LayerSpec>& arch,
                                 const TrainConfig& cfg) {
  const ObservationMask mask = mask_from_nans(m_obs);
  Mat filled = m_obs;
  for (double& v : filled.data)
    if (std::isnan(v)) v = 0.0;
  return complete_matrix(filled, mask, layout, arch, cfg);
}

double completion_error(const Mat& m_true, const Mat& m_hat,
                        const ObservationMask& mask) {
  if (!m_true.same_shape(m_hat))
    throw std::invalid_argument("completion_error: shape mismatch");
  if (mask.n != m_true.rows)
    throw std::invalid_argument("completion_error: mask side mismatch");
  double s = 0.0;
  long k = 0;
  for (int i = 0; i < mask.n; ++i)
    for (int j = 0; j < mask.n; ++j)
      if (!mask.at(i, j)) {
        const double d = m_true(i, j) - m_hat(i, j);
        s += d * d;
        ++k;
      }
  if (k == 0) {
    // Nothing missing: average over every entry instead.
    return frobenius_mse(m_true, m_hat) /
           (static_cast<double>(mask.n) * mask.n);
  }
  return s / static_cast<double>(k);
}

}  // namespace ptreg
