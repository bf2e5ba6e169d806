#pragma once

#include <cstdint>
#include <optional>

#include "ptreg/complete.hpp"
#include "ptreg/train.hpp"

namespace ptreg {

enum class InputLaw { psd, gaussian };

/// Ground truth for a synthetic regression task. When `general_b` is set
/// (depth-1 only), targets come from the two-parameter form
/// sum_u A_u X B_u^T instead of the CP form; such data is generated for
/// robustness experiments but the learner stays CP-constrained.
struct SyntheticTask {
  StackedModel true_map;
  std::optional<KrausLayer> general_b;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// r operators with IID Gaussian entries, std = scale (negative selects
/// 1/sqrt(p*r); zero plants the zero map). r > p*q is allowed
/// (over-parametrized draw).
KrausLayer random_kraus_map(int p, int q, int r, std::uint64_t seed,
                            double scale = -1.0);

/// Normalized Gram matrix G G^T / p with G standard Gaussian p x p.
Mat random_psd(int p, std::uint64_t seed);

Mat random_gaussian(int rows, int cols, std::uint64_t seed);

/// Draws n inputs under the given law and labels them with the task map,
/// plus symmetric Gaussian noise sigma * (N + N^T)/2 when sigma > 0.
Dataset synth_dataset(const SyntheticTask& task, int n,
                      InputLaw law = InputLaw::psd);

/// Choi matrix of a random rank-r map: a planted PSD completion target of
/// side p*q with rank at most r.
Mat planted_choi_target(int p, int q, int r, std::uint64_t seed);

/// Mask hiding `offdiag_pairs` random off-diagonal block pairs (both (i,j)
/// and (j,i)) and `diag_blocks` random diagonal blocks.
ObservationMask block_missing_mask(const BlockLayout& layout,
                                   int offdiag_pairs, int diag_blocks,
                                   std::uint64_t seed);

/// Symmetric entrywise mask with roughly `missing_frac` of the upper
/// triangle (diagonal included) hidden; always keeps at least one entry.
ObservationMask random_entry_mask(int n, double missing_frac,
                                  std::uint64_t seed);

}  // namespace ptreg
