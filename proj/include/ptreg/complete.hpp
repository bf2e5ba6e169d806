#pragma once

#include <utility>
#include <vector>

#include "ptreg/train.hpp"

namespace ptreg {

/// Symmetric boolean mask over an n x n matrix; true marks an observed
/// entry. Must observe at least one entry.
struct ObservationMask {
  int n = 0;
  std::vector<std::uint8_t> observed;

  ObservationMask() = default;
  explicit ObservationMask(int side);
  static ObservationMask all(int side);

  bool at(int i, int j) const {
    return observed[static_cast<std::size_t>(i) * n + j] != 0;
  }
  void set(int i, int j, bool v) {
    observed[static_cast<std::size_t>(i) * n + j] = v ? 1 : 0;
    observed[static_cast<std::size_t>(j) * n + i] = v ? 1 : 0;
  }
  int count() const;
  void validate() const;  // symmetry + at least one observed entry
};

/// Block view of an n x n matrix: p x p grid of q x q blocks, n = p*q.
struct BlockLayout {
  int p = 0;
  int q = 0;
  int side() const { return p * q; }
};

struct BlockTrainingSet {
  Dataset data;                               // X = E_ij, Y = block (i, j)
  std::vector<EntryMask> masks;               // per-sample observed entries
  std::vector<std::pair<int, int>> block_ids; // (i, j) per sample
};

/// One training pair per block with at least one observed entry: the input
/// is the matrix unit E_ij of M_p, the target is block (i, j) with
/// unobserved entries zero-filled and excluded by the mask.
BlockTrainingSet block_training_set(const Mat& m_obs,
                                    const BlockLayout& layout,
                                    const ObservationMask& mask);

struct CompletionResult {
  Mat completed;
  StackedModel model;
  TrainLog log;
};

/// Fits a CP map on the observed blocks and reads the completed matrix off
/// the learned map's block outputs (the Choi matrix at depth 1). The
/// reconstruction is symmetrized; at depth 1 it is PSD up to round-off,
/// which is the theorem this module embodies. Deeper stacks complete too
/// but carry no PSD guarantee.
CompletionResult complete_matrix(const Mat& m_obs,
                                 const ObservationMask& mask,
                                 const BlockLayout& layout,
                                 const std::vector<LayerSpec>& arch,
                                 const TrainConfig& cfg);

/// Same, with missing entries marked NaN in m_obs (the matrix-file
/// convention). The missing pattern must be symmetric.
CompletionResult complete_matrix(const Mat& m_obs, const BlockLayout& layout,
                                 const std::vector<LayerSpec>& arch,
                                 const TrainConfig& cfg);

/// Mask whose observed entries are the non-NaN positions of m.
ObservationMask mask_from_nans(const Mat& m);

/// Mean squared error over the missing entries (mask false); over all
/// entries when the mask observes everything.
double completion_error(const Mat& m_true, const Mat& m_hat,
                        const ObservationMask& mask);

}  // namespace ptreg
