#pragma once

#include <stdexcept>
#include <vector>

#include "ptreg/mat.hpp"

namespace ptreg {

/// Completely positive map M_p -> M_q stored as Kraus operators:
/// Phi(X) = sum_j A_j X A_j^T with each A_j of shape q x p. The stored
/// operator count may exceed p*q (over-parametrized representations are
/// legal and common when fitting); the Kraus rank of the map itself never
/// exceeds p*q.
struct KrausLayer {
  int p = 0;
  int q = 0;
  std::vector<Mat> kraus;

  KrausLayer() = default;
  KrausLayer(int p_in, int q_out, std::vector<Mat> operators);

  int r() const { return static_cast<int>(kraus.size()); }
};

/// The map's matrix avatar: the pq x pq block matrix with (i, j) block
/// Phi(E_ij). Symmetric for real Kraus maps; PSD iff the map is completely
/// positive. Blocks are q x q, indexed by i, j < p.
struct ChoiMatrix {
  int p = 0;
  int q = 0;
  Mat mat;
};

/// Single-operator form Phi(X) = tr_m(A X A^T) with A of shape qm x p.
struct StinespringForm {
  int p = 0;
  int q = 0;
  int m = 0;
  Mat a;
};

/// Thrown when a Choi matrix fails the PSD test that characterizes complete
/// positivity. Carries the offending eigenvalue.
struct NotCompletelyPositiveError : std::runtime_error {
  double min_eigenvalue;
  explicit NotCompletelyPositiveError(double min_eig);
};

/// Phi(X) = sum_j A_j X A_j^T. X need not be symmetric; PSD in gives PSD out.
Mat apply(const KrausLayer& layer, const Mat& x);

ChoiMatrix choi(const KrausLayer& layer);

/// Factor a PSD Choi matrix back into Kraus operators: eigenvectors with
/// eigenvalue > tol become operators, scaled by sqrt(eigenvalue). Eigenvector
/// entries are read as p consecutive q-slices, slice i being column i of the
/// operator (the transposed convention would silently build the adjoint
/// map). A zero Choi matrix yields a single zero operator. Throws
/// NotCompletelyPositiveError when the min eigenvalue is below -tol.
KrausLayer kraus_from_choi(const ChoiMatrix& c, double tol = 1e-10);

/// Stinespring form with dilation dimension m equal to the stored operator
/// count: row (s*m + u) of A is row s of operator u.
StinespringForm to_stinespring(const KrausLayer& layer);

/// tr_m(A X A^T) via the partial trace.
Mat apply_stinespring(const StinespringForm& sf, const Mat& x);

/// Minimal operator count over equivalent representations: the number of
/// Choi eigenvalues above tol * (largest eigenvalue). At most p*q.
int kraus_rank(const KrausLayer& layer, double tol = 1e-9);

}  // namespace ptreg
