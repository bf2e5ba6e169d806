#pragma once

#include <cstdint>

namespace ptreg {

/// Inputs for the capacity and generalization-gap calculators. gamma bounds
/// the per-entry loss; delta is the confidence level.
struct BoundInputs {
  int p = 0;
  int q = 0;
  int r = 0;
  long l = 0;
  double gamma = 1.0;
  double delta = 0.05;
};

/// Pseudo-dimension bound for rank-r CP maps M_p -> M_q:
/// p*q*r*ln(8*e*p*q/r). Natural-log convention throughout. Requires r <= pq.
double pseudo_dim_bound(int p, int q, int r);

/// High-probability excess-risk gap:
///   gamma*sqrt(pqr*ln(8epq/r)*ln(l/(pqr))/l) + gamma*sqrt(ln(1/delta)/(2l)).
/// Requires l > pqr (the bound is vacuous otherwise) and delta in (0, 1].
double generalization_gap(const BoundInputs& in);

}  // namespace ptreg
