#include "ptreg/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptreg {

double pseudo_dim_bound(int p, int q, int r) {
  if (p < 1 || q < 1 || r < 1)
    throw std::invalid_argument("pseudo_dim_bound: p, q, r must be >= 1");
  const double pq = static_cast<double>(p) * q;
  if (r > p * q)
    throw std::invalid_argument("pseudo_dim_bound: r = " + std::to_string(r) +
                                " exceeds p*q = " + std::to_string(p * q));
  const double e = std::exp(1.0);
  return pq * r * std::log(8.0 * e * pq / r);
}

double generalization_gap(const BoundInputs& in) {
  const double dim = pseudo_dim_bound(in.p, in.q, in.r);  // validates p, q, r
  const double pqr =
      static_cast<double>(in.p) * in.q * in.r;
  if (static_cast<double>(in.l) <= pqr)
    throw std::invalid_argument(
        "generalization_gap: bound vacuous at this sample size (need l > " +
        std::to_string(static_cast<long>(pqr)) + ", got " +
        std::to_string(in.l) + ")");
  if (in.delta <= 0.0 || in.delta > 1.0)
    throw std::invalid_argument("generalization_gap: delta must be in (0, 1]");
  if (in.gamma <= 0.0)
    throw std::invalid_argument("generalization_gap: gamma must be > 0");

  const double l = static_cast<double>(in.l);
  const double capacity = std::sqrt(dim * std::log(l / pqr) / l);
  const double confidence = std::sqrt(std::log(1.0 / in.delta) / (2.0 * l));
  return in.gamma * (capacity + confidence);
}

}  // namespace ptreg
