#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrd/autocov.hpp"

namespace lrd {

/// Canonical correlation between two blocks plus the extremal weights,
/// normalized to unit block variance and sign-flipped so sum(u) >= 0.
struct CanonicalCorrResult {
  double rho = 0.0;
  std::vector<double> u;  // weights on the leading block (length a)
  std::vector<double> v;  // weights on the lagged block (length b)
  int iterations = 0;
  bool converged = true;
};

/// rho_{k,b}: the largest singular value of the whitened cross matrix
/// L^{-1} Sigma_{k,b} L^{-T} with Sigma_b = L L^T, singular vectors
/// back-transformed to the extremal weights.
CanonicalCorrResult canonical_correlation(const Autocov& gamma, std::int64_t k,
                                          std::int64_t b);

/// Rectangular variant with block sizes a (leading) and b (lagged).
CanonicalCorrResult canonical_correlation_rect(const Autocov& gamma,
                                               std::int64_t k, std::int64_t a,
                                               std::int64_t b);

/// Correlation of the two block sums: the u = v = (1,...,1) direction of
/// the same maximization, hence a lower bound for rho.
double block_sum_corr(const Autocov& gamma, std::int64_t k, std::int64_t b);

/// Canonical correlation of a multivariate process with uncorrelated
/// components: the maximum of the per-component values.
double multivariate_rho(std::span<const double> component_rhos);

}  // namespace lrd
