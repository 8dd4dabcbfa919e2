#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrd/autocov.hpp"
#include "lrd/matrix.hpp"

namespace lrd {

/// Symmetric Toeplitz covariance matrix of one block, stored by its first
/// row gamma(0..b-1).
struct SymToeplitz {
  std::vector<double> first_row;
  std::size_t dim = 0;

  double at(std::size_t i, std::size_t j) const {
    return first_row[i >= j ? i - j : j - i];
  }
};

/// Cross-block covariance: entry(i1,i2) = gamma(i2 + k - i1) for blocks of
/// sizes a (rows) and b (columns) separated by lag k.
struct CrossBlock {
  Matrix m;
  std::int64_t k = 0;
};

SymToeplitz build_sigma(const Autocov& gamma, std::int64_t b);
CrossBlock build_cross(const Autocov& gamma, std::int64_t k, std::int64_t a,
                       std::int64_t b);

/// Lower Cholesky factor, S = L L^T. Throws NumericalError naming the first
/// failing pivot on non-positive-definite input.
Matrix cholesky(const SymToeplitz& S);

/// x <- L^{-1} x (forward substitution).
void trsv_lower(const Matrix& L, std::span<double> x);
/// x <- L^{-T} x (back substitution on the transpose).
void trsv_lower_transposed(const Matrix& L, std::span<double> x);

/// Best-linear-predictor weights: phi[j-1] multiplies the value j lags
/// before the predicted index, j = 1..b.
struct PredictorCoeffs {
  std::vector<double> phi;
  std::int64_t b = 0;
  std::int64_t horizon = 0;  // predicted index, >= b+1
};

/// One-step predictor (horizon b+1) by the Levinson-Durbin recursion.
PredictorCoeffs levinson_predictor(const Autocov& gamma, std::int64_t b);

/// Projection weights of Z_n onto Z_1..Z_b (n >= b+1) by a direct
/// Yule-Walker solve through the Cholesky factor.
PredictorCoeffs multistep_predictor(const Autocov& gamma, std::int64_t b,
                                    std::int64_t n);

struct ExtremeEigs {
  double min = 0.0;
  double max = 0.0;
  int iterations_min = 0;
  int iterations_max = 0;
  bool converged = true;
};

/// Extreme eigenvalues by forward power iteration (max) and inverse power
/// iteration through the Cholesky factor (min); Rayleigh-quotient stopping
/// at 1e-10 relative change, iteration cap 1e4.
ExtremeEigs extreme_eigs(const SymToeplitz& S);

}  // namespace lrd
