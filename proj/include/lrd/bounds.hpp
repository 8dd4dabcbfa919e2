#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrd/autocov.hpp"
#include "lrd/models.hpp"

namespace lrd {

/// Tail maximum M_gamma(j) = max_{n > j} |gamma(n)|, searched over the
/// window (j, j + 10 b] (capped at 1e5 lags and at the table length). The
/// in-scope models have eventually decreasing positive tails, so the window
/// maximum is the true supremum.
double m_gamma(const Autocov& gamma, std::int64_t j, std::int64_t b);

/// Crude bound b * M_gamma(k-b) / lambda_b, k > b. lambda_b is the smallest
/// eigenvalue of Sigma_b; the overload without it computes it on the fly.
double crude_bound(const Autocov& gamma, std::int64_t k, std::int64_t b);
double crude_bound(const Autocov& gamma, std::int64_t k, std::int64_t b,
                   double lambda_b);

/// Two-term Betken-Wendler-style bound
/// C1 (b/(k-b))^{1-2d} L + C2 b^2 (k-b)^{2d-2} max(L, 1), k > b,
/// with the slowly varying factor frozen at the constant L.
double bw_bound(double d, double lgamma_const, std::int64_t k, std::int64_t b,
                double c1, double c2);

/// Pure FARIMA(0,d,0) shape C (b/(k-b))^{1-2d}, 1 <= b < k.
double farima_bound(double d, std::int64_t k, std::int64_t b, double c);

/// Two-term general bound: c1 (b/(k'-b))^{1-2d} plus a second term that
/// depends on the decay class of the short-memory factor:
///   poly-O / poly-o: c2 k' k^{-alpha}   (alpha = alpha_or_rate)
///   exponential:     c2 exp(-c3 k)
/// Requires 1 <= b < k' <= (1-eps) k.
double main_bound(double d, std::int64_t k, std::int64_t kprime, std::int64_t b,
                  Gamma0Decay regime, double alpha_or_rate, double c1,
                  double c2, double c3, double eps = 0.1);

/// Numerical estimate of L = lim gamma(n) n^{1-2d} for a model with a
/// convergent normalized tail.
double lgamma_const(const CovarianceModel& model);

using ShapeFn = std::function<double(std::int64_t k, std::int64_t b)>;

/// Empirical constant for a bound shape: C = max over the grid of
/// rho(k,b) / shape(k,b). Grid cells must satisfy k > b.
double calibrate_constant(const Autocov& gamma, const ShapeFn& shape,
                          std::span<const std::pair<std::int64_t, std::int64_t>> grid,
                          unsigned threads = 0);

/// One row of the bound table emitted by the sweep driver.
struct BoundReport {
  std::int64_t k = 0;
  std::int64_t kprime = 0;
  std::int64_t b = 0;
  double d = 0.0;
  double rho = 0.0;
  double block_sum_lower = 0.0;
  double crude = 0.0;
  double bw = 0.0;
  double farima = 0.0;
  double main = 0.0;
  Gamma0Decay regime = Gamma0Decay::exponential;
};

struct CalibratedConstants {
  double c_farima = 1.0;
  double c_bw = 1.0;
  double c_main = 1.0;
  double c3 = 1.0;  // exponential rate of the main bound's second term
  std::string provenance;
};

struct BoundsTable {
  std::vector<BoundReport> rows;  // sorted by (b, k)
  CalibratedConstants constants;
  std::int64_t excluded = 0;  // cells dropped because k <= b
};

struct BoundsOptions {
  std::int64_t kprime_m = 4;  // k' = min(b*(m+1), floor((1-eps) k))
  double eps = 0.1;
  unsigned threads = 0;
};

/// Sweep rho and every bound over the (k, b) grid. Constants are calibrated
/// on the lower half of the b grid (k >= 2b cells) and reused verbatim on
/// the rest; the provenance string records the split.
BoundsTable bounds_table(const CovarianceModel& model,
                         std::span<const std::int64_t> k_grid,
                         std::span<const std::int64_t> b_grid,
                         const BoundsOptions& opts = {});

/// Subsampling-condition diagnostic row: the Cesaro mean of rho_{k,b_n}
/// over k = 1..n and the maximum over the tail window [eps n, n].
struct DiagRow {
  std::int64_t n = 0;
  std::int64_t b = 0;
  double mean_rho = 0.0;
  double max_window_rho = 0.0;
};

struct DiagOptions {
  double epsilon = 0.1;
  std::int64_t k_dense_cap = 512;  // exact evaluation for k <= min(4b, cap)
  int grid_points = 32;            // geometric grid beyond the dense range
  bool exact = false;              // evaluate every k (small n only)
  unsigned threads = 0;
};

using RhoFn = std::function<double(std::int64_t k, std::int64_t b)>;

/// Diagnostic with an injectable rho evaluator (tests feed degenerate ones).
/// Beyond the dense range, the sum uses the conservative monotone envelope:
/// each k between grid points contributes the larger neighboring value.
std::vector<DiagRow> subsampling_condition_diag(
    const RhoFn& rho, std::span<const std::int64_t> n_list,
    const std::function<std::int64_t(std::int64_t)>& block_rule,
    const DiagOptions& opts = {});

/// Model-driven variant: rho evaluated by the whitened-SVD solver.
std::vector<DiagRow> subsampling_condition_diag(
    const CovarianceModel& model, std::span<const std::int64_t> n_list,
    const std::function<std::int64_t(std::int64_t)>& block_rule,
    const DiagOptions& opts = {});

/// Sum_{k=0}^{kmax} rho_{k,b} (rho_0 = 1) with the same dense-plus-envelope
/// evaluation scheme as the diagnostic; feeds the variance bound of the
/// subsampling ECDF.
double rho_sum(const CovarianceModel& model, std::int64_t kmax, std::int64_t b,
               const DiagOptions& opts = {});

}  // namespace lrd
