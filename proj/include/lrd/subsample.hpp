#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lrd/bounds.hpp"
#include "lrd/models.hpp"

namespace lrd {

/// Partial-sum self-normalizer of a sequence y_1..y_l:
/// W^2 = l^{-2} sum_t (S_t - (t/l) S_l)^2 with S_t the partial sums.
/// Scale-free up to the common factor and zero exactly when y is constant.
double self_normalizer(std::span<const double> y);

/// Monotone estimating functions for the M-estimator.
struct Psi {
  enum class Kind { sign, huber };
  Kind kind = Kind::huber;
  double c = 1.345;  // huber clip

  static Psi sign() { return {Kind::sign, 0.0}; }
  static Psi huber(double c) { return {Kind::huber, c}; }
};

struct MEstimate {
  double value = 0.0;
  bool degenerate = false;  // constant input: no sign change to bracket
};

/// Root of sum_i psi(x_i - x) = 0. The sign psi returns the sample median
/// (midpoint of the root interval); huber uses bisection on
/// [min(x), max(x)] to 1e-10 * range.
MEstimate m_estimate(std::span<const double> series, const Psi& psi);

/// Plug-in sample autocovariance with divisor n:
/// (1/n) sum_{i=1}^{n-m} (x_i - mean)(x_{i+m} - mean).
double sample_autocov(std::span<const double> series, std::int64_t m);

/// Full-sample plug-ins handed to every block evaluation.
struct FullSampleContext {
  double mean = 0.0;
  double autocov = 0.0;     // gamma_hat_n(m) for sn_autocov
  double m_est = 0.0;       // full-sample M-estimate for m_estimator
  std::vector<double> sorted_sample;  // for ecdf_sup
};

/// A statistic evaluated on one sliding block given the full-sample context.
class BlockStatistic {
 public:
  enum class Kind { sn_mean, sn_autocov, m_estimator, ecdf_sup };

  static BlockStatistic sn_mean();
  static BlockStatistic sn_autocov(std::int64_t m);
  static BlockStatistic m_estimator(const Psi& psi);
  /// S_k = b^{tau_exponent} * sup_x |F_block(x) - F_n(x)|, sup over the
  /// sample points.
  static BlockStatistic ecdf_sup(double tau_exponent = 0.5);

  Kind kind() const { return kind_; }
  std::int64_t lag() const { return m_; }
  double tau_exponent() const { return tau_exp_; }
  const Psi& psi() const { return psi_; }

  /// Minimal admissible block length.
  std::int64_t min_block() const;

  FullSampleContext make_context(std::span<const double> series) const;

  /// One block value; sets *degenerate when the 0/0 guard fired (constant
  /// block, statistic mapped to 0).
  double evaluate(std::span<const double> block, const FullSampleContext& ctx,
                  bool* degenerate = nullptr) const;

 private:
  Kind kind_ = Kind::sn_mean;
  std::int64_t m_ = 0;
  double tau_exp_ = 0.5;
  Psi psi_;
};

/// Empirical distribution of a block statistic over all n-b+1 windows.
class SubsampleDistribution {
 public:
  SubsampleDistribution(std::vector<double> values, std::int64_t b,
                        std::int64_t n, std::int64_t degenerate_count);

  /// Right-continuous ECDF.
  double ecdf(double x) const;
  /// Left-continuous inverse: smallest value v with ecdf(v) >= q.
  double quantile(double q) const;

  std::span<const double> values() const { return values_; }  // ascending
  std::int64_t block_size() const { return b_; }
  std::int64_t sample_size() const { return n_; }
  std::int64_t degenerate_count() const { return degenerate_; }

 private:
  std::vector<double> values_;
  std::int64_t b_ = 0, n_ = 0, degenerate_ = 0;
};

/// Evaluate the statistic on every window of length b; context computed
/// once from the full series. Window evaluations run in parallel and are
/// merged by window index.
SubsampleDistribution sliding_blocks_eval(std::span<const double> series,
                                          std::int64_t b,
                                          const BlockStatistic& stat,
                                          unsigned threads = 0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct CiResult {
  Interval ci;
  double point = 0.0;    // full-sample estimate
  double w_full = 0.0;   // full-sample self-normalizer
  std::int64_t degenerate_blocks = 0;
  bool degenerate = false;  // every block hit the 0/0 guard
};

/// Subsampling confidence interval
/// [point - q_{1-a/2} W_n, point - q_{a/2} W_n] from the quantiles of the
/// self-normalized block statistic. level = 0 collapses to the point.
CiResult subsample_ci(std::span<const double> series, std::int64_t b,
                      const BlockStatistic& stat, double level,
                      unsigned threads = 0);

struct ConfidenceBand {
  std::vector<double> xs;      // sorted sample values
  std::vector<double> lower;   // max(F_n - cutoff, 0)
  std::vector<double> upper;   // min(F_n + cutoff, 1)
  double cutoff = 0.0;         // s_alpha / n^{tau_exponent}
  double s_alpha = 0.0;        // empirical level-quantile of the S_k
};

/// Uniform confidence band for the marginal distribution from the
/// subsample sup-distance statistics.
ConfidenceBand ecdf_band(std::span<const double> series, std::int64_t b,
                         double level, double tau_exponent = 0.5,
                         unsigned threads = 0);

struct CoverageConfig {
  CovarianceModel model;
  std::optional<SubordinationMap> g;  // identity when absent
  std::int64_t n = 0;
  std::int64_t b = 0;
  BlockStatistic stat = BlockStatistic::sn_mean();
  double level = 0.9;
  int reps = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<double> true_value;  // derived from the model when absent
  /// Test hook replacing the CI construction.
  std::function<Interval(std::span<const double>)> ci_override;
};

struct CoverageReport {
  double coverage = 0.0;
  double mean_length = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  double true_value = 0.0;
  std::int64_t degenerate_replications = 0;
};

/// Monte Carlo coverage of the subsampling CI; replication r uses the
/// derived stream r of the seed and results reduce in replication order.
CoverageReport mc_coverage(const CoverageConfig& cfg);

struct VarianceCheckConfig {
  CovarianceModel model;
  std::optional<SubordinationMap> g;
  std::int64_t n = 0;
  std::int64_t b = 0;
  BlockStatistic stat = BlockStatistic::sn_mean();
  int reps = 200;
  int pilot_reps = 50;                   // pooled to locate the x grid
  std::vector<double> x_quantiles{0.5};  // of the pooled pilot values
  std::uint64_t seed = 1;
  unsigned threads = 0;
  DiagOptions rho_opts;
};

struct VarianceCheckReport {
  std::vector<double> xs;
  std::vector<double> variance;     // MC Var[F*_{n,b}(x)]
  std::vector<double> variance_se;  // moment-based standard error
  double rho_sum = 0.0;             // sum_{k=0}^{n-b+1} rho_{k,b}
  double bound = 0.0;               // 2/(n-b+1) * rho_sum
  int reps = 0;
};

/// Compares the Monte Carlo variance of the oracle-centered subsample ECDF
/// (the statistic uses the true parameter) against the canonical-correlation
/// sum bound.
VarianceCheckReport mc_variance_check(const VarianceCheckConfig& cfg);

}  // namespace lrd
