#include "lrd/subsample.hpp"

#include <algorithm>
#include <cmath>

#include "lrd/kernels.hpp"
#include "lrd/parallel.hpp"
#include "lrd/rng.hpp"
#include "lrd/simulate.hpp"
#include "lrd/special.hpp"

namespace lrd {

double self_normalizer(std::span<const double> y) {
  const std::size_t l = y.size();
  if (l == 0) throw ConfigError("self_normalizer: empty sequence");
  // S_t - (t/l) S_l accumulated in one pass.
  const double total = kernels::sum(y.data(), l);
  const double slope = total / static_cast<double>(l);
  double s = 0.0, acc = 0.0;
  for (std::size_t t = 1; t <= l; ++t) {
    s += y[t - 1];
    const double dev = s - slope * static_cast<double>(t);
    acc += dev * dev;
  }
  return std::sqrt(acc) / static_cast<double>(l);
}

MEstimate m_estimate(std::span<const double> series, const Psi& psi) {
  if (series.empty()) throw ConfigError("m_estimate: empty series");
  const auto [mn_it, mx_it] = std::minmax_element(series.begin(), series.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mn == mx) return {mn, true};

  if (psi.kind == Psi::Kind::sign) {
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double med = (n % 2 == 1)
                           ? sorted[n / 2]
                           : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return {med, false};
  }

  const double c = psi.c;
  auto h = [&](double x) {
    double s = 0.0;
    for (double v : series) s += std::clamp(v - x, -c, c);
    return s;
  };
  double lo = mn, hi = mx;
  const double tol = 1e-10 * (mx - mn);
  // h is nonincreasing with h(lo) >= 0 >= h(hi).
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

double sample_autocov(std::span<const double> series, std::int64_t m) {
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  if (!(m >= 0 && m < n)) {
    throw ConfigError("sample_autocov: need 0 <= m < n");
  }
  const double mean = kernels::sum(series.data(), series.size()) /
                      static_cast<double>(n);
  std::vector<double> centered(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) centered[i] = series[i] - mean;
  return kernels::dot(centered.data(), centered.data() + m,
                      static_cast<std::size_t>(n - m)) /
         static_cast<double>(n);
}

BlockStatistic BlockStatistic::sn_mean() {
  BlockStatistic s;
  s.kind_ = Kind::sn_mean;
  return s;
}

BlockStatistic BlockStatistic::sn_autocov(std::int64_t m) {
  if (m < 0) throw ConfigError("sn_autocov: lag must be >= 0");
  BlockStatistic s;
  s.kind_ = Kind::sn_autocov;
  s.m_ = m;
  return s;
}

BlockStatistic BlockStatistic::m_estimator(const Psi& psi) {
  BlockStatistic s;
  s.kind_ = Kind::m_estimator;
  s.psi_ = psi;
  return s;
}

BlockStatistic BlockStatistic::ecdf_sup(double tau_exponent) {
  BlockStatistic s;
  s.kind_ = Kind::ecdf_sup;
  s.tau_exp_ = tau_exponent;
  return s;
}

std::int64_t BlockStatistic::min_block() const {
  switch (kind_) {
    case Kind::sn_mean: return 2;
    case Kind::sn_autocov: return m_ + 2;
    case Kind::m_estimator: return 2;
    case Kind::ecdf_sup: return 1;
  }
  return 2;
}

FullSampleContext BlockStatistic::make_context(std::span<const double> series) const {
  FullSampleContext ctx;
  ctx.mean = kernels::sum(series.data(), series.size()) /
             static_cast<double>(series.size());
  switch (kind_) {
    case Kind::sn_autocov:
      ctx.autocov = sample_autocov(series, m_);
      break;
    case Kind::m_estimator:
      ctx.m_est = m_estimate(series, psi_).value;
      break;
    case Kind::ecdf_sup:
      ctx.sorted_sample.assign(series.begin(), series.end());
      std::sort(ctx.sorted_sample.begin(), ctx.sorted_sample.end());
      break;
    case Kind::sn_mean:
      break;
  }
  return ctx;
}

double BlockStatistic::evaluate(std::span<const double> block,
                                const FullSampleContext& ctx,
                                bool* degenerate) const {
  if (degenerate != nullptr) *degenerate = false;
  const std::int64_t b = static_cast<std::int64_t>(block.size());
  if (b < min_block()) {
    throw ConfigError("block statistic: block shorter than the statistic's "
                      "minimum length");
  }
  auto guarded = [&](double num, double w) {
    if (!(w > 0.0)) {
      if (degenerate != nullptr) *degenerate = true;
      return 0.0;
    }
    return num / w;
  };
  switch (kind_) {
    case Kind::sn_mean: {
      const double mean = kernels::sum(block.data(), block.size()) /
                          static_cast<double>(b);
      return guarded(mean - ctx.mean, self_normalizer(block));
    }
    case Kind::sn_autocov: {
      const double mean = kernels::sum(block.data(), block.size()) /
                          static_cast<double>(b);
      const std::size_t l = block.size() - static_cast<std::size_t>(m_);
      std::vector<double> prod(l);
      for (std::size_t i = 0; i < l; ++i) {
        prod[i] = (block[i] - mean) * (block[i + static_cast<std::size_t>(m_)] - mean);
      }
      const double g = kernels::sum(prod.data(), l) / static_cast<double>(b);
      return guarded(g - ctx.autocov, self_normalizer(prod));
    }
    case Kind::m_estimator: {
      const MEstimate est = m_estimate(block, psi_);
      if (est.degenerate) {
        if (degenerate != nullptr) *degenerate = true;
        return 0.0;
      }
      return guarded(est.value - ctx.m_est, self_normalizer(block));
    }
    case Kind::ecdf_sup: {
      std::vector<double> sorted(block.begin(), block.end());
      std::sort(sorted.begin(), sorted.end());
      const std::vector<double>& sample = ctx.sorted_sample;
      const double n = static_cast<double>(sample.size());
      const double bl = static_cast<double>(sorted.size());
      double sup = 0.0;
      std::size_t jb = 0;
      std::size_t i = 0;
      while (i < sample.size()) {
        // Advance over ties so both step functions are evaluated at x.
        std::size_t j = i;
        while (j + 1 < sample.size() && sample[j + 1] == sample[i]) ++j;
        const double x = sample[i];
        while (jb < sorted.size() && sorted[jb] <= x) ++jb;
        const double diff = std::fabs(static_cast<double>(jb) / bl -
                                      static_cast<double>(j + 1) / n);
        sup = std::max(sup, diff);
        i = j + 1;
      }
      return std::pow(bl, tau_exp_) * sup;
    }
  }
  throw ConfigError("block statistic: unknown kind");
}

SubsampleDistribution::SubsampleDistribution(std::vector<double> values,
                                             std::int64_t b, std::int64_t n,
                                             std::int64_t degenerate_count)
    : values_(std::move(values)), b_(b), n_(n), degenerate_(degenerate_count) {
  if (values_.empty()) throw ConfigError("SubsampleDistribution: empty");
  std::sort(values_.begin(), values_.end());
}

double SubsampleDistribution::ecdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

double SubsampleDistribution::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("quantile: q must lie in [0,1]");
  }
  const std::size_t n = values_.size();
  if (q <= 0.0) return values_.front();
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n))) - 1;
  return values_[std::min(idx, n - 1)];
}

SubsampleDistribution sliding_blocks_eval(std::span<const double> series,
                                          std::int64_t b,
                                          const BlockStatistic& stat,
                                          unsigned threads) {
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  if (!(b >= 1 && b <= n)) {
    throw ConfigError("sliding_blocks_eval: need 1 <= b <= n");
  }
  const FullSampleContext ctx = stat.make_context(series);
  const std::size_t windows = static_cast<std::size_t>(n - b + 1);
  std::vector<double> vals(windows);
  std::vector<unsigned char> degenerate(windows, 0);
  parallel_for(windows, threads, [&](std::size_t i) {
    bool dg = false;
    vals[i] = stat.evaluate(series.subspan(i, static_cast<std::size_t>(b)), ctx, &dg);
    degenerate[i] = dg ? 1 : 0;
  });
  std::int64_t dcount = 0;
  for (unsigned char d : degenerate) dcount += d;
  return SubsampleDistribution(std::move(vals), b, n, dcount);
}

namespace {

double full_sample_normalizer(std::span<const double> series,
                              const BlockStatistic& stat,
                              const FullSampleContext& ctx) {
  switch (stat.kind()) {
    case BlockStatistic::Kind::sn_mean:
    case BlockStatistic::Kind::m_estimator:
      return self_normalizer(series);
    case BlockStatistic::Kind::sn_autocov: {
      const std::size_t l = series.size() - static_cast<std::size_t>(stat.lag());
      std::vector<double> prod(l);
      for (std::size_t i = 0; i < l; ++i) {
        prod[i] = (series[i] - ctx.mean) *
                  (series[i + static_cast<std::size_t>(stat.lag())] - ctx.mean);
      }
      return self_normalizer(prod);
    }
    case BlockStatistic::Kind::ecdf_sup:
      throw ConfigError("subsample_ci: ecdf_sup has no interval form; use "
                        "ecdf_band");
  }
  throw ConfigError("unknown statistic kind");
}

double point_estimate(std::span<const double> series, const BlockStatistic& stat,
                      const FullSampleContext& ctx) {
  switch (stat.kind()) {
    case BlockStatistic::Kind::sn_mean: return ctx.mean;
    case BlockStatistic::Kind::sn_autocov: return ctx.autocov;
    case BlockStatistic::Kind::m_estimator: return ctx.m_est;
    case BlockStatistic::Kind::ecdf_sup: break;
  }
  throw ConfigError("subsample_ci: unsupported statistic");
  (void)series;
}

}  // namespace

CiResult subsample_ci(std::span<const double> series, std::int64_t b,
                      const BlockStatistic& stat, double level,
                      unsigned threads) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw ConfigError("subsample_ci: level must lie in [0,1)");
  }
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  if (!(b >= stat.min_block() && b < n)) {
    throw ConfigError("subsample_ci: need min_block <= b < n");
  }
  const FullSampleContext ctx = stat.make_context(series);
  CiResult out;
  out.point = point_estimate(series, stat, ctx);
  out.w_full = full_sample_normalizer(series, stat, ctx);
  if (level == 0.0) {
    out.ci = {out.point, out.point};
    return out;
  }
  const SubsampleDistribution dist = sliding_blocks_eval(series, b, stat, threads);
  out.degenerate_blocks = dist.degenerate_count();
  out.degenerate =
      dist.degenerate_count() == static_cast<std::int64_t>(dist.values().size());
  const double alpha = 1.0 - level;
  const double q_lo = dist.quantile(alpha / 2.0);
  const double q_hi = dist.quantile(1.0 - alpha / 2.0);
  out.ci = {out.point - q_hi * out.w_full, out.point - q_lo * out.w_full};
  return out;
}

ConfidenceBand ecdf_band(std::span<const double> series, std::int64_t b,
                         double level, double tau_exponent, unsigned threads) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("ecdf_band: level must lie in (0,1)");
  }
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  if (!(b >= 1 && b <= n)) throw ConfigError("ecdf_band: need 1 <= b <= n");
  const BlockStatistic stat = BlockStatistic::ecdf_sup(tau_exponent);
  const SubsampleDistribution dist = sliding_blocks_eval(series, b, stat, threads);
  ConfidenceBand band;
  band.s_alpha = dist.quantile(level);
  band.cutoff = band.s_alpha / std::pow(static_cast<double>(n), tau_exponent);
  band.xs.assign(series.begin(), series.end());
  std::sort(band.xs.begin(), band.xs.end());
  band.lower.resize(band.xs.size());
  band.upper.resize(band.xs.size());
  for (std::size_t i = 0; i < band.xs.size(); ++i) {
    // F_n at the i-th order statistic, ties collapsed rightward.
    std::size_t j = i;
    while (j + 1 < band.xs.size() && band.xs[j + 1] == band.xs[i]) ++j;
    const double fn = static_cast<double>(j + 1) / static_cast<double>(band.xs.size());
    band.lower[i] = std::max(fn - band.cutoff, 0.0);
    band.upper[i] = std::min(fn + band.cutoff, 1.0);
  }
  return band;
}

namespace {

double derive_true_value(const CoverageConfig& cfg) {
  if (cfg.true_value) return *cfg.true_value;
  const bool identity = !cfg.g || cfg.g->label == "identity";
  switch (cfg.stat.kind()) {
    case BlockStatistic::Kind::sn_mean: {
      if (identity) return 0.0;
      const double sd = std::sqrt(cfg.model.autocov(0));
      return normal_moment_adaptive(
                 [&](double z) { return cfg.g->g(sd * z); })
          .value;
    }
    case BlockStatistic::Kind::sn_autocov:
      if (!identity) {
        throw ConfigError("mc_coverage: sn_autocov truth is only known for "
                          "the identity map; pass true_value explicitly");
      }
      return cfg.model.autocov(cfg.stat.lag());
    case BlockStatistic::Kind::m_estimator:
      if (!identity) {
        throw ConfigError("mc_coverage: m_estimator truth requires "
                          "true_value for non-identity maps");
      }
      return 0.0;  // symmetric marginal, odd psi
    case BlockStatistic::Kind::ecdf_sup:
      break;
  }
  throw ConfigError("mc_coverage: unsupported statistic");
}

}  // namespace

CoverageReport mc_coverage(const CoverageConfig& cfg) {
  if (cfg.reps < 1) throw ConfigError("mc_coverage: reps must be >= 1");
  const double truth = derive_true_value(cfg);
  const PathGenerator gen(cfg.model, cfg.n, SimMethod::automatic);
  std::vector<unsigned char> covered(static_cast<std::size_t>(cfg.reps));
  std::vector<double> lengths(static_cast<std::size_t>(cfg.reps));
  std::vector<unsigned char> degenerate(static_cast<std::size_t>(cfg.reps), 0);
  parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t r) {
    std::vector<double> path = gen.generate(CounterRng::derive_stream(cfg.seed, r));
    if (cfg.g && cfg.g->label != "identity") {
      for (auto& x : path) x = cfg.g->g(x);
    }
    Interval ci;
    if (cfg.ci_override) {
      ci = cfg.ci_override(path);
    } else {
      const CiResult res = subsample_ci(path, cfg.b, cfg.stat, cfg.level, 1);
      ci = res.ci;
      degenerate[r] = res.degenerate ? 1 : 0;
    }
    covered[r] = (ci.lo <= truth && truth <= ci.hi) ? 1 : 0;
    lengths[r] = ci.hi - ci.lo;
  });
  CoverageReport rep;
  rep.reps = cfg.reps;
  rep.seed = cfg.seed;
  rep.true_value = truth;
  double cov = 0.0, len = 0.0;
  for (int r = 0; r < cfg.reps; ++r) {
    cov += covered[static_cast<std::size_t>(r)];
    len += lengths[static_cast<std::size_t>(r)];
    rep.degenerate_replications += degenerate[static_cast<std::size_t>(r)];
  }
  rep.coverage = cov / cfg.reps;
  rep.mean_length = len / cfg.reps;
  return rep;
}

VarianceCheckReport mc_variance_check(const VarianceCheckConfig& cfg) {
  if (cfg.reps < 2) throw ConfigError("mc_variance_check: reps must be >= 2");
  if (cfg.stat.kind() != BlockStatistic::Kind::sn_mean &&
      cfg.stat.kind() != BlockStatistic::Kind::sn_autocov) {
    throw ConfigError("mc_variance_check: supported statistics are sn_mean "
                      "and sn_autocov");
  }
  const bool identity = !cfg.g || cfg.g->label == "identity";
  // Oracle-centered context: the starred statistic uses the true parameter.
  FullSampleContext truth_ctx;
  if (cfg.stat.kind() == BlockStatistic::Kind::sn_mean) {
    if (identity) {
      truth_ctx.mean = 0.0;
    } else {
      const double sd = std::sqrt(cfg.model.autocov(0));
      truth_ctx.mean =
          normal_moment_adaptive([&](double z) { return cfg.g->g(sd * z); }).value;
    }
  } else {
    if (!identity) {
      throw ConfigError("mc_variance_check: sn_autocov requires the identity map");
    }
    truth_ctx.autocov = cfg.model.autocov(cfg.stat.lag());
  }

  const PathGenerator gen(cfg.model, cfg.n, SimMethod::automatic);
  const std::size_t windows = static_cast<std::size_t>(cfg.n - cfg.b + 1);
  std::vector<std::vector<double>> stats(static_cast<std::size_t>(cfg.reps));
  parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t r) {
    std::vector<double> path = gen.generate(CounterRng::derive_stream(cfg.seed, r));
    if (cfg.g && cfg.g->label != "identity") {
      for (auto& x : path) x = cfg.g->g(x);
    }
    std::vector<double> vals(windows);
    const FullSampleContext& ctx = truth_ctx;
    for (std::size_t i = 0; i < windows; ++i) {
      vals[i] = cfg.stat.evaluate(
          std::span<const double>(path).subspan(i, static_cast<std::size_t>(cfg.b)),
          ctx);
    }
    std::sort(vals.begin(), vals.end());
    stats[r] = std::move(vals);
  });

  // x grid from the pooled pilot replications.
  const int pilot = std::min(cfg.pilot_reps, cfg.reps);
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(pilot) * windows);
  for (int r = 0; r < pilot; ++r) {
    pooled.insert(pooled.end(), stats[static_cast<std::size_t>(r)].begin(),
                  stats[static_cast<std::size_t>(r)].end());
  }
  std::sort(pooled.begin(), pooled.end());
  VarianceCheckReport rep;
  rep.reps = cfg.reps;
  for (double q : cfg.x_quantiles) {
    if (!(q > 0.0 && q < 1.0)) {
      throw ConfigError("mc_variance_check: x quantiles must lie in (0,1)");
    }
    const std::size_t idx = std::min(
        pooled.size() - 1,
        static_cast<std::size_t>(std::ceil(q * static_cast<double>(pooled.size()))) - 1);
    rep.xs.push_back(pooled[idx]);
  }

  for (double x : rep.xs) {
    // F*_r(x) per replication, then central moments across replications.
    std::vector<double> f(static_cast<std::size_t>(cfg.reps));
    for (int r = 0; r < cfg.reps; ++r) {
      const auto& v = stats[static_cast<std::size_t>(r)];
      const auto it = std::upper_bound(v.begin(), v.end(), x);
      f[static_cast<std::size_t>(r)] =
          static_cast<double>(it - v.begin()) / static_cast<double>(windows);
    }
    const double r_n = static_cast<double>(cfg.reps);
    const double mean = kernels::sum(f.data(), f.size()) / r_n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : f) {
      const double d = v - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    const double var = m2 / (r_n - 1.0);
    m2 /= r_n;
    m4 /= r_n;
    // SE of the sample variance from the fourth moment.
    const double var_of_var =
        (m4 - (r_n - 3.0) / (r_n - 1.0) * m2 * m2) / r_n;
    rep.variance.push_back(var);
    rep.variance_se.push_back(std::sqrt(std::max(var_of_var, 0.0)));
  }

  rep.rho_sum = rho_sum(cfg.model, cfg.n - cfg.b + 1, cfg.b, cfg.rho_opts);
  rep.bound = 2.0 / static_cast<double>(cfg.n - cfg.b + 1) * rep.rho_sum;
  return rep;
}

}  // namespace lrd
