#include "lrd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lrd/cancorr.hpp"
#include "lrd/parallel.hpp"
#include "lrd/toeplitz.hpp"

namespace lrd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double pow_ratio(double d, std::int64_t b, std::int64_t gap) {
  return std::pow(static_cast<double>(b) / static_cast<double>(gap), 1.0 - 2.0 * d);
}

}  // namespace

double m_gamma(const Autocov& gamma, std::int64_t j, std::int64_t b) {
  if (j < 0) throw ConfigError("m_gamma: window start must be >= 0");
  std::int64_t tail = std::min<std::int64_t>(10 * b, 100000);
  std::int64_t hi = std::min(j + tail, gamma.max_lag());
  if (hi <= j) {
    throw ConfigError("m_gamma: autocovariance table too short for lag " +
                      std::to_string(j + 1));
  }
  double m = 0.0;
  for (std::int64_t n = j + 1; n <= hi; ++n) m = std::max(m, std::fabs(gamma(n)));
  return m;
}

double crude_bound(const Autocov& gamma, std::int64_t k, std::int64_t b,
                   double lambda_b) {
  if (k <= b) throw ConfigError("crude_bound: requires k > b");
  return static_cast<double>(b) * m_gamma(gamma, k - b, b) / lambda_b;
}

double crude_bound(const Autocov& gamma, std::int64_t k, std::int64_t b) {
  const ExtremeEigs eig = extreme_eigs(build_sigma(gamma, b));
  return crude_bound(gamma, k, b, eig.min);
}

double bw_bound(double d, double lgamma_c, std::int64_t k, std::int64_t b,
                double c1, double c2) {
  if (k <= b) throw ConfigError("bw_bound: requires k > b");
  const double gap = static_cast<double>(k - b);
  return c1 * pow_ratio(d, b, k - b) * lgamma_c +
         c2 * static_cast<double>(b) * static_cast<double>(b) *
             std::pow(gap, 2.0 * d - 2.0) * std::max(lgamma_c, 1.0);
}

double farima_bound(double d, std::int64_t k, std::int64_t b, double c) {
  if (!(b >= 1 && b < k)) throw ConfigError("farima_bound: requires 1 <= b < k");
  return c * pow_ratio(d, b, k - b);
}

double main_bound(double d, std::int64_t k, std::int64_t kprime, std::int64_t b,
                  Gamma0Decay regime, double alpha_or_rate, double c1,
                  double c2, double c3, double eps) {
  if (!(b >= 1 && b < kprime &&
        static_cast<double>(kprime) <= (1.0 - eps) * static_cast<double>(k))) {
    throw ConfigError("main_bound: requires 1 <= b < k' <= (1-eps) k");
  }
  const double first = c1 * pow_ratio(d, b, kprime - b);
  double second = 0.0;
  switch (regime) {
    case Gamma0Decay::poly_O:
    case Gamma0Decay::poly_o:
      second = c2 * static_cast<double>(kprime) *
               std::pow(static_cast<double>(k), -alpha_or_rate);
      break;
    case Gamma0Decay::exponential:
      second = c2 * std::exp(-c3 * static_cast<double>(k));
      break;
  }
  return first + second;
}

double lgamma_const(const CovarianceModel& model) {
  const std::int64_t n = 100000;
  const double d = model.memory_d();
  return model.autocov(n) * std::pow(static_cast<double>(n), 1.0 - 2.0 * d);
}

double calibrate_constant(const Autocov& gamma, const ShapeFn& shape,
                          std::span<const std::pair<std::int64_t, std::int64_t>> grid,
                          unsigned threads) {
  if (grid.empty()) throw ConfigError("calibrate_constant: empty grid");
  std::vector<double> ratio(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    const auto [k, b] = grid[i];
    if (k <= b) throw ConfigError("calibrate_constant: grid cell with k <= b");
    const double rho = canonical_correlation(gamma, k, b).rho;
    ratio[i] = rho / shape(k, b);
  });
  return *std::max_element(ratio.begin(), ratio.end());
}

BoundsTable bounds_table(const CovarianceModel& model,
                         std::span<const std::int64_t> k_grid,
                         std::span<const std::int64_t> b_grid,
                         const BoundsOptions& opts) {
  if (k_grid.empty() || b_grid.empty()) {
    throw ConfigError("bounds_table: empty grid");
  }
  const double d = model.memory_d();
  const Gamma0Decay regime = model.gamma0_decay();
  const double alpha = model.gamma0_alpha();
  const double lg = lgamma_const(model);

  std::int64_t max_k = *std::max_element(k_grid.begin(), k_grid.end());
  std::int64_t max_b = *std::max_element(b_grid.begin(), b_grid.end());
  const Autocov gamma = model.autocov_table(
      std::max(max_k + max_b, 10 * max_b + 1));

  BoundsTable out;
  out.constants.c3 = model.ar_root_margin() < std::numeric_limits<double>::infinity()
                         ? 0.9 * std::log(model.ar_root_margin())
                         : 1.0;

  std::vector<std::pair<std::int64_t, std::int64_t>> cells;  // (b, k)
  std::vector<std::int64_t> bs(b_grid.begin(), b_grid.end());
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  for (std::int64_t b : bs) {
    std::vector<std::int64_t> ks(k_grid.begin(), k_grid.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (std::int64_t k : ks) {
      if (k <= b) {
        ++out.excluded;
        continue;
      }
      cells.emplace_back(b, k);
    }
  }

  struct Cell {
    double rho, lower, lambda_b;
  };
  std::vector<Cell> vals(cells.size());
  // lambda_b once per b.
  std::vector<double> lambda_of_b(bs.size());
  parallel_for(bs.size(), opts.threads, [&](std::size_t i) {
    lambda_of_b[i] = extreme_eigs(build_sigma(gamma, bs[i])).min;
  });
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    const auto [b, k] = cells[i];
    vals[i].rho = canonical_correlation(gamma, k, b).rho;
    vals[i].lower = block_sum_corr(gamma, k, b);
    const std::size_t bi = static_cast<std::size_t>(
        std::lower_bound(bs.begin(), bs.end(), b) - bs.begin());
    vals[i].lambda_b = lambda_of_b[bi];
  });

  // Calibrate on the lower half of the b grid, k >= 2b; validate elsewhere.
  const std::int64_t b_half = bs[(bs.size() - 1) / 2];
  double c_farima = 0.0, c_bw = 0.0, c_main = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [b, k] = cells[i];
    if (b > b_half || k < 2 * b) continue;
    c_farima = std::max(c_farima, vals[i].rho / farima_bound(d, k, b, 1.0));
    c_bw = std::max(c_bw, vals[i].rho / bw_bound(d, lg, k, b, 1.0, 1.0));
    const std::int64_t kp = std::min<std::int64_t>(
        b * (opts.kprime_m + 1),
        static_cast<std::int64_t>((1.0 - opts.eps) * static_cast<double>(k)));
    if (kp > b) {
      c_main = std::max(
          c_main, vals[i].rho / pow_ratio(d, b, kp - b));
    }
  }
  if (c_farima == 0.0) {
    throw ConfigError("bounds_table: no calibration cells (need k >= 2b on "
                      "the lower half of the b grid)");
  }
  out.constants.c_farima = c_farima;
  out.constants.c_bw = c_bw;
  out.constants.c_main = c_main;
  out.constants.provenance =
      "constants calibrated as max rho/shape over cells with b <= " +
      std::to_string(b_half) + " and k >= 2b; L_gamma = " + std::to_string(lg);

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [b, k] = cells[i];
    BoundReport r;
    r.k = k;
    r.b = b;
    r.d = d;
    r.regime = regime;
    r.rho = vals[i].rho;
    r.block_sum_lower = vals[i].lower;
    r.crude = crude_bound(gamma, k, b, vals[i].lambda_b);
    r.bw = bw_bound(d, lg, k, b, c_bw, c_bw);
    r.farima = farima_bound(d, k, b, c_farima);
    const std::int64_t kp = std::min<std::int64_t>(
        b * (opts.kprime_m + 1),
        static_cast<std::int64_t>((1.0 - opts.eps) * static_cast<double>(k)));
    if (kp > b) {
      r.kprime = kp;
      r.main = main_bound(d, k, kp, b, regime, alpha, c_main, c_main,
                          out.constants.c3, opts.eps);
    } else {
      r.kprime = 0;
      r.main = kNan;
    }
    out.rows.push_back(r);
  }
  return out;
}

namespace {

struct SweepResult {
  double sum = 0.0;                                   // sum over k = 1..kmax
  std::vector<std::pair<std::int64_t, double>> pts;   // evaluated (k, rho)
};

SweepResult sweep_rho(const RhoFn& rho, std::int64_t kmax, std::int64_t b,
                      const DiagOptions& opts) {
  SweepResult res;
  const std::int64_t dense_hi =
      opts.exact ? kmax : std::min(kmax, std::min<std::int64_t>(4 * b, opts.k_dense_cap));
  std::vector<double> dense(static_cast<std::size_t>(dense_hi));
  parallel_for(dense.size(), opts.threads, [&](std::size_t i) {
    dense[i] = rho(static_cast<std::int64_t>(i) + 1, b);
  });
  res.pts.reserve(dense.size() + 40);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    res.sum += dense[i];
    res.pts.emplace_back(static_cast<std::int64_t>(i) + 1, dense[i]);
  }
  if (dense_hi >= kmax) return res;

  // Geometric grid from dense_hi to kmax, conservative envelope in between.
  std::set<std::int64_t> grid{dense_hi, kmax};
  const double lo = static_cast<double>(dense_hi);
  const double ratio = static_cast<double>(kmax) / lo;
  for (int i = 1; i < opts.grid_points; ++i) {
    grid.insert(static_cast<std::int64_t>(std::llround(
        lo * std::pow(ratio, static_cast<double>(i) / opts.grid_points))));
  }
  std::vector<std::int64_t> gs(grid.begin(), grid.end());
  std::vector<double> gv(gs.size());
  parallel_for(gs.size(), opts.threads, [&](std::size_t i) {
    gv[i] = (gs[i] <= dense_hi) ? dense[static_cast<std::size_t>(gs[i] - 1)]
                                : rho(gs[i], b);
  });
  for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
    const double env = std::max(gv[i], gv[i + 1]);
    res.sum += env * static_cast<double>(gs[i + 1] - gs[i]);
    res.pts.emplace_back(gs[i + 1], gv[i + 1]);
  }
  return res;
}

}  // namespace

std::vector<DiagRow> subsampling_condition_diag(
    const RhoFn& rho, std::span<const std::int64_t> n_list,
    const std::function<std::int64_t(std::int64_t)>& block_rule,
    const DiagOptions& opts) {
  std::vector<DiagRow> rows;
  for (std::int64_t n : n_list) {
    const std::int64_t b = block_rule(n);
    if (!(b >= 1 && b < n)) {
      throw ConfigError("subsampling_condition_diag: block rule must give "
                        "1 <= b < n");
    }
    const SweepResult sr = sweep_rho(rho, n, b, opts);
    DiagRow row;
    row.n = n;
    row.b = b;
    row.mean_rho = sr.sum / static_cast<double>(n);
    const double win_lo = opts.epsilon * static_cast<double>(n);
    double mx = 0.0;
    for (const auto& [k, v] : sr.pts) {
      if (static_cast<double>(k) >= win_lo) mx = std::max(mx, v);
    }
    row.max_window_rho = mx;
    rows.push_back(row);
  }
  return rows;
}

std::vector<DiagRow> subsampling_condition_diag(
    const CovarianceModel& model, std::span<const std::int64_t> n_list,
    const std::function<std::int64_t(std::int64_t)>& block_rule,
    const DiagOptions& opts) {
  std::int64_t max_need = 2;
  for (std::int64_t n : n_list) {
    max_need = std::max(max_need, n + block_rule(n) + 1);
  }
  const Autocov gamma = model.autocov_table(max_need);
  const RhoFn rho = [&gamma](std::int64_t k, std::int64_t b) {
    return canonical_correlation(gamma, k, b).rho;
  };
  return subsampling_condition_diag(rho, n_list, block_rule, opts);
}

double rho_sum(const CovarianceModel& model, std::int64_t kmax, std::int64_t b,
               const DiagOptions& opts) {
  const Autocov gamma = model.autocov_table(kmax + b + 1);
  const RhoFn rho = [&gamma](std::int64_t k, std::int64_t bb) {
    return canonical_correlation(gamma, k, bb).rho;
  };
  return 1.0 + sweep_rho(rho, kmax, b, opts).sum;
}

}  // namespace lrd
