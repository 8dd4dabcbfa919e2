// Command-line front end: models -> bound tables, subsampling-condition
// diagnostics, exact simulation and subsampling inference, with file-based
// configs and deterministic tabular outputs.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrd/bounds.hpp"
#include "lrd/cancorr.hpp"
#include "lrd/io.hpp"
#include "lrd/models.hpp"
#include "lrd/parallel.hpp"
#include "lrd/simulate.hpp"
#include "lrd/subsample.hpp"

namespace {

using nlohmann::ordered_json;

struct ModelFlags {
  std::string model_file;
  std::string family;
  double d = 0.0;
  double hurst = 0.0;
  double sigma2 = 1.0;
  std::vector<double> ar, ma, gamma0;
  std::int64_t trunc = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_file,
                    "Model config file (keys: family, d|hurst, sigma2, ar, ma, gamma0)");
    cmd->add_option("--family", family, "farima0d0 | farima | fgn | product");
    cmd->add_option("--d", d, "memory parameter d in (0, 1/2)");
    cmd->add_option("--hurst", hurst, "Hurst index in (1/2, 1) for fgn");
    cmd->add_option("--sigma2", sigma2, "innovation variance (default 1)");
    cmd->add_option("--ar", ar, "AR coefficients phi_1..phi_p")->expected(-1);
    cmd->add_option("--ma", ma, "MA coefficients theta_1..theta_q")->expected(-1);
    cmd->add_option("--gamma0", gamma0, "short-memory covariance sequence")->expected(-1);
    cmd->add_option("--trunc", trunc, "MA(inf) truncation override (0 = auto)");
  }

  lrd::CovarianceModel build() const {
    if (!model_file.empty()) {
      return lrd::model_from_config(lrd::KvConfig::load(model_file));
    }
    lrd::KvConfig cfg;
    if (family.empty()) {
      throw lrd::ConfigError("specify a model with --model <file> or --family");
    }
    cfg.set("family", family);
    if (family == "fgn") {
      cfg.set_double("hurst", hurst);
    } else {
      cfg.set_double("d", d);
    }
    cfg.set_double("sigma2", sigma2);
    if (!ar.empty()) cfg.set_double_list("ar", ar);
    if (!ma.empty()) cfg.set_double_list("ma", ma);
    if (!gamma0.empty()) cfg.set_double_list("gamma0", gamma0);
    if (trunc > 0) cfg.set_int("trunc", trunc);
    return lrd::model_from_config(cfg);
  }

  std::string describe() const {
    const lrd::KvConfig cfg = lrd::model_to_config(build());
    std::string s;
    for (const auto& k : cfg.keys()) {
      if (!s.empty()) s += ' ';
      s += k + "=" + cfg.get_string(k);
    }
    return s;
  }
};

void write_json_file(const std::string& path, const ordered_json& j, bool force) {
  if (!force && std::ifstream(path).good()) {
    throw lrd::IoError("refusing to overwrite existing file " + path +
                       " (pass --force)");
  }
  std::ofstream out(path);
  if (!out) throw lrd::IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw lrd::IoError("write failed for " + path);
}

lrd::BlockStatistic stat_from_string(const std::string& s) {
  if (s == "sn_mean") return lrd::BlockStatistic::sn_mean();
  if (s.rfind("sn_autocov:", 0) == 0) {
    return lrd::BlockStatistic::sn_autocov(std::stoll(s.substr(11)));
  }
  if (s == "sign") return lrd::BlockStatistic::m_estimator(lrd::Psi::sign());
  if (s == "huber") return lrd::BlockStatistic::m_estimator(lrd::Psi::huber(1.345));
  if (s.rfind("huber:", 0) == 0) {
    return lrd::BlockStatistic::m_estimator(lrd::Psi::huber(std::stod(s.substr(6))));
  }
  throw lrd::ConfigError("unknown statistic '" + s +
                         "' (sn_mean, sn_autocov:<m>, sign, huber[:c])");
}

int run_gamma(const ModelFlags& mf, std::int64_t maxlag, const std::string& out,
              bool force) {
  if (maxlag < 0) throw lrd::ConfigError("--maxlag must be >= 0");
  const lrd::CovarianceModel model = mf.build();
  const lrd::Autocov acf = model.autocov_table(maxlag);
  lrd::OutputTable t;
  t.notes.push_back("model: " + mf.describe());
  t.columns = {"lag", "gamma"};
  for (std::int64_t l = 0; l <= maxlag; ++l) {
    t.rows.push_back({l, acf(l)});
  }
  lrd::write_csv(lrd::resolve_output_path(out), t, force);
  return 0;
}

int run_rho(const ModelFlags& mf, std::vector<std::int64_t> ks,
            std::vector<std::int64_t> bs, const std::string& out, bool force,
            unsigned threads) {
  const lrd::CovarianceModel model = mf.build();
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  if (ks.empty() || bs.empty()) {
    throw lrd::ConfigError("rho: provide --k and --b grids");
  }
  const std::int64_t kmax = ks.back(), bmax = bs.back();
  const lrd::Autocov acf = model.autocov_table(kmax + bmax + 1);
  struct Row {
    std::int64_t k, b;
    double rho, lower;
  };
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (std::int64_t b : bs) {
    for (std::int64_t k : ks) cells.emplace_back(b, k);
  }
  std::vector<Row> rows(cells.size());
  lrd::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const auto [b, k] = cells[i];
    rows[i] = {k, b, lrd::canonical_correlation(acf, k, b).rho,
               lrd::block_sum_corr(acf, k, b)};
  });
  lrd::OutputTable t;
  t.notes.push_back("model: " + mf.describe());
  t.columns = {"k", "b", "rho", "lower"};
  for (const Row& r : rows) t.rows.push_back({r.k, r.b, r.rho, r.lower});
  lrd::write_csv(lrd::resolve_output_path(out), t, force);
  return 0;
}

int run_bounds(const ModelFlags& mf, std::vector<std::int64_t> ks,
               std::vector<std::int64_t> kmul, std::vector<std::int64_t> bs,
               std::int64_t kprime_m, double eps, const std::string& out_base,
               bool force, unsigned threads) {
  const lrd::CovarianceModel model = mf.build();
  if (bs.empty()) throw lrd::ConfigError("bounds: provide --b grid");
  if (ks.empty() && kmul.empty()) {
    throw lrd::ConfigError("bounds: provide --k or --kmul grid");
  }
  std::vector<std::int64_t> k_grid = ks;
  for (std::int64_t m : kmul) {
    for (std::int64_t b : bs) k_grid.push_back(m * b);
  }
  lrd::BoundsOptions opts;
  opts.kprime_m = kprime_m;
  opts.eps = eps;
  opts.threads = threads;
  const lrd::BoundsTable table = lrd::bounds_table(model, k_grid, bs, opts);

  // In-run sandwich assertion: the lower bound and the crude bound are
  // computed constants (must hold up to roundoff); the calibrated shapes are
  // allowed the validation exceedance margin of 10%.
  for (const auto& r : table.rows) {
    if (!(r.block_sum_lower <= r.rho + 1e-9)) {
      throw lrd::NumericalError("bounds: block-sum lower bound exceeds rho at k=" +
                                std::to_string(r.k) + " b=" + std::to_string(r.b));
    }
    if (!(r.rho <= r.crude * (1.0 + 1e-9) + 1e-12)) {
      throw lrd::NumericalError("bounds: rho exceeds the crude bound at k=" +
                                std::to_string(r.k) + " b=" + std::to_string(r.b));
    }
    double upper = std::min(r.farima, r.bw);
    if (std::isfinite(r.main)) upper = std::min(upper, r.main);
    if (!(r.rho <= 1.1 * upper + 1e-12)) {
      throw lrd::NumericalError("bounds: rho exceeds the calibrated bounds "
                                "beyond the 10% validation margin at k=" +
                                std::to_string(r.k) + " b=" + std::to_string(r.b));
    }
  }

  lrd::OutputTable t;
  t.notes.push_back("model: " + mf.describe());
  t.notes.push_back(table.constants.provenance);
  t.notes.push_back("excluded cells with k <= b: " + std::to_string(table.excluded));
  t.columns = {"model", "d",  "k",       "kprime", "b",    "rho",
               "lower", "crude", "bw", "farima", "main", "regime"};
  for (const auto& r : table.rows) {
    t.rows.push_back({model.family(), r.d, r.k, r.kprime, r.b, r.rho,
                      r.block_sum_lower, r.crude, r.bw, r.farima, r.main,
                      lrd::to_string(r.regime)});
  }
  lrd::write_csv(lrd::resolve_output_path(out_base + ".csv"), t, force);
  lrd::write_json(lrd::resolve_output_path(out_base + ".json"), t, force);
  std::printf("bounds: %zu rows, %lld cells excluded (k <= b)\n", t.rows.size(),
              static_cast<long long>(table.excluded));
  return 0;
}

int run_diag(const ModelFlags& mf, std::vector<std::int64_t> ns,
             const std::string& rule, double epsilon, bool exact,
             const std::string& out, bool force, unsigned threads) {
  const lrd::CovarianceModel model = mf.build();
  if (ns.empty()) throw lrd::ConfigError("diag: provide --n list");
  std::sort(ns.begin(), ns.end());
  lrd::DiagOptions opts;
  opts.epsilon = epsilon;
  opts.exact = exact;
  opts.threads = threads;
  const auto rows = lrd::subsampling_condition_diag(
      model, ns, lrd::block_rule_from_string(rule), opts);
  lrd::OutputTable t;
  t.notes.push_back("model: " + mf.describe());
  t.notes.push_back("block rule: " + rule + ", epsilon = " +
                    lrd::format_double(epsilon));
  t.columns = {"n", "b", "mean_rho", "max_window_rho"};
  for (const auto& r : rows) {
    t.rows.push_back({r.n, r.b, r.mean_rho, r.max_window_rho});
  }
  lrd::write_csv(lrd::resolve_output_path(out), t, force);
  bool mean_dec = true, max_dec = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    mean_dec = mean_dec && rows[i].mean_rho < rows[i - 1].mean_rho;
    max_dec = max_dec && rows[i].max_window_rho < rows[i - 1].max_window_rho;
  }
  std::printf("mean_rho strictly decreasing: %s\n", mean_dec ? "PASS" : "FAIL");
  std::printf("max_window_rho strictly decreasing: %s\n", max_dec ? "PASS" : "FAIL");
  return 0;
}

int run_simulate(const ModelFlags& mf, std::int64_t n, std::uint64_t seed,
                 const std::string& g_name, const std::string& method,
                 const std::string& out, bool force) {
  const lrd::CovarianceModel model = mf.build();
  const lrd::SubordinationMap g = lrd::SubordinationMap::named(g_name);
  lrd::PathRequest req{model, n, seed, lrd::sim_method_from_string(method)};
  const lrd::PathGenerator gen(req.model, req.n, req.method);
  const std::vector<double> path =
      lrd::apply_subordination(g, gen.generate(req.seed));
  lrd::OutputTable t;
  t.notes.push_back("model: " + mf.describe() + " n=" + std::to_string(n) +
                    " seed=" + std::to_string(seed) + " method=" +
                    lrd::to_string(gen.method_used()) + " g=" + g_name);
  if (gen.clipped_eigenvalues() > 0) {
    t.notes.push_back("clipped embedding eigenvalues: " +
                      std::to_string(gen.clipped_eigenvalues()));
  }
  t.columns = {"value"};
  for (double v : path) t.rows.push_back({v});
  lrd::write_csv(lrd::resolve_output_path(out), t, force);
  return 0;
}

int run_subsample(const ModelFlags& mf, const std::string& series_file,
                  std::int64_t n, std::uint64_t seed, const std::string& g_name,
                  std::int64_t b, const std::string& stat_s, double level,
                  double band_tau, const std::string& out, bool force,
                  unsigned threads) {
  std::vector<double> series;
  if (!series_file.empty()) {
    series = lrd::read_series_csv(series_file);
  } else {
    const lrd::CovarianceModel model = mf.build();
    const lrd::SubordinationMap g = lrd::SubordinationMap::named(g_name);
    series = lrd::apply_subordination(
        g, lrd::gen_gaussian({model, n, seed, lrd::SimMethod::automatic}));
  }
  ordered_json j;
  j["command"] = "subsample";
  j["n"] = series.size();
  j["b"] = b;
  if (stat_s.rfind("band", 0) == 0) {
    const double tau = stat_s.size() > 5 ? std::stod(stat_s.substr(5)) : band_tau;
    const lrd::ConfidenceBand band = lrd::ecdf_band(series, b, level, tau, threads);
    j["stat"] = "band";
    j["level"] = level;
    j["tau_exponent"] = tau;
    j["cutoff"] = band.cutoff;
    j["s_alpha"] = band.s_alpha;
    j["x"] = band.xs;
    j["lower"] = band.lower;
    j["upper"] = band.upper;
  } else {
    const lrd::BlockStatistic stat = stat_from_string(stat_s);
    const lrd::CiResult res = lrd::subsample_ci(series, b, stat, level, threads);
    j["stat"] = stat_s;
    j["level"] = level;
    j["point"] = res.point;
    j["w_full"] = res.w_full;
    j["ci"] = {{"lo", res.ci.lo}, {"hi", res.ci.hi}};
    j["degenerate_blocks"] = res.degenerate_blocks;
    j["degenerate"] = res.degenerate;
  }
  write_json_file(lrd::resolve_output_path(out), j, force);
  return 0;
}

int run_coverage(const std::string& config_file, bool force, unsigned threads) {
  const lrd::KvConfig cfg = lrd::KvConfig::load(config_file);
  cfg.expect_keys({"command", "family", "d", "hurst", "sigma2", "ar", "ma",
                   "gamma0", "trunc", "g", "n", "b", "stat", "level", "reps",
                   "seed", "threads", "out", "true_value"});
  const std::string command = cfg.get_string("command", "coverage");
  if (command != "coverage") {
    throw lrd::ConfigError("config key 'command' must be 'coverage'");
  }
  lrd::CoverageConfig cc{.model = lrd::model_from_config(cfg)};
  cc.n = cfg.get_int("n");
  cc.b = cfg.get_int("b");
  cc.stat = stat_from_string(cfg.get_string("stat", "sn_mean"));
  cc.level = cfg.get_double("level", 0.9);
  cc.reps = static_cast<int>(cfg.get_int("reps", 100));
  cc.seed = cfg.get_uint("seed", 1);
  cc.threads = static_cast<unsigned>(cfg.get_int("threads", threads));
  if (cfg.has("g")) cc.g = lrd::SubordinationMap::named(cfg.get_string("g"));
  if (cfg.has("true_value")) cc.true_value = cfg.get_double("true_value");
  const lrd::CoverageReport rep = lrd::mc_coverage(cc);
  ordered_json j;
  j["command"] = "coverage";
  j["model"] = lrd::model_to_config(cc.model).serialize();
  j["n"] = cc.n;
  j["b"] = cc.b;
  j["stat"] = cfg.get_string("stat", "sn_mean");
  j["level"] = cc.level;
  j["reps"] = rep.reps;
  j["seed"] = rep.seed;
  j["true_value"] = rep.true_value;
  j["coverage"] = rep.coverage;
  j["mean_ci_length"] = rep.mean_length;
  j["degenerate_replications"] = rep.degenerate_replications;
  const std::string out = cfg.get_string("out", "coverage.json");
  write_json_file(lrd::resolve_output_path(out), j, force);
  std::printf("coverage %.4f over %d replications (seed %llu)\n", rep.coverage,
              rep.reps, static_cast<unsigned long long>(rep.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical-correlation bounds and subsampling inference for "
               "long-memory Gaussian-subordinated time series"};
  app.require_subcommand(1);
  unsigned threads = lrd::default_threads();
  app.add_option("--threads", threads, "worker threads (default: hardware)");

  bool force = false;
  app.add_flag("--force", force, "overwrite existing output files");

  // gamma
  auto* cg = app.add_subcommand("gamma", "autocovariance table");
  ModelFlags mf_g;
  mf_g.attach(cg);
  std::int64_t maxlag = 0;
  std::string out_g = "gamma.csv";
  cg->add_option("--maxlag", maxlag)->required();
  cg->add_option("--out", out_g);

  // rho
  auto* cr = app.add_subcommand("rho", "canonical correlations over a grid");
  ModelFlags mf_r;
  mf_r.attach(cr);
  std::vector<std::int64_t> r_k, r_b;
  std::string out_r = "rho.csv";
  cr->add_option("--k", r_k)->expected(-1)->required();
  cr->add_option("--b", r_b)->expected(-1)->required();
  cr->add_option("--out", out_r);

  // bounds
  auto* cb = app.add_subcommand("bounds", "bound table with calibrated constants");
  ModelFlags mf_b;
  mf_b.attach(cb);
  std::vector<std::int64_t> b_k, b_kmul, b_b;
  std::int64_t kprime_m = 4;
  double beps = 0.1;
  std::string out_b = "bounds";
  cb->add_option("--k", b_k, "absolute k grid")->expected(-1);
  cb->add_option("--kmul", b_kmul, "k as multiples of b")->expected(-1);
  cb->add_option("--b", b_b)->expected(-1)->required();
  cb->add_option("--kprime-m", kprime_m, "k' = min(b(m+1), (1-eps)k)");
  cb->add_option("--eps", beps);
  cb->add_option("--out", out_b, "base path; writes .csv and .json");

  // diag
  auto* cd = app.add_subcommand("diag", "subsampling-condition diagnostic");
  ModelFlags mf_d;
  mf_d.attach(cd);
  std::vector<std::int64_t> d_n;
  std::string d_rule = "sqrt";
  double d_eps = 0.1;
  bool d_exact = false;
  std::string out_d = "diag.csv";
  cd->add_option("--n", d_n)->expected(-1)->required();
  cd->add_option("--block-rule", d_rule, "sqrt | pow:a | <int>");
  cd->add_option("--epsilon", d_eps);
  cd->add_flag("--exact", d_exact, "evaluate rho at every k");
  cd->add_option("--out", out_d);

  // simulate
  auto* cs = app.add_subcommand("simulate", "exact Gaussian / subordinated path");
  ModelFlags mf_s;
  mf_s.attach(cs);
  std::int64_t s_n = 0;
  std::uint64_t s_seed = 1;
  std::string s_g = "identity", s_method = "auto", out_s = "path.csv";
  cs->add_option("--n", s_n)->required();
  cs->add_option("--seed", s_seed);
  cs->add_option("--g", s_g, "subordination map");
  cs->add_option("--method", s_method, "cholesky | circulant | auto");
  cs->add_option("--out", out_s);

  // subsample
  auto* cu = app.add_subcommand("subsample", "CI or band from sliding blocks");
  ModelFlags mf_u;
  mf_u.attach(cu);
  std::string u_series, u_g = "identity", u_stat = "sn_mean", out_u = "subsample.json";
  std::int64_t u_n = 0, u_b = 0;
  std::uint64_t u_seed = 1;
  double u_level = 0.9, u_tau = 0.5;
  cu->add_option("--series", u_series, "single-column CSV input");
  cu->add_option("--n", u_n, "length when simulating instead of reading");
  cu->add_option("--seed", u_seed);
  cu->add_option("--g", u_g);
  cu->add_option("--b", u_b)->required();
  cu->add_option("--stat", u_stat, "sn_mean | sn_autocov:<m> | sign | huber[:c] | band[:tau]");
  cu->add_option("--level", u_level);
  cu->add_option("--band-tau", u_tau, "band normalizer exponent");
  cu->add_option("--out", out_u);

  // coverage
  auto* cc = app.add_subcommand("coverage", "Monte Carlo coverage experiment");
  std::string cov_config;
  cc->add_option("config", cov_config, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cg->parsed()) return run_gamma(mf_g, maxlag, out_g, force);
    if (cr->parsed()) return run_rho(mf_r, r_k, r_b, out_r, force, threads);
    if (cb->parsed()) {
      return run_bounds(mf_b, b_k, b_kmul, b_b, kprime_m, beps, out_b, force,
                        threads);
    }
    if (cd->parsed()) {
      return run_diag(mf_d, d_n, d_rule, d_eps, d_exact, out_d, force, threads);
    }
    if (cs->parsed()) return run_simulate(mf_s, s_n, s_seed, s_g, s_method, out_s, force);
    if (cu->parsed()) {
      return run_subsample(mf_u, u_series, u_n, u_seed, u_g, u_b, u_stat,
                           u_level, u_tau, out_u, force, threads);
    }
    if (cc->parsed()) return run_coverage(cov_config, force, threads);
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const lrd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const lrd::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const lrd::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
