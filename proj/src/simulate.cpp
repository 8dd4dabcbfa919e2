#include "lrd/simulate.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "lrd/kernels.hpp"
#include "lrd/rng.hpp"
#include "lrd/special.hpp"
#include "lrd/toeplitz.hpp"

namespace lrd {

namespace {

// FFTW plan creation is not thread-safe; executions through the new-array
// interface are.
std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

std::string to_string(SimMethod m) {
  switch (m) {
    case SimMethod::cholesky: return "cholesky";
    case SimMethod::circulant: return "circulant";
    case SimMethod::automatic: return "auto";
  }
  return "?";
}

SimMethod sim_method_from_string(const std::string& s) {
  if (s == "cholesky") return SimMethod::cholesky;
  if (s == "circulant") return SimMethod::circulant;
  if (s == "auto") return SimMethod::automatic;
  throw ConfigError("unknown simulation method: " + s);
}

struct PathGenerator::Impl {
  std::int64_t n = 0;
  SimMethod used = SimMethod::cholesky;
  int clipped = 0;

  // Cholesky path.
  Matrix chol;

  // Circulant path.
  std::int64_t emb = 0;                // M
  std::vector<double> spec_scale;      // sqrt(lambda_j / M)
  fftw_plan plan = nullptr;

  ~Impl() {
    if (plan != nullptr) {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      fftw_destroy_plan(plan);
    }
  }

  // Returns false when the embedding at size M has eigenvalues below the
  // clip window.
  bool try_embedding(const CovarianceModel& model, std::int64_t m) {
    const Autocov acf = model.autocov_table(m / 2);
    std::vector<std::complex<double>> row(static_cast<std::size_t>(m));
    for (std::int64_t j = 0; j <= m / 2; ++j) row[static_cast<std::size_t>(j)] = acf(j);
    for (std::int64_t j = m / 2 + 1; j < m; ++j) {
      row[static_cast<std::size_t>(j)] = acf(m - j);
    }
    std::vector<std::complex<double>> eig(static_cast<std::size_t>(m));
    {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      fftw_plan p = fftw_plan_dft_1d(
          static_cast<int>(m), reinterpret_cast<fftw_complex*>(row.data()),
          reinterpret_cast<fftw_complex*>(eig.data()), FFTW_BACKWARD,
          FFTW_ESTIMATE | FFTW_UNALIGNED);
      fftw_execute(p);
      fftw_destroy_plan(p);
    }
    const double clip_floor = -1e-8 * acf(0);
    int clip_count = 0;
    std::vector<double> scale(static_cast<std::size_t>(m));
    for (std::int64_t j = 0; j < m; ++j) {
      double lam = eig[static_cast<std::size_t>(j)].real();
      if (lam < 0.0) {
        if (lam < clip_floor) return false;
        lam = 0.0;
        ++clip_count;
      }
      scale[static_cast<std::size_t>(j)] = std::sqrt(lam / static_cast<double>(m));
    }
    emb = m;
    spec_scale = std::move(scale);
    clipped = clip_count;
    return true;
  }

  void setup_circulant_plan() {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(emb)),
        b(static_cast<std::size_t>(emb));
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(emb),
                            reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()),
                            FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  void setup_cholesky(const CovarianceModel& model) {
    const Autocov acf = model.autocov_table(n - 1);
    chol = cholesky(build_sigma(acf, n));
    used = SimMethod::cholesky;
  }
};

PathGenerator::PathGenerator(const CovarianceModel& model, std::int64_t n,
                             SimMethod method)
    : impl_(std::make_unique<Impl>()) {
  if (n < 1) throw ConfigError("PathGenerator: n must be >= 1");
  impl_->n = n;
  const bool want_circulant =
      method == SimMethod::circulant ||
      (method == SimMethod::automatic && n > 1024);
  if (want_circulant && n >= 2) {
    std::int64_t m = 2 * (n - 1);
    bool ok = false;
    while (true) {
      if (impl_->try_embedding(model, m)) {
        ok = true;
        break;
      }
      if (2 * m > 8 * n) break;
      m *= 2;
    }
    if (ok) {
      impl_->used = SimMethod::circulant;
      impl_->setup_circulant_plan();
      return;
    }
    if (method == SimMethod::circulant) {
      throw NumericalError("circulant embedding failed up to size 8n; rerun "
                           "with method=cholesky or auto");
    }
  }
  impl_->setup_cholesky(model);
}

PathGenerator::~PathGenerator() = default;

std::vector<double> PathGenerator::generate(std::uint64_t seed) const {
  const Impl& im = *impl_;
  const CounterRng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(im.n));
  if (im.used == SimMethod::cholesky) {
    std::vector<double> z(static_cast<std::size_t>(im.n));
    for (std::size_t t = 0; t < z.size(); ++t) z[t] = rng.normal_at(t);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = kernels::dot(im.chol.row(i), z.data(), i + 1);
    }
    return out;
  }
  const std::int64_t m = im.emb;
  std::vector<std::complex<double>> v(static_cast<std::size_t>(m));
  v[0] = im.spec_scale[0] * rng.normal_at(0);
  v[static_cast<std::size_t>(m / 2)] =
      im.spec_scale[static_cast<std::size_t>(m / 2)] * rng.normal_at(1);
  const double inv_sqrt2 = 0.7071067811865476;
  for (std::int64_t j = 1; j < m / 2; ++j) {
    const double s = im.spec_scale[static_cast<std::size_t>(j)] * inv_sqrt2;
    const std::complex<double> g(rng.normal_at(static_cast<std::uint64_t>(2 * j)),
                                 rng.normal_at(static_cast<std::uint64_t>(2 * j + 1)));
    v[static_cast<std::size_t>(j)] = s * g;
    v[static_cast<std::size_t>(m - j)] = s * std::conj(g);
  }
  std::vector<std::complex<double>> w(static_cast<std::size_t>(m));
  fftw_execute_dft(im.plan, reinterpret_cast<fftw_complex*>(v.data()),
                   reinterpret_cast<fftw_complex*>(w.data()));
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = w[t].real();
  return out;
}

SimMethod PathGenerator::method_used() const { return impl_->used; }
int PathGenerator::clipped_eigenvalues() const { return impl_->clipped; }
std::int64_t PathGenerator::embedding_size() const { return impl_->emb; }

std::vector<double> gen_gaussian(const PathRequest& req) {
  return PathGenerator(req.model, req.n, req.method).generate(req.seed);
}

std::vector<double> gen_subordinated(const PathRequest& req,
                                     const SubordinationMap& g) {
  auto path = gen_gaussian(req);
  for (auto& x : path) x = g.g(x);
  return path;
}

std::vector<double> gen_stochvol(const CovarianceModel& eta_model,
                                 const SubordinationMap& g,
                                 const SubordinationMap& f, std::int64_t n,
                                 std::uint64_t seed) {
  const auto mean_f = normal_moment_adaptive([&](double z) { return f.g(z); });
  if (!(std::fabs(mean_f.value) <= 1e-8)) {
    throw ConfigError("gen_stochvol: F must satisfy E F(xi) = 0 (quadrature "
                      "gave " + std::to_string(mean_f.value) + ")");
  }
  PathRequest req{eta_model, n, CounterRng::derive_stream(seed, 0),
                  SimMethod::automatic};
  std::vector<double> x = gen_gaussian(req);
  const CounterRng xi(CounterRng::derive_stream(seed, 1));
  for (std::size_t t = 0; t < x.size(); ++t) {
    x[t] = g.g(x[t]) * f.g(xi.normal_at(t));
  }
  return x;
}

}  // namespace lrd
