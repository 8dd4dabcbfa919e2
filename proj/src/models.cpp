#include "lrd/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "lrd/special.hpp"

namespace lrd {

namespace {

constexpr double kPi = std::numbers::pi;

void check_memory_d(double d) {
  if (!(d > 0.0 && d < 0.5)) {
    throw ConfigError("memory parameter d must lie in (0, 1/2), got " +
                      std::to_string(d));
  }
}

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ConfigError("sigma2 must be positive and finite");
  }
}

// Unit-innovation FARIMA(0,d,0) covariance at a single lag via log-gamma:
// gamma_d(n) = gamma_d(0) * Gamma(n+d)Gamma(1-d) / (Gamma(d)Gamma(n+1-d)).
double farima0d0_single(double d, std::int64_t n) {
  const double g0 = std::exp(log_gamma(1.0 - 2.0 * d) - 2.0 * log_gamma(1.0 - d));
  if (n == 0) return g0;
  const double na = static_cast<double>(n < 0 ? -n : n);
  return g0 * std::exp(log_gamma(na + d) + log_gamma(1.0 - d) -
                       log_gamma(d) - log_gamma(na + 1.0 - d));
}

// Second difference of |n|^{2H} around n, stable for large n.
double fgn_second_diff(double two_h, std::int64_t n) {
  if (n == 0) return 2.0;
  const double nn = static_cast<double>(n);
  if (n <= 1000) {
    return std::pow(nn + 1.0, two_h) - 2.0 * std::pow(nn, two_h) +
           std::pow(nn - 1.0, two_h);
  }
  // (1+x)^a + (1-x)^a - 2 with x = 1/n, expanded to x^8 terms.
  const double x2 = 1.0 / (nn * nn);
  const double a = two_h;
  double c = a * (a - 1.0);  // 2 * binom(a,2)
  double term = c * x2;
  double acc = term;
  c *= (a - 2.0) * (a - 3.0) / 12.0;  // -> 2*binom(a,4)
  term = c * x2 * x2;
  acc += term;
  c *= (a - 4.0) * (a - 5.0) / 30.0;  // -> 2*binom(a,6)
  term = c * x2 * x2 * x2;
  acc += term;
  c *= (a - 6.0) * (a - 7.0) / 56.0;  // -> 2*binom(a,8)
  acc += c * x2 * x2 * x2 * x2;
  return std::pow(nn, two_h) * acc;
}

// Durand-Kerner roots of c[0] + c[1] z + ... + c[deg] z^deg.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<std::complex<double>> r(deg);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1.0, 0.0);
  for (int i = 0; i < deg; ++i) {
    p *= seed;
    r[i] = p;
  }
  auto eval = [&](std::complex<double> z) {
    std::complex<double> v(0.0, 0.0);
    for (int i = deg; i >= 0; --i) v = v * z + c[static_cast<std::size_t>(i)];
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double step = 0.0;
    for (int i = 0; i < deg; ++i) {
      std::complex<double> denom(c[static_cast<std::size_t>(deg)], 0.0);
      for (int j = 0; j < deg; ++j) {
        if (j != i) denom *= (r[i] - r[j]);
      }
      const std::complex<double> delta = eval(r[i]) / denom;
      r[i] -= delta;
      step = std::max(step, std::abs(delta));
    }
    if (step < 1e-13) break;
  }
  return r;
}

std::vector<double> default_grid_lambdas(int n) {
  std::vector<double> ls(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    ls[static_cast<std::size_t>(j)] = kPi * (j + 0.5) / n;
  }
  return ls;
}

double fd_spectral(double d, double lambda) {
  const double s = 2.0 * std::sin(std::fabs(lambda) / 2.0);
  return std::pow(s, -2.0 * d) / (2.0 * kPi);
}

// Sinai sum S(lambda) = sum_k |lambda + 2 pi k|^{-s}, s = 2H+1, evaluated
// with K explicit terms plus the midpoint-rule integral tail, which puts
// the truncation error far below 1e-10 of the sum.
double sinai_sum(double lambda, double s, int terms) {
  double acc = std::pow(std::fabs(lambda), -s);
  for (int k = 1; k <= terms; ++k) {
    acc += std::pow(2.0 * kPi * k + lambda, -s) +
           std::pow(2.0 * kPi * k - lambda, -s);
  }
  const double edge = 2.0 * kPi * (terms + 0.5);
  acc += (std::pow(edge + lambda, 1.0 - s) + std::pow(edge - lambda, 1.0 - s)) /
         ((s - 1.0) * 2.0 * kPi);
  return acc;
}

}  // namespace

MemoryParam::MemoryParam(double d_) : d(d_) { check_memory_d(d_); }

std::string to_string(Gamma0Decay decay) {
  switch (decay) {
    case Gamma0Decay::exponential: return "exponential";
    case Gamma0Decay::poly_o: return "poly-o";
    case Gamma0Decay::poly_O: return "poly-O";
  }
  return "?";
}

std::vector<double> farima0d0_autocov(MemoryParam d, double sigma2,
                                      std::int64_t maxlag) {
  check_sigma2(sigma2);
  if (maxlag < 0) throw ConfigError("farima0d0_autocov: maxlag must be >= 0");
  std::vector<double> g(static_cast<std::size_t>(maxlag) + 1);
  g[0] = sigma2 * std::exp(log_gamma(1.0 - 2.0 * d.d) - 2.0 * log_gamma(1.0 - d.d));
  for (std::int64_t n = 1; n <= maxlag; ++n) {
    const double dn = static_cast<double>(n);
    g[static_cast<std::size_t>(n)] =
        g[static_cast<std::size_t>(n - 1)] * (dn - 1.0 + d.d) / (dn - d.d);
  }
  return g;
}

std::vector<double> fgn_autocov(double hurst, double sigma2, std::int64_t maxlag) {
  if (!(hurst > 0.5 && hurst < 1.0)) {
    throw ConfigError("fgn: Hurst index must lie in (1/2, 1), got " +
                      std::to_string(hurst));
  }
  check_sigma2(sigma2);
  if (maxlag < 0) throw ConfigError("fgn_autocov: maxlag must be >= 0");
  std::vector<double> g(static_cast<std::size_t>(maxlag) + 1);
  for (std::int64_t n = 0; n <= maxlag; ++n) {
    g[static_cast<std::size_t>(n)] = 0.5 * sigma2 * fgn_second_diff(2.0 * hurst, n);
  }
  return g;
}

CovarianceModel CovarianceModel::farima0d0(double d, double sigma2) {
  check_memory_d(d);
  check_sigma2(sigma2);
  return CovarianceModel(Farima0d0{d, sigma2});
}

CovarianceModel CovarianceModel::farima(double d, std::vector<double> ar,
                                        std::vector<double> ma, double sigma2,
                                        std::int64_t trunc) {
  check_memory_d(d);
  check_sigma2(sigma2);
  const int p = static_cast<int>(ar.size());
  const int q = static_cast<int>(ma.size());

  double root_margin = std::numeric_limits<double>::infinity();
  if (p > 0) {
    // Phi(z) = 1 - ar[0] z - ... - ar[p-1] z^p
    std::vector<double> coeffs(static_cast<std::size_t>(p) + 1);
    coeffs[0] = 1.0;
    for (int i = 0; i < p; ++i) coeffs[static_cast<std::size_t>(i) + 1] = -ar[static_cast<std::size_t>(i)];
    if (coeffs.back() == 0.0) throw ConfigError("farima: leading AR coefficient is zero");
    for (const auto& z : poly_roots(coeffs)) root_margin = std::min(root_margin, std::abs(z));
    if (!(root_margin >= 1.0 + 1e-6)) {
      throw ConfigError("farima: AR polynomial has a root of modulus " +
                        std::to_string(root_margin) +
                        "; all roots must exceed 1 + 1e-6");
    }
    // Grid check on |z| = 1 backs up the root computation.
    double min_abs = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 4096; ++j) {
      const double lam = 2.0 * kPi * j / 4096.0;
      std::complex<double> v(1.0, 0.0);
      const std::complex<double> e(std::cos(lam), std::sin(lam));
      std::complex<double> zp(1.0, 0.0);
      for (int i = 0; i < p; ++i) {
        zp *= e;
        v -= ar[static_cast<std::size_t>(i)] * zp;
      }
      min_abs = std::min(min_abs, std::abs(v));
    }
    if (!(min_abs > 1e-7)) {
      throw ConfigError("farima: AR polynomial vanishes on the unit circle");
    }
  }

  // MA(infinity) coefficients psi of Theta/Phi, grown until the discarded
  // tail is below 1e-10 in absolute sum.
  std::vector<double> psi{1.0};
  std::int64_t target = trunc;
  if (target <= 0) {
    if (p == 0) {
      target = q;
    } else {
      const double r = 1.0 / root_margin;
      std::int64_t t = std::max<std::int64_t>(q + p, 16);
      for (;;) {
        // |psi_j| decays like r^j; bound the tail by the largest of the
        // last p coefficients times the geometric series.
        psi.resize(static_cast<std::size_t>(t) + 1, 0.0);
        for (std::int64_t j = 1; j <= t; ++j) {
          double v = (j <= q) ? ma[static_cast<std::size_t>(j - 1)] : 0.0;
          for (int i = 1; i <= p && i <= j; ++i) {
            v += ar[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(j - i)];
          }
          psi[static_cast<std::size_t>(j)] = v;
        }
        double last = 0.0;
        for (int i = 0; i < p; ++i) {
          last = std::max(last, std::fabs(psi[static_cast<std::size_t>(t - i)]));
        }
        if (last * r / (1.0 - r) < 1e-10 || t >= 100000) {
          target = t;
          break;
        }
        t *= 2;
      }
    }
  }
  psi.assign(static_cast<std::size_t>(target) + 1, 0.0);
  psi[0] = 1.0;
  for (std::int64_t j = 1; j <= target; ++j) {
    double v = (j <= q) ? ma[static_cast<std::size_t>(j - 1)] : 0.0;
    for (int i = 1; i <= p && i <= j; ++i) {
      v += ar[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(j - i)];
    }
    psi[static_cast<std::size_t>(j)] = v;
  }

  std::vector<double> psi_acf(static_cast<std::size_t>(target) + 1, 0.0);
  for (std::int64_t l = 0; l <= target; ++l) {
    double s = 0.0;
    for (std::int64_t i = 0; i + l <= target; ++i) {
      s += psi[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(i + l)];
    }
    psi_acf[static_cast<std::size_t>(l)] = s;
  }
  return CovarianceModel(FarimaPdq{d, sigma2, std::move(ar), std::move(ma),
                                   std::move(psi_acf), target, root_margin});
}

CovarianceModel CovarianceModel::fgn(double hurst, double sigma2) {
  if (!(hurst > 0.5 && hurst < 1.0)) {
    throw ConfigError("fgn: Hurst index must lie in (1/2, 1), got " +
                      std::to_string(hurst));
  }
  check_sigma2(sigma2);
  return CovarianceModel(Fgn{hurst, sigma2});
}

CovarianceModel CovarianceModel::product(double d, std::vector<double> gamma0) {
  check_memory_d(d);
  if (gamma0.empty() || !(gamma0[0] > 0.0)) {
    throw ConfigError("product: gamma0 must be nonempty with gamma0(0) > 0");
  }
  Product prod{d, std::move(gamma0)};
  const CovarianceModel m{Variant{prod}};
  for (double lam : default_grid_lambdas(4096)) {
    double f0 = prod.gamma0[0];
    for (std::size_t l = 1; l < prod.gamma0.size(); ++l) {
      f0 += 2.0 * prod.gamma0[l] * std::cos(static_cast<double>(l) * lam);
    }
    if (!(f0 > 0.0)) {
      throw ConfigError("product: short-memory factor f0 is not positive at "
                        "lambda = " + std::to_string(lam));
    }
  }
  return m;
}

double CovarianceModel::autocov(std::int64_t lag) const {
  const std::int64_t n = lag < 0 ? -lag : lag;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Farima0d0>) {
          return m.sigma2 * farima0d0_single(m.d, n);
        } else if constexpr (std::is_same_v<T, FarimaPdq>) {
          const std::int64_t t = static_cast<std::int64_t>(m.psi_acf.size()) - 1;
          double s = m.psi_acf[0] * farima0d0_single(m.d, n);
          for (std::int64_t l = 1; l <= t; ++l) {
            s += m.psi_acf[static_cast<std::size_t>(l)] *
                 (farima0d0_single(m.d, n - l) + farima0d0_single(m.d, n + l));
          }
          return m.sigma2 * s;
        } else if constexpr (std::is_same_v<T, Fgn>) {
          return 0.5 * m.sigma2 * fgn_second_diff(2.0 * m.hurst, n);
        } else {
          const std::int64_t t = static_cast<std::int64_t>(m.gamma0.size()) - 1;
          double s = m.gamma0[0] * farima0d0_single(m.d, n);
          for (std::int64_t l = 1; l <= t; ++l) {
            s += m.gamma0[static_cast<std::size_t>(l)] *
                 (farima0d0_single(m.d, n - l) + farima0d0_single(m.d, n + l));
          }
          return s / (2.0 * kPi);
        }
      },
      v_);
}

Autocov CovarianceModel::autocov_table(std::int64_t maxlag) const {
  if (maxlag < 0) throw ConfigError("autocov_table: maxlag must be >= 0");
  return std::visit(
      [&](const auto& m) -> Autocov {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Farima0d0>) {
          return Autocov(farima0d0_autocov(MemoryParam(m.d), m.sigma2, maxlag));
        } else if constexpr (std::is_same_v<T, Fgn>) {
          return Autocov(fgn_autocov(m.hurst, m.sigma2, maxlag));
        } else {
          // Convolution families share the shifted-sum form; build the
          // FARIMA(0,d,0) base table wide enough for every shift.
          const std::vector<double>* w = nullptr;
          double d = 0.0, scale = 1.0;
          if constexpr (std::is_same_v<T, FarimaPdq>) {
            w = &m.psi_acf;
            d = m.d;
            scale = m.sigma2;
          } else {
            w = &m.gamma0;
            d = m.d;
            scale = 1.0 / (2.0 * kPi);
          }
          const std::int64_t t = static_cast<std::int64_t>(w->size()) - 1;
          const std::vector<double> base =
              farima0d0_autocov(MemoryParam(d), 1.0, maxlag + t);
          auto base_at = [&](std::int64_t l) {
            return base[static_cast<std::size_t>(l < 0 ? -l : l)];
          };
          std::vector<double> g(static_cast<std::size_t>(maxlag) + 1);
          for (std::int64_t n = 0; n <= maxlag; ++n) {
            double s = (*w)[0] * base_at(n);
            for (std::int64_t l = 1; l <= t; ++l) {
              s += (*w)[static_cast<std::size_t>(l)] * (base_at(n - l) + base_at(n + l));
            }
            g[static_cast<std::size_t>(n)] = scale * s;
          }
          return Autocov(std::move(g));
        }
      },
      v_);
}

double CovarianceModel::spectral(double lambda) const {
  if (lambda == 0.0) {
    throw ConfigError("spectral: lambda = 0 is the long-memory pole");
  }
  if (!(lambda > -kPi - 1e-12 && lambda <= kPi + 1e-12)) {
    throw ConfigError("spectral: lambda must lie in (-pi, pi]");
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Farima0d0>) {
          return m.sigma2 * fd_spectral(m.d, lambda);
        } else if constexpr (std::is_same_v<T, FarimaPdq>) {
          const std::complex<double> e(std::cos(lambda), std::sin(lambda));
          std::complex<double> phi(1.0, 0.0), theta(1.0, 0.0), zp(1.0, 0.0);
          for (std::size_t i = 0; i < m.ar.size(); ++i) {
            zp *= e;
            phi -= m.ar[i] * zp;
          }
          zp = std::complex<double>(1.0, 0.0);
          for (std::size_t i = 0; i < m.ma.size(); ++i) {
            zp *= e;
            theta += m.ma[i] * zp;
          }
          return m.sigma2 * fd_spectral(m.d, lambda) * std::norm(theta) / std::norm(phi);
        } else if constexpr (std::is_same_v<T, Fgn>) {
          const double s = 2.0 * m.hurst + 1.0;
          const double cf = m.sigma2 * std::sin(kPi * m.hurst) *
                            gamma_fn(2.0 * m.hurst + 1.0) / (2.0 * kPi);
          const double sh = std::sin(0.5 * lambda);
          const double win = 4.0 * sh * sh;  // |1-e^{i lambda}|^2, stable near 0
          return cf * win * sinai_sum(lambda, s, 1024);
        } else {
          double f0 = m.gamma0[0];
          for (std::size_t l = 1; l < m.gamma0.size(); ++l) {
            f0 += 2.0 * m.gamma0[l] * std::cos(static_cast<double>(l) * lambda);
          }
          return fd_spectral(m.d, lambda) * f0 / (2.0 * kPi);
        }
      },
      v_);
}

double CovarianceModel::memory_d() const {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Fgn>) {
          return m.hurst - 0.5;
        } else {
          return m.d;
        }
      },
      v_);
}

double CovarianceModel::sigma2() const {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CovarianceModel::Product>) {
          return 1.0;
        } else {
          return m.sigma2;
        }
      },
      v_);
}

Gamma0Decay CovarianceModel::gamma0_decay() const {
  // ARMA short-memory factors have analytic spectral factors (exponential
  // decay); a finitely supported gamma0 trivially so. The fGn factor is
  // infinitely differentiable, i.e. o(n^-alpha) for every alpha.
  if (std::holds_alternative<Fgn>(v_)) return Gamma0Decay::poly_o;
  return Gamma0Decay::exponential;
}

double CovarianceModel::gamma0_alpha() const { return 3.0; }

double CovarianceModel::ar_root_margin() const {
  if (const auto* m = std::get_if<FarimaPdq>(&v_)) return m->root_margin;
  return std::numeric_limits<double>::infinity();
}

std::string CovarianceModel::family() const {
  if (std::holds_alternative<Farima0d0>(v_)) return "farima0d0";
  if (std::holds_alternative<FarimaPdq>(v_)) return "farima";
  if (std::holds_alternative<Fgn>(v_)) return "fgn";
  return "product";
}

const std::vector<double>& CovarianceModel::ar() const {
  static const std::vector<double> empty;
  if (const auto* m = std::get_if<FarimaPdq>(&v_)) return m->ar;
  return empty;
}

const std::vector<double>& CovarianceModel::ma() const {
  static const std::vector<double> empty;
  if (const auto* m = std::get_if<FarimaPdq>(&v_)) return m->ma;
  return empty;
}

const std::vector<double>& CovarianceModel::gamma0() const {
  static const std::vector<double> empty;
  if (const auto* m = std::get_if<Product>(&v_)) return m->gamma0;
  return empty;
}

std::int64_t CovarianceModel::trunc() const {
  if (const auto* m = std::get_if<FarimaPdq>(&v_)) return m->trunc;
  return 0;
}

std::vector<double> farima_pdq_autocov(const CovarianceModel& model,
                                       std::int64_t maxlag) {
  if (model.family() != "farima") {
    throw ConfigError("farima_pdq_autocov: model is not of the farima family");
  }
  const Autocov acf = model.autocov_table(maxlag);
  return std::vector<double>(acf.values().begin(), acf.values().end());
}

double spectral_density(const CovarianceModel& model, double lambda) {
  return model.spectral(lambda);
}

SubordinationMap SubordinationMap::named(const std::string& name) {
  if (name == "identity") return {[](double z) { return z; }, name};
  if (name == "square") return {[](double z) { return z * z; }, name};
  if (name == "square_centered") return {[](double z) { return z * z - 1.0; }, name};
  if (name == "sign") {
    return {[](double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }, name};
  }
  if (name == "exp") return {[](double z) { return std::exp(z); }, name};
  if (name == "abs") return {[](double z) { return std::fabs(z); }, name};
  if (name == "cube") return {[](double z) { return z * z * z; }, name};
  if (name.rfind("hermite:", 0) == 0) {
    const int p = std::stoi(name.substr(8));
    if (p < 1 || p > 20) throw ConfigError("hermite:<p> needs 1 <= p <= 20");
    return {[p](double z) {
              // Probabilists' Hermite polynomial He_p.
              double h0 = 1.0, h1 = z;
              if (p == 0) return h0;
              for (int j = 2; j <= p; ++j) {
                const double h2 = z * h1 - (j - 1) * h0;
                h0 = h1;
                h1 = h2;
              }
              return h1;
            },
            name};
  }
  throw ConfigError("unknown subordination map: " + name);
}

HermiteRank hermite_rank(const SubordinationMap& g, double tol, int p_max) {
  if (!(tol > 0.0)) throw ConfigError("hermite_rank: tol must be positive");
  const auto second = normal_moment_adaptive(
      [&](double z) { const double v = g.g(z); return v * v; });
  if (!std::isfinite(second.value) || second.value > 1e12) {
    throw ConfigError("hermite_rank: G is not square-integrable under the "
                      "standard normal law");
  }
  const double mean =
      normal_moment_adaptive([&](double z) { return g.g(z); }).value;

  HermiteRank out;
  out.p_max = p_max;
  out.tol = tol;
  out.coeffs.reserve(static_cast<std::size_t>(p_max));
  for (int p = 1; p <= p_max; ++p) {
    const double c = normal_moment_adaptive([&](double z) {
                       return (g.g(z) - mean) * std::pow(z, p);
                     }).value;
    out.coeffs.push_back(std::fabs(c));
    if (!out.rank && std::fabs(c) > tol) out.rank = p;
  }
  return out;
}

std::vector<double> apply_subordination(const SubordinationMap& g,
                                        std::span<const double> path) {
  std::vector<double> out(path.size());
  std::transform(path.begin(), path.end(), out.begin(),
                 [&](double z) { return g.g(z); });
  return out;
}

}  // namespace lrd
