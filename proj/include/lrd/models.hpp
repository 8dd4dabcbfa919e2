#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lrd/autocov.hpp"

namespace lrd {

/// Memory parameter d of the long-memory regime, 0 < d < 1/2.
struct MemoryParam {
  double d;
  explicit MemoryParam(double d_);
};

/// Decay class of the short-memory factor's covariance gamma_0(n).
enum class Gamma0Decay { exponential, poly_o, poly_O };

std::string to_string(Gamma0Decay decay);

/// Covariance of a FARIMA(0,d,0) process with innovation variance sigma2:
/// gamma(0) = sigma2 * Gamma(1-2d)/Gamma(1-d)^2, then the product recursion
/// gamma(n) = gamma(n-1) * (n-1+d)/(n-d).
std::vector<double> farima0d0_autocov(MemoryParam d, double sigma2,
                                      std::int64_t maxlag);

/// Covariance of fractional Gaussian noise, H in (1/2,1):
/// gamma(n) = (sigma2/2) (|n+1|^{2H} - 2|n|^{2H} + |n-1|^{2H}).
/// Large lags switch to a series form of the second difference to avoid
/// cancellation.
std::vector<double> fgn_autocov(double hurst, double sigma2,
                                std::int64_t maxlag);

/// Long-memory covariance/spectral model families.
class CovarianceModel {
 public:
  static CovarianceModel farima0d0(double d, double sigma2);
  /// FARIMA(p,d,q) with Phi(z) = 1 - phi_1 z - ... - phi_p z^p and
  /// Theta(z) = 1 + theta_1 z + ... + theta_q z^q. The AR polynomial must
  /// have all roots strictly outside the unit circle (margin 1e-6).
  /// trunc = 0 picks the MA(infinity) truncation automatically so the
  /// discarded coefficient tail sums below 1e-10.
  static CovarianceModel farima(double d, std::vector<double> ar,
                                std::vector<double> ma, double sigma2,
                                std::int64_t trunc = 0);
  static CovarianceModel fgn(double hurst, double sigma2);
  /// Spectral density f_d(lambda) * f_0(lambda) where f_0 is the Fourier
  /// series of the finitely supported, symmetric sequence gamma0
  /// (gamma0[l] for l = 0..L-1). f_0 must be positive; this is spot-checked
  /// on a grid of 4096 frequencies.
  static CovarianceModel product(double d, std::vector<double> gamma0);

  double autocov(std::int64_t lag) const;
  Autocov autocov_table(std::int64_t maxlag) const;

  /// Spectral density at lambda in (-pi, pi], lambda != 0 (pole).
  double spectral(double lambda) const;

  double memory_d() const;
  double sigma2() const;
  Gamma0Decay gamma0_decay() const;
  /// Polynomial decay exponent to use for the main-theorem bound's second
  /// term when gamma0_decay() is a poly class.
  double gamma0_alpha() const;
  std::string family() const;
  /// Smallest modulus among the AR polynomial roots (+infinity when there
  /// is no AR part); the exponential decay rate of the short-memory factor.
  double ar_root_margin() const;
  const std::vector<double>& ar() const;
  const std::vector<double>& ma() const;
  const std::vector<double>& gamma0() const;
  std::int64_t trunc() const;

 private:
  struct Farima0d0 {
    double d, sigma2;
  };
  struct FarimaPdq {
    double d, sigma2;
    std::vector<double> ar, ma;
    std::vector<double> psi_acf;  // psi_acf[l] = sum_i psi_i psi_{i+l}
    std::int64_t trunc;
    double root_margin;  // min |root| of the AR polynomial, +inf if p = 0
  };
  struct Fgn {
    double hurst, sigma2;
  };
  struct Product {
    double d;
    std::vector<double> gamma0;
  };
  using Variant = std::variant<Farima0d0, FarimaPdq, Fgn, Product>;

  explicit CovarianceModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// FARIMA(p,d,q) covariance through the MA(infinity) convolution with the
/// FARIMA(0,d,0) covariance. The model must be of the farima family.
std::vector<double> farima_pdq_autocov(const CovarianceModel& model,
                                       std::int64_t maxlag);

double spectral_density(const CovarianceModel& model, double lambda);

/// Instantaneous transform X_n = G(Z_n).
struct SubordinationMap {
  std::function<double(double)> g;
  std::string label;

  /// Built-in transforms by name: identity, square, square_centered, sign,
  /// exp, abs, cube, hermite:<p>.
  static SubordinationMap named(const std::string& name);
};

struct HermiteRank {
  std::optional<int> rank;      // empty when every tested coefficient is small
  std::vector<double> coeffs;   // |E[(G(Z)-EG(Z)) Z^p]| for p = 1..p_max
  int p_max = 0;
  double tol = 0.0;
};

/// Smallest p <= p_max with |E[(G(Z)-EG(Z)) Z^p]| > tol, moments by
/// adaptive Gauss-Hermite quadrature (>= 128 nodes). Rejects maps with
/// non-finite E[G(Z)^2].
HermiteRank hermite_rank(const SubordinationMap& g, double tol = 1e-8,
                         int p_max = 8);

std::vector<double> apply_subordination(const SubordinationMap& g,
                                        std::span<const double> path);

}  // namespace lrd
