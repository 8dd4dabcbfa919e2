#pragma once

// Test-only oracles, independent of the library's computation paths:
// a cyclic Jacobi eigensolver, a brute-force sphere search for the b = 2
// canonical correlation, pole-corrected spectral quadrature, the recursive
// projection form of the multistep predictor, and a two-sample KS distance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "lrd/autocov.hpp"
#include "lrd/matrix.hpp"
#include "lrd/toeplitz.hpp"

namespace oracle {

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations (ascending).
inline std::vector<double> jacobi_eigenvalues(lrd::Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline lrd::Matrix dense_from(const lrd::SymToeplitz& s) {
  lrd::Matrix m(s.dim, s.dim);
  for (std::size_t i = 0; i < s.dim; ++i) {
    for (std::size_t j = 0; j < s.dim; ++j) m(i, j) = s.at(i, j);
  }
  return m;
}

// Brute-force maximization of |Corr(<u,Z_1^2>, <v,Z_{k+1}^{k+2}>)| over the
// angle pair, grid plus local refinement.
inline double rho_b2_bruteforce(const lrd::Autocov& gamma, std::int64_t k) {
  const double g0 = gamma(0), g1 = gamma(1);
  auto corr = [&](double alpha, double beta) {
    const double u0 = std::cos(alpha), u1 = std::sin(alpha);
    const double v0 = std::cos(beta), v1 = std::sin(beta);
    // Cov(<u,Z_1^2>, <v,Z_{k+1}^{k+2}>) with cross entries gamma(k+j-i).
    const double cov = u0 * v0 * gamma(k) + u0 * v1 * gamma(k + 1) +
                       u1 * v0 * gamma(k - 1) + u1 * v1 * gamma(k);
    const double vu = g0 + 2.0 * u0 * u1 * g1;
    const double vv = g0 + 2.0 * v0 * v1 * g1;
    return std::fabs(cov) / std::sqrt(vu * vv);
  };
  const double pi = std::numbers::pi;
  double best = 0.0, ba = 0.0, bb = 0.0;
  const int grid = 1500;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = pi * i / grid, b = pi * j / grid;
      const double c = corr(a, b);
      if (c > best) {
        best = c;
        ba = a;
        bb = b;
      }
    }
  }
  double step = pi / grid;
  for (int refine = 0; refine < 40; ++refine) {
    bool improved = false;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const double c = corr(ba + di * step, bb + dj * step);
        if (c > best) {
          best = c;
          ba += di * step;
          bb += dj * step;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

// gamma(n) = 2 int_0^pi f(lambda) cos(n lambda) dlambda for a spectral
// density with an integrable lambda^{-2d} pole at zero. The substitution
// lambda = u^p with p = 2/(1-2d) removes the singularity; composite
// Gauss-Legendre afterwards.
inline double spectral_to_autocov(const std::function<double(double)>& f,
                                  double d, std::int64_t n, int panels = 512) {
  static const double gl_x[8] = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
      0.7966664774136267,  0.9602898564975363};
  static const double gl_w[8] = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
  const double pi = std::numbers::pi;
  const double p = 2.0 / (1.0 - 2.0 * d);
  const double top = std::pow(pi, 1.0 / p);
  double acc = 0.0;
  for (int seg = 0; seg < panels; ++seg) {
    const double a = top * seg / panels;
    const double b = top * (seg + 1) / panels;
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < 8; ++q) {
      const double u = mid + h * gl_x[q];
      if (u <= 0.0) continue;
      const double lam = std::pow(u, p);
      const double jac = p * std::pow(u, p - 1.0);
      acc += gl_w[q] * h * f(lam) * std::cos(static_cast<double>(n) * lam) * jac;
    }
  }
  return 2.0 * acc;
}

// Multistep predictor by the recursive projection
// P_{[1,b]} Z_n = P_{[1,b]} ... P_{[1,n-1]} Z_n: the top coordinate Z_t is
// repeatedly replaced by its one-step predictor on Z_1..Z_{t-1}.
inline std::vector<double> recursive_projection(const lrd::Autocov& gamma,
                                                std::int64_t b, std::int64_t n) {
  // coeff[i] multiplies Z_{i+1}.
  std::vector<double> coeff(static_cast<std::size_t>(n), 0.0);
  coeff[static_cast<std::size_t>(n - 1)] = 1.0;
  for (std::int64_t t = n; t >= b + 1; --t) {
    const double top = coeff[static_cast<std::size_t>(t - 1)];
    coeff[static_cast<std::size_t>(t - 1)] = 0.0;
    const lrd::PredictorCoeffs pc = lrd::levinson_predictor(gamma, t - 1);
    for (std::int64_t j = 1; j <= t - 1; ++j) {
      // phi[j-1] multiplies Z_{t-j}.
      coeff[static_cast<std::size_t>(t - j - 1)] +=
          top * pc.phi[static_cast<std::size_t>(j - 1)];
    }
  }
  return std::vector<double>(coeff.begin(), coeff.begin() + b);
}

// Two-sample Kolmogorov-Smirnov distance between sorted samples.
inline double ks_distance(std::span<const double> a_sorted,
                          std::span<const double> b_sorted) {
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a_sorted.size());
  const double nb = static_cast<double>(b_sorted.size());
  while (i < a_sorted.size() && j < b_sorted.size()) {
    const double x = std::min(a_sorted[i], b_sorted[j]);
    while (i < a_sorted.size() && a_sorted[i] <= x) ++i;
    while (j < b_sorted.size() && b_sorted[j] <= x) ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
  }
  return sup;
}

// Ordinary least squares slope of y against x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
