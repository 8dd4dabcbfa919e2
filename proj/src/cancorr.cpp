#include "lrd/cancorr.hpp"

#include <algorithm>
#include <cmath>

#include "lrd/kernels.hpp"
#include "lrd/toeplitz.hpp"

namespace lrd {

namespace {

constexpr int kIterCap = 10000;
constexpr double kRqTol = 1e-12;

double norm2(const std::vector<double>& x) {
  return std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
}

// y = M x using contiguous rows.
void matvec(const Matrix& M, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < M.rows(); ++i) {
    y[i] = kernels::dot(M.row(i), x.data(), M.cols());
  }
}

double block_variance(const SymToeplitz& S, const std::vector<double>& w) {
  const std::size_t b = S.dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b; ++j) row += S.at(i, j) * w[j];
    acc += w[i] * row;
  }
  return acc;
}

}  // namespace

CanonicalCorrResult canonical_correlation_rect(const Autocov& gamma,
                                               std::int64_t k, std::int64_t a,
                                               std::int64_t b) {
  if (k < 1) throw ConfigError("canonical_correlation: lag k must be >= 1");
  const SymToeplitz Sa = build_sigma(gamma, a);
  const SymToeplitz Sb = (a == b) ? Sa : build_sigma(gamma, b);
  const Matrix La = cholesky(Sa);
  const Matrix Lb = (a == b) ? La : cholesky(Sb);
  const CrossBlock cross = build_cross(gamma, k, a, b);

  const std::size_t na = static_cast<std::size_t>(a);
  const std::size_t nb = static_cast<std::size_t>(b);

  // Whiten: W = La^{-1} C Lb^{-T}. First E = C Lb^{-T} row by row, then
  // W^T = (La^{-1} E)^T column block by row of E^T; both passes are forward
  // substitutions over contiguous rows.
  Matrix E = cross.m;
  for (std::size_t i = 0; i < na; ++i) {
    trsv_lower(Lb, std::span<double>(E.row(i), nb));
  }
  Matrix Et = E.transposed();  // nb x na
  Matrix Wt(nb, na);
  for (std::size_t j = 0; j < nb; ++j) {
    std::copy(Et.row(j), Et.row(j) + na, Wt.row(j));
    trsv_lower(La, std::span<double>(Wt.row(j), na));
  }
  const Matrix W = Wt.transposed();  // na x nb

  // One-sided power iteration on W^T W, Rayleigh quotient stopping.
  CanonicalCorrResult out;
  std::vector<double> v(nb, 1.0 / std::sqrt(static_cast<double>(nb)));
  std::vector<double> t(na), w(nb);
  double rq = 0.0;
  bool ok = false;
  for (int it = 1; it <= kIterCap; ++it) {
    matvec(W, v, t);
    matvec(Wt, t, w);
    const double next = kernels::dot(v.data(), w.data(), nb);
    const double nrm = norm2(w);
    out.iterations = it;
    if (!(nrm > 1e-300)) {
      // Cross matrix is (numerically) zero: uncorrelated blocks.
      rq = 0.0;
      ok = true;
      break;
    }
    for (std::size_t i = 0; i < nb; ++i) v[i] = w[i] / nrm;
    if (std::fabs(next - rq) <= kRqTol * std::max(std::fabs(next), 1e-30)) {
      rq = next;
      ok = true;
      break;
    }
    rq = next;
  }
  out.converged = ok;
  if (!ok) {
    throw NumericalError("canonical_correlation: singular-value iteration did "
                         "not converge within " + std::to_string(kIterCap) +
                         " iterations");
  }
  const double sigma = std::sqrt(std::max(rq, 0.0));
  out.rho = std::min(sigma, 1.0);

  if (sigma <= 1e-300) {
    // Degenerate case: pick unit-variance axis weights.
    out.u.assign(na, 0.0);
    out.v.assign(nb, 0.0);
    out.u[0] = 1.0 / std::sqrt(Sa.first_row[0]);
    out.v[0] = 1.0 / std::sqrt(Sb.first_row[0]);
    return out;
  }

  // Back-transform the singular pair: u = La^{-T} p with p = W v / sigma,
  // v = Lb^{-T} v.
  matvec(W, v, t);
  const double tn = norm2(t);
  for (std::size_t i = 0; i < na; ++i) t[i] /= tn;
  trsv_lower_transposed(La, t);
  trsv_lower_transposed(Lb, v);
  out.u = std::move(t);
  out.v = std::move(v);

  // Unit block variance, enforced post hoc.
  const double su = std::sqrt(block_variance(Sa, out.u));
  const double sv = std::sqrt(block_variance(Sb, out.v));
  for (auto& x : out.u) x /= su;
  for (auto& x : out.v) x /= sv;

  // Common sign flip: sum of u entries nonnegative (keeps the covariance
  // between the two projections at +rho).
  const double us = kernels::sum(out.u.data(), na);
  if (us < 0.0) {
    for (auto& x : out.u) x = -x;
    for (auto& x : out.v) x = -x;
  }
  return out;
}

CanonicalCorrResult canonical_correlation(const Autocov& gamma, std::int64_t k,
                                          std::int64_t b) {
  return canonical_correlation_rect(gamma, k, b, b);
}

double block_sum_corr(const Autocov& gamma, std::int64_t k, std::int64_t b) {
  if (k < 1) throw ConfigError("block_sum_corr: lag k must be >= 1");
  if (b < 1) throw ConfigError("block_sum_corr: block size must be >= 1");
  double num = 0.0;
  for (std::int64_t m = -(b - 1); m <= b - 1; ++m) {
    num += static_cast<double>(b - (m < 0 ? -m : m)) * gamma(k + m);
  }
  double var = static_cast<double>(b) * gamma(0);
  for (std::int64_t m = 1; m <= b - 1; ++m) {
    var += 2.0 * static_cast<double>(b - m) * gamma(m);
  }
  return num / var;
}

double multivariate_rho(std::span<const double> component_rhos) {
  if (component_rhos.empty()) {
    throw ConfigError("multivariate_rho: need at least one component");
  }
  for (double r : component_rhos) {
    if (!(r >= -1e-9 && r <= 1.0 + 1e-9)) {
      throw ConfigError("multivariate_rho: component outside [0,1]");
    }
  }
  return *std::max_element(component_rhos.begin(), component_rhos.end());
}

}  // namespace lrd
