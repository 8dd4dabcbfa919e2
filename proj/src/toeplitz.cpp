#include "lrd/toeplitz.hpp"

#include <cmath>

#include "lrd/kernels.hpp"

namespace lrd {

namespace {

constexpr std::int64_t kMaxDenseDim = 8192;
constexpr int kPowerIterCap = 10000;
constexpr double kRayleighTol = 1e-10;

void check_dim(std::int64_t b, const char* where) {
  if (b < 1) throw ConfigError(std::string(where) + ": block size must be >= 1");
  if (b > kMaxDenseDim) {
    throw ConfigError(std::string(where) + ": dense path capped at dimension " +
                      std::to_string(kMaxDenseDim));
  }
}

// Toeplitz matvec y = S x through the mirrored first row, so each row is a
// contiguous window and the dot kernel applies.
void toeplitz_matvec(const std::vector<double>& mirrored, std::size_t b,
                     const double* x, double* y) {
  // mirrored = [gamma(b-1) ... gamma(1) gamma(0) gamma(1) ... gamma(b-1)]
  for (std::size_t i = 0; i < b; ++i) {
    y[i] = kernels::dot(mirrored.data() + (b - 1 - i), x, b);
  }
}

std::vector<double> mirror_first_row(const SymToeplitz& S) {
  const std::size_t b = S.dim;
  std::vector<double> m(2 * b - 1);
  for (std::size_t j = 0; j < b; ++j) {
    m[b - 1 + j] = S.first_row[j];
    m[b - 1 - j] = S.first_row[j];
  }
  return m;
}

double norm2(const double* x, std::size_t n) {
  return std::sqrt(kernels::dot(x, x, n));
}

}  // namespace

SymToeplitz build_sigma(const Autocov& gamma, std::int64_t b) {
  check_dim(b, "build_sigma");
  SymToeplitz S;
  S.dim = static_cast<std::size_t>(b);
  S.first_row.resize(S.dim);
  for (std::int64_t j = 0; j < b; ++j) {
    S.first_row[static_cast<std::size_t>(j)] = gamma(j);
  }
  return S;
}

CrossBlock build_cross(const Autocov& gamma, std::int64_t k, std::int64_t a,
                       std::int64_t b) {
  if (k < 0) throw ConfigError("build_cross: lag k must be >= 0");
  check_dim(a, "build_cross");
  check_dim(b, "build_cross");
  CrossBlock cb;
  cb.k = k;
  cb.m = Matrix(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  for (std::int64_t i1 = 1; i1 <= a; ++i1) {
    double* row = cb.m.row(static_cast<std::size_t>(i1 - 1));
    for (std::int64_t i2 = 1; i2 <= b; ++i2) {
      row[i2 - 1] = gamma(i2 + k - i1);
    }
  }
  return cb;
}

Matrix cholesky(const SymToeplitz& S) {
  const std::size_t b = S.dim;
  Matrix L(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    double* li = L.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = L.row(j);
      li[j] = (S.at(i, j) - kernels::dot(li, lj, j)) / lj[j];
    }
    const double diag = S.at(i, i) - kernels::dot(li, li, i);
    if (!(diag > 0.0)) {
      throw NumericalError("cholesky: matrix not positive definite at pivot " +
                           std::to_string(i));
    }
    li[i] = std::sqrt(diag);
  }
  return L;
}

void trsv_lower(const Matrix& L, std::span<double> x) {
  const std::size_t n = L.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = L.row(i);
    x[i] = (x[i] - kernels::dot(li, x.data(), i)) / li[i];
  }
}

void trsv_lower_transposed(const Matrix& L, std::span<double> x) {
  const std::size_t n = L.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= L(j, ii) * x[j];
    x[ii] = s / L(ii, ii);
  }
}

PredictorCoeffs levinson_predictor(const Autocov& gamma, std::int64_t b) {
  check_dim(b, "levinson_predictor");
  const double g0 = gamma(0);
  if (!(g0 > 0.0)) throw NumericalError("levinson_predictor: gamma(0) <= 0");
  PredictorCoeffs out;
  out.b = b;
  out.horizon = b + 1;
  std::vector<double>& a = out.phi;
  a.assign(static_cast<std::size_t>(b), 0.0);
  std::vector<double> prev(static_cast<std::size_t>(b), 0.0);
  a[0] = gamma(1) / g0;
  double err = g0 * (1.0 - a[0] * a[0]);
  for (std::int64_t m = 1; m < b; ++m) {
    if (!(err > 0.0)) {
      throw NumericalError("levinson_predictor: prediction variance hit zero "
                           "at order " + std::to_string(m));
    }
    double acc = gamma(m + 1);
    for (std::int64_t i = 1; i <= m; ++i) {
      acc -= a[static_cast<std::size_t>(i - 1)] * gamma(m + 1 - i);
    }
    const double kappa = acc / err;
    std::copy(a.begin(), a.begin() + m, prev.begin());
    for (std::int64_t i = 1; i <= m; ++i) {
      a[static_cast<std::size_t>(i - 1)] =
          prev[static_cast<std::size_t>(i - 1)] -
          kappa * prev[static_cast<std::size_t>(m - i)];
    }
    a[static_cast<std::size_t>(m)] = kappa;
    err *= (1.0 - kappa * kappa);
  }
  return out;
}

PredictorCoeffs multistep_predictor(const Autocov& gamma, std::int64_t b,
                                    std::int64_t n) {
  check_dim(b, "multistep_predictor");
  if (n < b + 1) {
    throw ConfigError("multistep_predictor: horizon n must be >= b+1");
  }
  const SymToeplitz S = build_sigma(gamma, b);
  const Matrix L = cholesky(S);
  // Solve Sigma_b a = (gamma(n-1), ..., gamma(n-b))^T; the projection onto
  // Z_1..Z_b has weight a_i on Z_i, i.e. phi_{bj} = a_{b-j+1}.
  std::vector<double> rhs(static_cast<std::size_t>(b));
  for (std::int64_t i = 1; i <= b; ++i) {
    rhs[static_cast<std::size_t>(i - 1)] = gamma(n - i);
  }
  trsv_lower(L, rhs);
  trsv_lower_transposed(L, rhs);
  PredictorCoeffs out;
  out.b = b;
  out.horizon = n;
  out.phi.assign(static_cast<std::size_t>(b), 0.0);
  for (std::int64_t j = 1; j <= b; ++j) {
    out.phi[static_cast<std::size_t>(j - 1)] = rhs[static_cast<std::size_t>(b - j)];
  }
  return out;
}

ExtremeEigs extreme_eigs(const SymToeplitz& S) {
  const std::size_t b = S.dim;
  ExtremeEigs out;
  if (b == 1) {
    out.min = out.max = S.first_row[0];
    return out;
  }
  const std::vector<double> mirrored = mirror_first_row(S);
  std::vector<double> x(b, 1.0 / std::sqrt(static_cast<double>(b)));
  std::vector<double> y(b);

  // Largest eigenvalue: forward power iteration, Rayleigh quotient stop.
  double rq = 0.0;
  bool ok = false;
  for (int it = 1; it <= kPowerIterCap; ++it) {
    toeplitz_matvec(mirrored, b, x.data(), y.data());
    const double next = kernels::dot(x.data(), y.data(), b);
    const double nrm = norm2(y.data(), b);
    if (!(nrm > 0.0)) break;
    for (std::size_t i = 0; i < b; ++i) x[i] = y[i] / nrm;
    out.iterations_max = it;
    if (std::fabs(next - rq) <= kRayleighTol * std::fabs(next)) {
      rq = next;
      ok = true;
      break;
    }
    rq = next;
  }
  out.max = rq;
  out.converged = ok;

  // Smallest eigenvalue: inverse power iteration through the Cholesky
  // factor, seeded with the constant vector.
  const Matrix L = cholesky(S);
  std::fill(x.begin(), x.end(), 1.0 / std::sqrt(static_cast<double>(b)));
  double inv_rq = 0.0;
  ok = false;
  for (int it = 1; it <= kPowerIterCap; ++it) {
    std::copy(x.begin(), x.end(), y.begin());
    trsv_lower(L, y);
    trsv_lower_transposed(L, y);
    const double next = kernels::dot(x.data(), y.data(), b);  // x' S^{-1} x
    const double nrm = norm2(y.data(), b);
    if (!(nrm > 0.0)) break;
    for (std::size_t i = 0; i < b; ++i) x[i] = y[i] / nrm;
    out.iterations_min = it;
    if (std::fabs(next - inv_rq) <= kRayleighTol * std::fabs(next)) {
      inv_rq = next;
      ok = true;
      break;
    }
    inv_rq = next;
  }
  if (!(inv_rq > 0.0)) {
    throw NumericalError("extreme_eigs: inverse iteration degenerated");
  }
  out.min = 1.0 / inv_rq;
  out.converged = out.converged && ok;
  if (!out.converged) {
    throw NumericalError("extreme_eigs: power iteration did not converge in " +
                         std::to_string(kPowerIterCap) + " iterations");
  }
  return out;
}

}  // namespace lrd
