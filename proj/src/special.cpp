#include "lrd/special.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "lrd/errors.hpp"

namespace lrd {

double gamma_fn(double x) {
  if (x > 0.0) return std::tgamma(x);
  if (x == std::floor(x)) return std::numeric_limits<double>::infinity();
  // Gamma(x) = Gamma(1+x)/x repeatedly until the argument is positive.
  double prod = 1.0;
  while (x < 0.0) {
    prod *= x;
    x += 1.0;
  }
  return std::tgamma(x) / prod;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw ConfigError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

namespace {

// Eigenvalues of a symmetric tridiagonal matrix (diagonal d, off-diagonal e)
// by the implicit QL algorithm; ascending.
std::vector<double> tridiag_eigenvalues(std::vector<double> d,
                                        std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (++iter > 60) {
          throw NumericalError("gauss_hermite: QL iteration failed to converge");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (i == l) {
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
          }
        }
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

struct HermiteEval {
  double newton_step;  // H_n / H_n' at x
  double log_deriv;    // log |H_n'(x)| for the weight
};

// Orthonormal Hermite recurrence (weight e^{-t^2}) with exponent
// renormalization so large n neither overflows nor underflows.
HermiteEval hermite_eval(int n, double x) {
  double p1 = 0.7511255444649425;  // pi^{-1/4}
  double p2 = 0.0;
  double scale_log = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
    const double a = std::max(std::fabs(p1), std::fabs(p2));
    if (a > 1e120) {
      p1 /= a;
      p2 /= a;
      scale_log += std::log(a);
    }
  }
  const double pp = std::sqrt(2.0 * n) * p2;
  HermiteEval ev;
  ev.newton_step = p1 / pp;
  ev.log_deriv = std::log(std::fabs(pp)) + scale_log;
  return ev;
}

// Golub-Welsch nodes (Jacobi matrix of the e^{-t^2} weight) polished by a
// few Newton steps; weights 2 / H_n'(x)^2 evaluated in log space, so extreme
// nodes underflow gracefully to zero instead of corrupting the rule.
GaussHermite compute_gauss_hermite(int n) {
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(n) - 1);
  for (int j = 1; j < n; ++j) {
    off[static_cast<std::size_t>(j - 1)] = std::sqrt(0.5 * j);
  }
  std::vector<double> nodes = tridiag_eigenvalues(std::move(diag), std::move(off));

  GaussHermite gh;
  gh.nodes.assign(static_cast<std::size_t>(n), 0.0);
  gh.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Symmetrize the QL output, then polish.
    double z = 0.5 * (nodes[static_cast<std::size_t>(n - 1 - i)] -
                      nodes[static_cast<std::size_t>(i)]);
    HermiteEval ev{};
    for (int it = 0; it < 8; ++it) {
      ev = hermite_eval(n, z);
      z -= ev.newton_step;
      if (std::fabs(ev.newton_step) <= 1e-15 * (1.0 + std::fabs(z))) {
        ev = hermite_eval(n, z);
        break;
      }
    }
    const double w = 2.0 * std::exp(-2.0 * ev.log_deriv);
    gh.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    gh.nodes[static_cast<std::size_t>(i)] = -z;
    gh.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    gh.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) gh.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return gh;
}

}  // namespace

const GaussHermite& gauss_hermite(int n) {
  if (n < 1) throw ConfigError("gauss_hermite: need at least one node");
  static std::map<int, GaussHermite> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_hermite(n)).first;
  return it->second;
}

double normal_moment(const std::function<double(double)>& g, int n) {
  const GaussHermite& gh = gauss_hermite(n);
  const double root2 = std::sqrt(2.0);
  const double inv_root_pi = 0.5641895835477563;  // 1/sqrt(pi)
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += gh.weights[i] * g(root2 * gh.nodes[i]);
  return s * inv_root_pi;
}

AdaptiveMoment normal_moment_adaptive(const std::function<double(double)>& g,
                                      double abs_tol, double rel_tol,
                                      int n_start, int n_max) {
  AdaptiveMoment out;
  double prev = normal_moment(g, n_start);
  int n = n_start;
  while (n < n_max) {
    n *= 2;
    const double cur = normal_moment(g, n);
    const double diff = std::fabs(cur - prev);
    prev = cur;
    if (diff <= std::max(abs_tol, rel_tol * std::fabs(cur))) {
      out.converged = true;
      break;
    }
  }
  out.value = prev;
  out.nodes = n;
  return out;
}

}  // namespace lrd
