#pragma once

#include <functional>
#include <vector>

namespace lrd {

/// Gamma function. Positive arguments delegate to the standard library
/// implementation (relative error well under 1e-13); x <= 0 is evaluated by
/// the recursion Gamma(x) = Gamma(1+x)/x, with +infinity at non-positive
/// integers.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Gauss-Hermite rule for integral of h(t) * exp(-t^2) dt over the real line.
struct GaussHermite {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive, sum = sqrt(pi)
};

/// Nodes and weights for an n-point rule (Newton iteration on the
/// orthonormal Hermite recurrence). Results are cached per n.
const GaussHermite& gauss_hermite(int n);

/// E[g(Z)] for standard normal Z with a fixed n-point rule.
double normal_moment(const std::function<double(double)>& g, int n);

struct AdaptiveMoment {
  double value = 0.0;
  bool converged = false;
  int nodes = 0;
};

/// E[g(Z)] computed by doubling the rule from n_start until successive
/// values agree within max(abs_tol, rel_tol*|value|) or n_max is reached.
AdaptiveMoment normal_moment_adaptive(const std::function<double(double)>& g,
                                      double abs_tol = 1e-10,
                                      double rel_tol = 1e-10,
                                      int n_start = 128, int n_max = 2048);

}  // namespace lrd
