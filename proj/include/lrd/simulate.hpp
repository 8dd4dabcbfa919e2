#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lrd/models.hpp"

namespace lrd {

enum class SimMethod { cholesky, circulant, automatic };

std::string to_string(SimMethod m);
SimMethod sim_method_from_string(const std::string& s);

struct PathRequest {
  CovarianceModel model;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  SimMethod method = SimMethod::automatic;
};

/// Exact Gaussian sampler for one (model, n, method) triple. Construction
/// does the expensive part (Cholesky factor or circulant eigenvalues); each
/// generate() draws an independent path from a counter-based stream, so the
/// generator is immutable and safe to share across replication workers.
///
/// The circulant embedding starts at size 2(n-1) and doubles until the
/// eigenvalues are nonnegative (cap 8n). Eigenvalues in [-1e-8 gamma(0), 0)
/// are clipped to zero and counted; anything more negative fails the
/// embedding. `automatic` uses the circulant path for n > 1024 and falls
/// back to Cholesky when the embedding fails.
class PathGenerator {
 public:
  PathGenerator(const CovarianceModel& model, std::int64_t n, SimMethod method);
  ~PathGenerator();
  PathGenerator(const PathGenerator&) = delete;
  PathGenerator& operator=(const PathGenerator&) = delete;

  std::vector<double> generate(std::uint64_t seed) const;

  SimMethod method_used() const;
  int clipped_eigenvalues() const;
  std::int64_t embedding_size() const;  // 0 on the Cholesky path

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot draw: N(0, Sigma_n) path, deterministic in (model, n, seed,
/// method).
std::vector<double> gen_gaussian(const PathRequest& req);

/// G applied elementwise to a Gaussian path from the same request.
std::vector<double> gen_subordinated(const PathRequest& req,
                                     const SubordinationMap& g);

/// Stochastic volatility construction X_n = G(eta_n) F(xi_n) with {xi_n}
/// i.i.d. standard normal independent of the long-memory {eta_n}. F must be
/// centered: |E F(xi)| <= 1e-8 is verified by quadrature. Streams eta and
/// xi are derived from the seed as streams 0 and 1.
std::vector<double> gen_stochvol(const CovarianceModel& eta_model,
                                 const SubordinationMap& g,
                                 const SubordinationMap& f, std::int64_t n,
                                 std::uint64_t seed);

}  // namespace lrd
