#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel arithmetic kernels behind the dense linear algebra, the path
// synthesis and the block statistics. Scalar reference implementations are
// always built; an AVX2+FMA variant is selected at runtime on x86-64 CPUs
// that support it. The two variants are equivalence-tested against each
// other (FMA and vector reassociation change rounding, so equivalence is
// tolerance-based, not bitwise). Within one process the selection is fixed,
// which keeps every computation reproducible run to run.
//
// Selection order: LRD_KERNELS environment variable ("scalar", "avx2",
// "auto"), then CPU detection.

namespace lrd::kernels {

// Scalar reference kernels, also the portable fallback.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double center);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

// Dispatched entry points used by the rest of the library.
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double center);
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// Name of the active backend: "scalar" or "avx2".
std::string_view active_backend();

/// Force a backend ("scalar", "avx2", "auto"). Returns false if the request
/// cannot be honored on this CPU. Intended for tests and diagnostics; call
/// before spawning compute threads.
bool set_backend(std::string_view name);

}  // namespace lrd::kernels
