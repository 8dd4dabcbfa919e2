#pragma once

#include <cstddef>

// AVX2 variants live in a translation unit compiled with -mavx2 -mfma and
// must only be called after a runtime CPU check.

namespace lrd::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq_centered(const double* x, std::size_t n, double center);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace lrd::kernels::avx2
