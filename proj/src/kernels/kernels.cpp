#include "lrd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#if defined(LRD_HAVE_AVX2)
#include "kernels_internal.hpp"
#endif

namespace lrd::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sumsq_centered(const double* x, std::size_t n, double center) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    s += d * d;
  }
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace scalar

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq_centered)(const double*, std::size_t, double);
  void (*axpy)(double, const double*, double*, std::size_t);
  const char* name;
};

constexpr Table kScalar{scalar::dot, scalar::sum, scalar::sumsq_centered,
                        scalar::axpy, "scalar"};

#if defined(LRD_HAVE_AVX2)
constexpr Table kAvx2{avx2::dot, avx2::sum, avx2::sumsq_centered, avx2::axpy,
                      "avx2"};

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Table* detect() {
#if defined(LRD_HAVE_AVX2)
  const char* env = std::getenv("LRD_KERNELS");
  const std::string req = env ? env : "auto";
  if (req == "scalar") return &kScalar;
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> t{detect()};
  return t;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return active().load(std::memory_order_relaxed)->dot(a, b, n);
}

double sum(const double* x, std::size_t n) {
  return active().load(std::memory_order_relaxed)->sum(x, n);
}

double sumsq_centered(const double* x, std::size_t n, double center) {
  return active().load(std::memory_order_relaxed)->sumsq_centered(x, n, center);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().load(std::memory_order_relaxed)->axpy(alpha, x, y, n);
}

std::string_view active_backend() {
  return active().load(std::memory_order_relaxed)->name;
}

bool set_backend(std::string_view name) {
  if (name == "scalar") {
    active().store(&kScalar, std::memory_order_relaxed);
    return true;
  }
#if defined(LRD_HAVE_AVX2)
  if (name == "avx2") {
    if (!cpu_has_avx2()) return false;
    active().store(&kAvx2, std::memory_order_relaxed);
    return true;
  }
#else
  if (name == "avx2") return false;
#endif
  if (name == "auto") {
    active().store(detect(), std::memory_order_relaxed);
    return true;
  }
  return false;
}

}  // namespace lrd::kernels
