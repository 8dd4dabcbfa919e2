#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrd/kernels.hpp"
#include "lrd/rng.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  lrd::CounterRng rng(seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal_at(i) * 3.0;
  return v;
}

}  // namespace

TEST_CASE("scalar and dispatched kernels agree within accumulation tolerance") {
  // The AVX2 variants reassociate and fuse, so equality is tolerance-based.
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                        std::size_t{4}, std::size_t{15}, std::size_t{16},
                        std::size_t{67}, std::size_t{1023}, std::size_t{4096}}) {
    const auto a = random_vec(n, 10 + n);
    const auto b = random_vec(n, 20 + n);
    double mag = 1.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]);

    const double d_ref = lrd::kernels::scalar::dot(a.data(), b.data(), n);
    const double d_act = lrd::kernels::dot(a.data(), b.data(), n);
    CHECK(std::fabs(d_ref - d_act) <= 1e-12 * mag);

    const double s_ref = lrd::kernels::scalar::sum(a.data(), n);
    const double s_act = lrd::kernels::sum(a.data(), n);
    CHECK(std::fabs(s_ref - s_act) <= 1e-12 * mag);

    const double q_ref = lrd::kernels::scalar::sumsq_centered(a.data(), n, 0.25);
    const double q_act = lrd::kernels::sumsq_centered(a.data(), n, 0.25);
    CHECK(std::fabs(q_ref - q_act) <= 1e-12 * (mag + 1.0) * 10.0);

    auto y_ref = b, y_act = b;
    lrd::kernels::scalar::axpy(1.7, a.data(), y_ref.data(), n);
    lrd::kernels::axpy(1.7, a.data(), y_act.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(y_ref[i] - y_act[i]) <= 1e-13 * (std::fabs(y_ref[i]) + 1.0));
    }
  }
}

TEST_CASE("backend selection is sticky and reversible") {
  const std::string original(lrd::kernels::active_backend());
  REQUIRE(lrd::kernels::set_backend("scalar"));
  CHECK(lrd::kernels::active_backend() == "scalar");
  const double x[3] = {1.0, 2.0, 3.0};
  CHECK(lrd::kernels::dot(x, x, 3) == doctest::Approx(14.0));
  REQUIRE(lrd::kernels::set_backend("auto"));
  CHECK(lrd::kernels::active_backend() == original);
  CHECK_FALSE(lrd::kernels::set_backend("no-such-backend"));
}

TEST_CASE("exact small cases") {
  const double a[4] = {1.0, -2.0, 3.0, 0.5};
  const double b[4] = {2.0, 0.5, -1.0, 4.0};
  CHECK(lrd::kernels::dot(a, b, 4) == doctest::Approx(1.0 * 2 - 2 * 0.5 - 3.0 + 0.5 * 4));
  CHECK(lrd::kernels::sum(a, 4) == doctest::Approx(2.5));
  CHECK(lrd::kernels::sumsq_centered(a, 4, 0.625) ==
        doctest::Approx((0.375 * 0.375) + (2.625 * 2.625) + (2.375 * 2.375) +
                        (0.125 * 0.125)));
}
