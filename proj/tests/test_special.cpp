#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrd/errors.hpp"
#include "lrd/rng.hpp"
#include "lrd/special.hpp"

// Frozen high-precision values (30-digit arithmetic):
//   Gamma(0.1)  = 9.51350769866873183629248717727
//   Gamma(-0.3) = -4.32685110882519261893723726384
//   Gamma(10.5) = 1133278.38894878556733457416559
//   Gamma(0.5)  = 1.77245385090551602729816748334

TEST_CASE("gamma against frozen oracle values") {
  CHECK(lrd::gamma_fn(0.1) == doctest::Approx(9.51350769866873183629).epsilon(1e-13));
  CHECK(lrd::gamma_fn(-0.3) == doctest::Approx(-4.32685110882519261894).epsilon(1e-13));
  CHECK(lrd::gamma_fn(10.5) == doctest::Approx(1133278.38894878556733).epsilon(1e-13));
  CHECK(lrd::gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("gamma identities: recursion and reflection") {
  for (double x : {0.13, 0.77, 1.9, 3.25, 7.5}) {
    CHECK(lrd::gamma_fn(x + 1.0) ==
          doctest::Approx(x * lrd::gamma_fn(x)).epsilon(1e-13));
  }
  for (double x : {0.2, 0.35, 0.6, 0.85}) {
    CHECK(lrd::gamma_fn(x) * lrd::gamma_fn(1.0 - x) ==
          doctest::Approx(std::numbers::pi / std::sin(std::numbers::pi * x))
              .epsilon(1e-13));
  }
  // Negative arguments follow Gamma(x) = Gamma(1+x)/x.
  for (double x : {-0.4, -1.3, -2.7}) {
    CHECK(lrd::gamma_fn(x) ==
          doctest::Approx(lrd::gamma_fn(x + 1.0) / x).epsilon(1e-12));
  }
  CHECK(std::isinf(lrd::gamma_fn(0.0)));
  CHECK(std::isinf(lrd::gamma_fn(-2.0)));
}

TEST_CASE("Gauss-Hermite weights reproduce normal moments") {
  // E[Z^{2k}] = (2k-1)!! for the standard normal; exact for the rule's
  // polynomial degree.
  const double dfact[9] = {1, 1, 3, 15, 105, 945, 10395, 135135, 2027025};
  for (int nodes : {64, 128, 256}) {
    for (int k = 0; k <= 8; ++k) {
      const double m = lrd::normal_moment(
          [k](double z) { return std::pow(z, 2 * k); }, nodes);
      CHECK(m == doctest::Approx(dfact[k]).epsilon(1e-11));
    }
    const double odd = lrd::normal_moment([](double z) { return z * z * z; }, nodes);
    CHECK(std::fabs(odd) < 1e-13);
  }
}

TEST_CASE("adaptive moment handles E|Z|") {
  const auto r = lrd::normal_moment_adaptive(
      [](double z) { return std::fabs(z); }, 1e-10, 1e-10, 128, 4096);
  CHECK(r.value == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(2e-4));
}

TEST_CASE("inverse normal CDF against frozen quantiles") {
  CHECK(lrd::inv_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lrd::inv_normal_cdf(0.975) ==
        doctest::Approx(1.95996398454005423552).epsilon(1e-14));
  CHECK(lrd::inv_normal_cdf(0.99) ==
        doctest::Approx(2.32634787404084110089).epsilon(1e-14));
  CHECK(lrd::inv_normal_cdf(0.3) ==
        doctest::Approx(-0.524400512708040784038).epsilon(1e-14));
  CHECK(lrd::inv_normal_cdf(1e-6) ==
        doctest::Approx(-4.75342430882289894819).epsilon(1e-13));
  // Round trip through the standard library's erfc-based CDF.
  for (double p : {0.001, 0.1, 0.42, 0.9, 0.9999}) {
    const double z = lrd::inv_normal_cdf(p);
    const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(back == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lrd::inv_normal_cdf(0.0), lrd::ConfigError);
  CHECK_THROWS_AS(lrd::inv_normal_cdf(1.0), lrd::ConfigError);
}

TEST_CASE("counter rng: pure function of (key, index)") {
  lrd::CounterRng a(42), b(42);
  for (int i = 0; i < 5; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.word_at(3) == b.word_at(3));
  CHECK(lrd::CounterRng::derive_stream(7, 0) != lrd::CounterRng::derive_stream(7, 1));
  // Uniforms stay inside (0,1).
  lrd::CounterRng c(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
