#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrd/models.hpp"
#include "lrd/toeplitz.hpp"
#include "oracles.hpp"

using lrd::CovarianceModel;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("farima0d0 autocovariance: frozen value, exact ratio, tail rate") {
  // gamma(0) = Gamma(1-2d)/Gamma(1-d)^2 at d = 0.25, 30-digit oracle value.
  const auto g = lrd::farima0d0_autocov(lrd::MemoryParam(0.25), 1.0, 4);
  CHECK(g[0] == doctest::Approx(1.18034059901609622605).epsilon(1e-13));
  CHECK(g[1] / g[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // gamma(2n)/gamma(n) -> 2^{2d-1} (frozen 2^{-0.4} at d = 0.3).
  const auto h = lrd::farima0d0_autocov(lrd::MemoryParam(0.3), 1.0, 20000);
  CHECK(h[20000] / h[10000] ==
        doctest::Approx(0.757858283255199041).epsilon(0.01));

  // sigma2 scales linearly.
  const auto s = lrd::farima0d0_autocov(lrd::MemoryParam(0.25), 2.5, 2);
  CHECK(s[1] == doctest::Approx(2.5 * g[1]).epsilon(1e-14));

  CHECK_THROWS_AS(lrd::farima0d0_autocov(lrd::MemoryParam(0.5), 1.0, 1),
                  lrd::ConfigError);
  CHECK_THROWS_AS(lrd::MemoryParam(0.0), lrd::ConfigError);
  CHECK_THROWS_AS(lrd::MemoryParam(-0.1), lrd::ConfigError);
}

TEST_CASE("farima0d0 autocovariance is strictly positive and decreasing") {
  for (double d : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45}) {
    const auto g = lrd::farima0d0_autocov(lrd::MemoryParam(d), 1.0, 10000);
    for (std::size_t n = 1; n < g.size(); ++n) {
      REQUIRE(g[n] > 0.0);
      REQUIRE(g[n] < g[n - 1]);
    }
  }
}

TEST_CASE("single-lag farima0d0 autocov matches the recursion") {
  const CovarianceModel m = CovarianceModel::farima0d0(0.35, 1.7);
  const auto g = lrd::farima0d0_autocov(lrd::MemoryParam(0.35), 1.7, 3000);
  for (std::int64_t l : {0, 1, 7, 100, 3000}) {
    CHECK(m.autocov(l) ==
          doctest::Approx(g[static_cast<std::size_t>(l)]).epsilon(1e-11));
  }
  CHECK(m.autocov(-7) == m.autocov(7));
}

TEST_CASE("fGn autocovariance: closed form and tail asymptotics") {
  const auto g = lrd::fgn_autocov(0.75, 1.0, 3);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-14));
  // (2^{1.5} - 2)/2, frozen.
  CHECK(g[1] == doctest::Approx(0.414213562373095049).epsilon(1e-13));

  // gamma(n) n^{2-2H} -> H(2H-1) = 0.375 within 1% at n = 1e4.
  const auto h = lrd::fgn_autocov(0.75, 1.0, 10000);
  CHECK(h[10000] * std::pow(10000.0, 0.5) == doctest::Approx(0.375).epsilon(0.01));
  for (std::size_t n = 1; n < h.size(); ++n) REQUIRE(h[n] > 0.0);

  // Large-lag series form agrees with the direct second difference where
  // both are reliable.
  const auto e = lrd::fgn_autocov(0.9, 2.0, 1200);
  const double direct = 0.5 * 2.0 *
      (std::pow(1201.0, 1.8) - 2.0 * std::pow(1200.0, 1.8) + std::pow(1199.0, 1.8));
  CHECK(e[1200] == doctest::Approx(direct).epsilon(1e-8));

  CHECK_THROWS_AS(lrd::fgn_autocov(0.5, 1.0, 1), lrd::ConfigError);
  CHECK_THROWS_AS(lrd::fgn_autocov(1.0, 1.0, 1), lrd::ConfigError);
  CHECK_THROWS_AS(lrd::fgn_autocov(0.4, 1.0, 1), lrd::ConfigError);
}

TEST_CASE("white-noise boundary oracle: H = 1/2 second difference vanishes") {
  // Allowed only in the test harness: the H -> 1/2 closed form gives
  // gamma(n) = 0 for n >= 1.
  for (std::int64_t n : {1, 2, 5}) {
    const double nn = static_cast<double>(n);
    const double v = 0.5 * (std::pow(nn + 1.0, 1.0) - 2.0 * nn + std::pow(nn - 1.0, 1.0));
    CHECK(v == doctest::Approx(0.0));
  }
}

TEST_CASE("farima(p,d,q): degenerate case equals farima0d0") {
  const CovarianceModel m = CovarianceModel::farima(0.3, {}, {}, 1.0);
  const auto base = lrd::farima0d0_autocov(lrd::MemoryParam(0.3), 1.0, 50);
  const auto got = lrd::farima_pdq_autocov(m, 50);
  for (std::size_t i = 0; i <= 50; ++i) {
    CHECK(got[i] == doctest::Approx(base[i]).epsilon(1e-12));
  }
}

TEST_CASE("farima MA(1): two-term convolution closed form") {
  const double th = 0.5, d = 0.3;
  const CovarianceModel m = CovarianceModel::farima(d, {}, {th}, 1.0);
  const auto base = lrd::farima0d0_autocov(lrd::MemoryParam(d), 1.0, 3);
  const auto got = lrd::farima_pdq_autocov(m, 0);
  CHECK(got[0] ==
        doctest::Approx((1.0 + th * th) * base[0] + 2.0 * th * base[1]).epsilon(1e-12));
}

TEST_CASE("farima AR(1): autocovariance matches the spectral quadrature oracle") {
  const double d = 0.2, phi = 0.5;
  const CovarianceModel m = CovarianceModel::farima(d, {phi}, {}, 1.0);
  const auto got = lrd::farima_pdq_autocov(m, 8);
  for (std::int64_t n = 0; n <= 8; ++n) {
    const double oracle = oracle::spectral_to_autocov(
        [&](double lam) { return m.spectral(lam); }, d, n);
    CHECK(got[static_cast<std::size_t>(n)] ==
          doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("farima rejects AR roots on or inside the unit circle") {
  CHECK_THROWS_AS(CovarianceModel::farima(0.2, {1.0}, {}, 1.0), lrd::ConfigError);
  CHECK_THROWS_AS(CovarianceModel::farima(0.2, {2.0}, {}, 1.0), lrd::ConfigError);
  CHECK_THROWS_AS(CovarianceModel::farima(0.2, {0.5, 0.5}, {}, 1.0),
                  lrd::ConfigError);
  CHECK_NOTHROW(CovarianceModel::farima(0.2, {0.5, -0.2}, {0.3}, 1.0));
}

TEST_CASE("spectral density: pole, boundary and low-frequency slope") {
  const CovarianceModel m = CovarianceModel::farima0d0(0.3, 1.0);
  // f_d(pi) = |1-e^{i pi}|^{-2d}/(2 pi) = 2^{-2d}/(2 pi). (The form without
  // the 2^{-2d} factor would not Fourier-pair with the product-recursion
  // covariance; the quadrature tests below pin the pairing.)
  CHECK(lrd::spectral_density(m, kPi) ==
        doctest::Approx(std::pow(2.0, -0.6) / (2.0 * kPi)).epsilon(1e-13));
  // f(lambda) lambda^{2d} -> 1/(2 pi) as lambda -> 0+.
  const double lam = 1e-6;
  CHECK(m.spectral(lam) * std::pow(lam, 0.6) ==
        doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-3));
  CHECK_THROWS_AS(m.spectral(0.0), lrd::ConfigError);
}

TEST_CASE("fGn spectral density Fourier-inverts to the covariance") {
  const CovarianceModel m = CovarianceModel::fgn(0.75, 1.0);
  const double d = 0.25;
  const double g1 = oracle::spectral_to_autocov(
      [&](double lam) { return m.spectral(lam); }, d, 1);
  CHECK(g1 == doctest::Approx(m.autocov(1)).epsilon(1e-4));
}

TEST_CASE("spectral integrates back to autocov(0) for every family") {
  const auto models = {
      CovarianceModel::farima0d0(0.3, 1.0),
      CovarianceModel::farima(0.2, {0.5}, {0.3}, 1.5),
      CovarianceModel::fgn(0.8, 2.0),
      CovarianceModel::product(0.25, {1.0, 0.3, 0.1}),
  };
  for (const auto& m : models) {
    const double g0 = oracle::spectral_to_autocov(
        [&](double lam) { return m.spectral(lam); }, m.memory_d(), 0);
    CHECK(g0 == doctest::Approx(m.autocov(0)).epsilon(1e-4));
  }
}

TEST_CASE("product family: delta gamma0 reduces to farima0d0") {
  const CovarianceModel p = CovarianceModel::product(0.3, {2.0 * kPi});
  const CovarianceModel f = CovarianceModel::farima0d0(0.3, 1.0);
  for (std::int64_t l : {0, 1, 5, 40}) {
    CHECK(p.autocov(l) == doctest::Approx(f.autocov(l)).epsilon(1e-12));
  }
  // Negative f0 on the grid is rejected.
  CHECK_THROWS_AS(CovarianceModel::product(0.3, {1.0, 2.0}), lrd::ConfigError);
}

TEST_CASE("covariance Toeplitz matrices are positive definite up to b = 128") {
  const auto models = {
      CovarianceModel::farima0d0(0.45, 1.0),
      CovarianceModel::farima(0.2, {0.5}, {0.3}, 1.0),
      CovarianceModel::fgn(0.75, 1.0),
      CovarianceModel::product(0.25, {1.0, 0.3, 0.1}),
  };
  for (const auto& m : models) {
    const lrd::Autocov acf = m.autocov_table(128);
    for (std::int64_t b : {1, 2, 17, 64, 128}) {
      CHECK_NOTHROW(lrd::cholesky(lrd::build_sigma(acf, b)));
    }
  }
}

TEST_CASE("hermite rank of simple maps") {
  const auto r1 = lrd::hermite_rank(lrd::SubordinationMap::named("identity"));
  REQUIRE(r1.rank.has_value());
  CHECK(*r1.rank == 1);
  CHECK(r1.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));

  const auto r2 = lrd::hermite_rank(lrd::SubordinationMap::named("square"));
  REQUIRE(r2.rank.has_value());
  CHECK(*r2.rank == 2);
  CHECK(r2.coeffs[0] < 1e-10);                       // E[(Z^2-1) Z] = 0
  CHECK(r2.coeffs[1] == doctest::Approx(2.0).epsilon(1e-10));

  const auto rs = lrd::hermite_rank(lrd::SubordinationMap::named("sign"));
  REQUIRE(rs.rank.has_value());
  CHECK(*rs.rank == 1);
  // E[sign(Z) Z] = E|Z| = sqrt(2/pi), frozen 0.7978845608028654.
  CHECK(rs.coeffs[0] == doctest::Approx(0.7978845608028654).epsilon(1e-3));
}

TEST_CASE("hermite rank of Hermite polynomials is their degree") {
  for (int p = 1; p <= 4; ++p) {
    const auto r = lrd::hermite_rank(
        lrd::SubordinationMap::named("hermite:" + std::to_string(p)));
    REQUIRE(r.rank.has_value());
    CHECK(*r.rank == p);
  }
}

TEST_CASE("hermite rank rejects non-square-integrable maps") {
  lrd::SubordinationMap bad{[](double z) { return std::exp(z * z); }, "exp_z2"};
  CHECK_THROWS_AS(lrd::hermite_rank(bad), lrd::ConfigError);
}

TEST_CASE("apply_subordination") {
  const std::vector<double> path{1.0, -1.0, 2.0};
  const auto id = lrd::apply_subordination(lrd::SubordinationMap::named("identity"), path);
  CHECK(id == path);
  const auto sq = lrd::apply_subordination(lrd::SubordinationMap::named("square"), path);
  CHECK(sq == std::vector<double>{1.0, 1.0, 4.0});
  const auto sg = lrd::apply_subordination(lrd::SubordinationMap::named("sign"),
                                           std::vector<double>{-3.0, 0.0, 9.0});
  CHECK(sg == std::vector<double>{-1.0, 0.0, 1.0});
}
