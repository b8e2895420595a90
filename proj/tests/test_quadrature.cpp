#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "wtail/normal.hpp"
#include "wtail/quadrature.hpp"

namespace {

TEST_CASE("polynomials and smooth integrands are exact to tolerance") {
  auto r1 = wtail::integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r1.converged);
  CHECK(r1.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

  auto r2 = wtail::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r2.converged);
  CHECK(r2.value == Catch::Approx(2.0).epsilon(1e-13));

  auto r3 = wtail::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  const double simpson =
      oracle::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r3.value == Catch::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(r3.value == Catch::Approx(simpson).epsilon(1e-12));
}

TEST_CASE("kinked integrands are exact when split at the kink") {
  auto f = [](double x) { return std::fabs(x - 0.3); };
  auto split = wtail::integrate_segments(f, {0.0, 0.3, 1.0});
  CHECK(split.converged);
  CHECK(split.value == Catch::Approx(0.29).epsilon(1e-14));
}

TEST_CASE("integrable endpoint singularity converges") {
  auto f = [](double u) { return 1.0 / std::sqrt(1.0 - u); };
  auto r = wtail::integrate(f, 0.0, 1.0, 1e-12, 1e-9, 400000);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("semi-infinite integrals") {
  auto r1 = wtail::integrate_to_infinity(
      [](double x) { return std::exp(-x); }, 0.0);
  CHECK(r1.converged);
  CHECK(r1.value == Catch::Approx(1.0).epsilon(1e-11));

  auto r2 = wtail::integrate_to_infinity(
      [](double x) { return std::pow(x, -3.0); }, 1.0, {2.0, 10.0});
  CHECK(r2.converged);
  CHECK(r2.value == Catch::Approx(0.5).epsilon(1e-11));

  const double simpson = oracle::integrate_to_infinity(
      [](double x) { return x * std::exp(-0.5 * x * x); }, 0.0);
  auto r3 = wtail::integrate_to_infinity(
      [](double x) { return x * std::exp(-0.5 * x * x); }, 0.0);
  CHECK(r3.value == Catch::Approx(1.0).epsilon(1e-11));
  CHECK(r3.value == Catch::Approx(simpson).epsilon(1e-11));
}

TEST_CASE("require_converged throws with the operation name") {
  wtail::QuadratureResult bad;
  bad.converged = false;
  bad.error = 0.5;
  CHECK_THROWS_AS(wtail::require_converged(bad, "freckle_op"),
                  std::runtime_error);
  try {
    wtail::require_converged(bad, "freckle_op");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("freckle_op") != std::string::npos);
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(wtail::normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(wtail::normal_cdf(1.959963984540054) ==
        Catch::Approx(0.975).epsilon(1e-12));
  CHECK(wtail::normal_sf(3.0) ==
        Catch::Approx(1.0 - wtail::normal_cdf(3.0)).epsilon(1e-12));
  // Far tail against the classic series bound: phi(z)/z * (1 - 1/z^2) <
  // sf(z) < phi(z)/z.
  const double z = 8.0;
  const double upper = wtail::normal_pdf(z) / z;
  CHECK(wtail::normal_sf(z) < upper);
  CHECK(wtail::normal_sf(z) > upper * (1.0 - 1.0 / (z * z)));

  CHECK(wtail::normal_ppf(0.5) == Catch::Approx(0.0).margin(1e-15));
  CHECK(wtail::normal_ppf(0.975) ==
        Catch::Approx(1.959963984540054).epsilon(1e-13));
  for (double zz : {-8.0, -3.2, -1.0, -0.1, 0.0, 0.35, 2.5}) {
    CHECK(wtail::normal_ppf(wtail::normal_cdf(zz)) ==
          Catch::Approx(zz).margin(2e-9).epsilon(1e-12));
  }
  // Above ~2 sigma the cdf saturates toward 1 in double precision, so the
  // upper tail round-trips through the survival function instead.
  for (double zz : {2.5, 6.0, 8.5, 12.0}) {
    CHECK(-wtail::normal_ppf(wtail::normal_sf(zz)) ==
          Catch::Approx(zz).epsilon(1e-12));
  }
  CHECK(std::isinf(wtail::normal_ppf(0.0)));
  CHECK(std::isinf(wtail::normal_ppf(1.0)));
  CHECK_THROWS_AS(wtail::normal_ppf(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(wtail::normal_ppf(1.1), std::invalid_argument);
}

TEST_CASE("bivariate normal cdf: closed-form diagonal values") {
  for (double rho : {-0.95, -0.5, -0.1, 0.0, 0.3, 0.5, 0.9}) {
    const double expected = 0.25 + std::asin(rho) / (2.0 * M_PI);
    CHECK(wtail::bivariate_normal_cdf(0.0, 0.0, rho) ==
          Catch::Approx(expected).epsilon(1e-12));
  }
  // rho = 0.5 on the diagonal is exactly 1/3.
  CHECK(wtail::bivariate_normal_cdf(0.0, 0.0, 0.5) ==
        Catch::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("bivariate normal cdf: boundary correlations and margins") {
  CHECK(wtail::bivariate_normal_cdf(0.7, -0.2, 1.0) ==
        Catch::Approx(wtail::normal_cdf(-0.2)).epsilon(1e-14));
  CHECK(wtail::bivariate_normal_cdf(0.7, -0.2, -1.0) ==
        Catch::Approx(std::max(0.0, wtail::normal_cdf(0.7) +
                                        wtail::normal_cdf(-0.2) - 1.0))
            .epsilon(1e-13));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(wtail::bivariate_normal_cdf(1.3, inf, 0.6) ==
        Catch::Approx(wtail::normal_cdf(1.3)).epsilon(1e-14));
  CHECK(wtail::bivariate_normal_cdf(-inf, 1.3, 0.6) == 0.0);
  CHECK_THROWS_AS(wtail::bivariate_normal_cdf(0.0, 0.0, 1.5),
                  std::invalid_argument);
}

TEST_CASE("bivariate normal cdf agrees with the conditional-slice oracle") {
  // Independent route: Phi2(h, k, rho) = Int_{-inf}^{h} pdf(z) *
  // Phi((k - rho z) / sqrt(1 - rho^2)) dz, by conditioning on the first
  // coordinate.  Computed with the test-side Simpson integrator.
  auto oracle_phi2 = [](double h, double k, double rho) {
    const double sig = std::sqrt(1.0 - rho * rho);
    return oracle::integrate(
        [k, rho, sig](double z) {
          return wtail::normal_pdf(z) *
                 wtail::normal_cdf((k - rho * z) / sig);
        },
        -10.0, h, 1e-14);
  };
  for (double h : {-1.5, -0.3, 0.7, 2.1}) {
    for (double k : {-2.0, 0.1, 1.4}) {
      for (double rho : {-0.9, -0.35, 0.2, 0.8}) {
        const double lib = wtail::bivariate_normal_cdf(h, k, rho);
        const double ora = oracle_phi2(h, k, rho);
        CHECK(lib == Catch::Approx(ora).margin(5e-12));
      }
    }
  }
}

TEST_CASE("bivariate normal cdf is monotone in correlation") {
  double prev = 0.0;
  bool first = true;
  for (double rho = -0.99; rho <= 0.995; rho += 0.11) {
    const double v = wtail::bivariate_normal_cdf(0.8, -0.4, rho);
    if (!first) CHECK(v >= prev - 1e-13);
    prev = v;
    first = false;
  }
}

}  // namespace
