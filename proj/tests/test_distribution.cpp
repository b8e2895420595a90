#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wtail/distribution.hpp"

using wtail::Distribution;

namespace {

std::vector<Distribution> catalogue() {
  return {
      Distribution::pareto(2.0, 1.0),
      Distribution::pareto(3.0, 2.5),
      Distribution::frechet(2.0, 1.0),
      Distribution::lognormal(0.0, 1.0),
      Distribution::weibull_heavy(0.5, 1.0),
      Distribution::uniform(0.0, 1.0),
      Distribution::uniform(0.5, 1.5),
      Distribution::two_point(1.0, 0.5, 2.0, 0.5),
      Distribution::bounded_discrete({0.0, 1.0, 3.0}, {0.2, 0.5, 0.3}),
      Distribution::perturbed_pareto(2.0, 1.0, 0.2, std::exp(1.0)),
  };
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Distribution::pareto(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::pareto(2.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::frechet(-2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::lognormal(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::weibull_heavy(1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::weibull_heavy(0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::two_point(-1.0, 0.5, 2.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::two_point(1.0, 0.6, 2.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::bounded_discrete({1.0, 1.0}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::bounded_discrete({1.0}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::perturbed_pareto(2.0, 1.0, 1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(Distribution::perturbed_pareto(2.0, 1.0, 0.2, 1.0),
                  std::invalid_argument);
  // Degenerate single-atom laws are constructible (rejection of an all-zero
  // weight happens at scenario level, not here).
  CHECK_NOTHROW(Distribution::two_point(0.0, 1.0, 0.0, 0.0));
}

TEST_CASE("survival function spot values") {
  CHECK(Distribution::pareto(2.0, 1.0).sf(10.0) ==
        Catch::Approx(0.01).epsilon(1e-14));
  CHECK(Distribution::pareto(2.0, 1.0).sf(0.5) == 1.0);
  CHECK(Distribution::uniform(0.5, 1.5).sf(1.0) ==
        Catch::Approx(0.5).epsilon(1e-14));
  CHECK(Distribution::two_point(1.0, 0.5, 2.0, 0.5).sf(1.5) ==
        Catch::Approx(0.5).epsilon(1e-14));
  // Right continuity at an atom: sf(2) counts only atoms strictly above 2.
  CHECK(Distribution::two_point(1.0, 0.5, 2.0, 0.5).sf(2.0) == 0.0);
}

TEST_CASE("survival functions are monotone with correct limits") {
  for (const auto& d : catalogue()) {
    double prev = 1.0;
    CHECK(d.sf(-1e300) == 1.0);
    for (double x = 0.0; x <= 40.0; x += 0.37) {
      const double s = d.sf(x);
      CHECK(s <= prev + 1e-15);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      prev = s;
    }
    if (d.upper_support() == wtail::kInf) {
      const double deep = d.quantile(1.0 - 1e-7);
      CHECK(d.sf(deep) > 0.0);
      CHECK(d.sf(deep) <= 1.0000001e-7);
    } else {
      CHECK(d.sf(d.upper_support()) == 0.0);
    }
  }
}

TEST_CASE("quantile spot values and inverse consistency") {
  CHECK(Distribution::pareto(2.0, 1.0).quantile(0.99) ==
        Catch::Approx(10.0).epsilon(1e-13));
  CHECK(Distribution::uniform(0.0, 1.0).quantile(0.25) ==
        Catch::Approx(0.25).epsilon(1e-14));
  CHECK(Distribution::two_point(1.0, 0.5, 2.0, 0.5).quantile(0.75) == 2.0);
  CHECK(Distribution::two_point(1.0, 0.5, 2.0, 0.5).quantile(0.5) == 1.0);
  CHECK_THROWS_AS(Distribution::pareto(2.0, 1.0).quantile(0.0),
                  std::domain_error);
  CHECK_THROWS_AS(Distribution::pareto(2.0, 1.0).quantile(1.0),
                  std::domain_error);

  // Continuous families: sf(quantile(p)) = 1 - p within 1e-12.
  for (const auto& d : catalogue()) {
    if (d.is_discrete()) continue;
    for (double p :
         {1e-9, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6, 1.0 - 1e-9}) {
      const double x = d.quantile(p);
      if (d.point_mass(x) > 0.0) continue;  // mixed law: skip its atoms
      CHECK(d.sf(x) == Catch::Approx(1.0 - p).margin(1e-12).epsilon(1e-9));
    }
  }

  // All families: generalized-inverse property cdf(quantile(p)) >= p, and
  // any strictly smaller candidate from the same law fails the inequality.
  for (const auto& d : catalogue()) {
    for (double p : {0.05, 0.3, 0.5, 0.77, 0.999}) {
      const double x = d.quantile(p);
      CHECK(d.cdf(x) >= p - 1e-12);
      CHECK(d.cdf_left(x) <= p + 1e-12);
    }
  }
}

TEST_CASE("sampler determinism and law agreement") {
  const auto d = Distribution::pareto(2.0, 1.0);
  CHECK_THROWS_AS(d.sample_iid(7, 0), std::domain_error);
  const auto one_a = d.sample_iid(42, 1);
  const auto one_b = d.sample_iid(42, 1);
  REQUIRE(one_a.size() == 1);
  CHECK(one_a[0] == one_b[0]);
  const auto big_a = d.sample_iid(42, 1000);
  const auto big_b = d.sample_iid(42, 1000);
  CHECK(big_a == big_b);

  const std::size_t m = 100000;
  for (const auto& dist : catalogue()) {
    const auto sample = dist.sample_iid(20260816, m);
    const double ks = oracle::ks_distance(
        sample, [&dist](double x) { return dist.cdf(x); },
        [&dist](double x) { return dist.cdf_left(x); });
    CHECK(ks <= 2.0 / std::sqrt(double(m)) + 0.01);
  }
}

TEST_CASE("sample means match quadrature oracles") {
  const std::size_t m = 100000;
  const auto pareto = Distribution::pareto(2.0, 1.0);
  const auto sample = pareto.sample_iid(99, m);
  double acc = 0.0, acc2 = 0.0;
  for (double x : sample) {
    const double v = std::min(x, 100.0);
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / double(m);
  const double sd = std::sqrt((acc2 / double(m) - mean * mean) / double(m));
  // Truncated mean E[min(X, 100)] by independent quadrature on the survival
  // representation: E[min(X,c)] = Int_0^c sf(x) dx.
  const double truth = oracle::integrate(
      [&pareto](double x) { return pareto.sf(x); }, 0.0, 100.0, 1e-12);
  CHECK(std::fabs(mean - truth) <= 3.0 * sd);

  const auto unif = Distribution::uniform(0.0, 1.0);
  const auto us = unif.sample_iid(7, m);
  double um = 0.0;
  for (double x : us) um += x;
  um /= double(m);
  CHECK(um == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("moments") {
  CHECK(Distribution::pareto(2.0, 1.0).mean() == Catch::Approx(2.0));
  CHECK(Distribution::pareto(2.0, 1.0).moment(1.5) ==
        Catch::Approx(4.0).epsilon(1e-13));
  CHECK(Distribution::pareto(2.0, 1.0).moment(2.0) == wtail::kInf);
  CHECK(Distribution::frechet(2.0, 1.0).mean() ==
        Catch::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(Distribution::lognormal(0.0, 1.0).mean() ==
        Catch::Approx(std::exp(0.5)).epsilon(1e-13));
  CHECK(Distribution::weibull_heavy(0.5, 1.0).mean() ==
        Catch::Approx(2.0).epsilon(1e-13));
  CHECK(Distribution::uniform(0.5, 1.5).mean() == Catch::Approx(1.0));
  CHECK(Distribution::uniform(0.5, 1.5).moment(2.0) ==
        Catch::Approx(13.0 / 12.0).epsilon(1e-13));
  CHECK(Distribution::two_point(1.0, 0.5, 2.0, 0.5).moment(2.0) ==
        Catch::Approx(2.5).epsilon(1e-14));
  CHECK_THROWS_AS(Distribution::pareto(2.0, 1.0).moment(-1.0),
                  std::domain_error);
}

TEST_CASE("declared metadata and its consistency rules") {
  const auto pm = Distribution::pareto(2.0, 1.0).meta();
  CHECK(pm.rv_index.has_value());
  CHECK(*pm.rv_index == 2.0);
  CHECK(pm.matuszewska_upper == 2.0);
  CHECK(pm.matuszewska_lower == 2.0);
  CHECK(pm.l_index == 1.0);
  CHECK((pm.in_C && pm.in_D && pm.in_L && pm.in_S));

  const auto lm = Distribution::lognormal(0.0, 1.0).meta();
  CHECK_FALSE(lm.rv_index.has_value());
  CHECK(lm.matuszewska_upper == wtail::kInf);
  CHECK(lm.l_index == 0.0);
  CHECK_FALSE(lm.in_D);
  CHECK(lm.in_S);
  CHECK(lm.in_L);

  const auto um = Distribution::uniform(0.0, 1.0).meta();
  CHECK_FALSE((um.in_D || um.in_L || um.in_C || um.in_S));

  for (const auto& d : catalogue()) {
    const auto m = d.meta();
    if (m.in_C) CHECK((m.in_D && m.in_L));
    CHECK(m.in_D == (m.matuszewska_upper < wtail::kInf));
    CHECK(m.in_D == (m.l_index > 0.0));
    CHECK(m.in_C == (m.l_index == 1.0));
    CHECK((m.l_index >= 0.0 && m.l_index <= 1.0));
    CHECK(m.matuszewska_lower <= m.matuszewska_upper);
    if (m.rv_index.has_value()) {
      CHECK(m.matuszewska_upper == *m.rv_index);
      CHECK(m.matuszewska_lower == *m.rv_index);
      CHECK(m.l_index == 1.0);
    }
  }
}

TEST_CASE("ratio curves") {
  const auto pareto = Distribution::pareto(2.0, 1.0);
  const std::vector<double> xs{1.0, 2.0, 5.0, 10.0, 100.0, 1e6};
  for (double r : pareto.ratio_curve(2.0, xs))
    CHECK(r == Catch::Approx(0.25).epsilon(1e-13));
  for (double r : pareto.ratio_curve(1.0, xs)) CHECK(r == 1.0);

  const auto logn = Distribution::lognormal(0.0, 1.0);
  const auto curve = logn.ratio_curve(2.0, {10.0, 100.0, 1000.0});
  CHECK(curve[0] > curve[1]);
  CHECK(curve[1] > curve[2]);

  CHECK_THROWS_AS(Distribution::uniform(0.0, 1.0).ratio_curve(2.0, {2.0}),
                  std::domain_error);
  CHECK_THROWS_AS(pareto.ratio_curve(0.0, xs), std::domain_error);
}

TEST_CASE("geometric-drop pareto: survival, atoms, quantile, moments") {
  const double alpha = 2.0, scale = 1.0, drop = 0.2;
  const double period = std::exp(1.0);
  const auto d = Distribution::perturbed_pareto(alpha, scale, drop, period);

  // Between the first two atoms the law is a pure power times one drop.
  const double x1 = scale * period;           // first atom
  const double x2 = scale * period * period;  // second atom
  CHECK(d.sf(0.5) == 1.0);
  CHECK(d.sf(scale) == 1.0);
  const double mid = 0.5 * (x1 + x2);
  CHECK(d.sf(mid) ==
        Catch::Approx(std::pow(mid, -alpha) * (1.0 - drop)).epsilon(1e-13));
  CHECK(d.sf(x1) ==
        Catch::Approx(std::pow(x1, -alpha) * (1.0 - drop)).epsilon(1e-13));

  // Atom masses: jump k carries P^{-alpha k) (1-drop)^{k-1} drop.
  for (long k = 1; k <= 6; ++k) {
    const double xk = scale * std::pow(period, double(k));
    const double expected = std::pow(xk, -alpha) *
                            std::pow(1.0 - drop, double(k - 1)) * drop;
    CHECK(d.point_mass(xk) == Catch::Approx(expected).epsilon(1e-11));
    CHECK(d.cdf_left(xk) == Catch::Approx(d.cdf(xk) - expected).epsilon(1e-12));
  }

  // Quantile is the exact generalized inverse across segments and atoms.
  for (double p : {0.01, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-7, 1.0 - 1e-10}) {
    const double x = d.quantile(p);
    CHECK(d.cdf(x) >= p - 1e-12);
    CHECK(d.cdf_left(x) <= p + 1e-12);
  }

  // Jump enumeration matches the atom grid.
  const auto jumps = d.sf_jump_points(0.0, std::pow(period, 4.5));
  REQUIRE(jumps.size() == 4);
  for (std::size_t k = 0; k < jumps.size(); ++k)
    CHECK(jumps[k] ==
          Catch::Approx(std::pow(period, double(k + 1))).epsilon(1e-13));
  CHECK(d.sf_jump_points(0.0, 2.0).empty());

  // Moments against a segment-split Simpson oracle:
  // E[X^q] = scale^q + q Int_scale^inf x^{q-1} sf(x) dx.
  for (double q : {1.0, 1.5}) {
    std::vector<double> pts{scale};
    for (long k = 1; k <= 60; ++k) pts.push_back(scale * std::pow(period, double(k)));
    const double integral = oracle::integrate_points(
        [&d, q](double x) { return q * std::pow(x, q - 1.0) * d.sf(x); }, pts,
        1e-12);
    CHECK(d.moment(q) ==
          Catch::Approx(std::pow(scale, q) + integral).epsilon(1e-8));
  }
  // Divergence threshold: moments exist strictly below the declared index.
  const double idx = d.meta().matuszewska_upper;
  CHECK(d.moment(idx - 0.05) < wtail::kInf);
  CHECK(d.moment(idx + 1e-3) == wtail::kInf);
  CHECK(d.moment(alpha) < wtail::kInf);  // the q = alpha branch

  // Declared metadata: dominated variation with oscillating ratio, outside
  // the consistent and long-tailed classes.
  const auto m = d.meta();
  CHECK(m.in_D);
  CHECK_FALSE(m.in_C);
  CHECK_FALSE(m.in_L);
  CHECK_FALSE(m.in_S);
  CHECK(m.l_index == Catch::Approx(0.8).epsilon(1e-14));
  CHECK(m.matuszewska_upper ==
        Catch::Approx(alpha + std::log(1.0 / (1.0 - drop))).epsilon(1e-13));

  // Scaled-tail ratio at v = period is exactly constant; near v = 1 the
  // ratio oscillates between v^-alpha (no atom crossed) and v^-alpha (1-d).
  // Includes points just below atoms (so v x crosses a drop) and points in
  // the clear (so it does not).
  const std::vector<double> grid{1.1,
                                 1.9,
                                 std::exp(2.0) / 1.02,
                                 std::exp(2.3),
                                 47.0,
                                 std::exp(6.0) / 1.03,
                                 std::exp(7.77),
                                 9001.0};
  for (double r : d.ratio_curve(period, grid))
    CHECK(r == Catch::Approx(std::pow(period, -alpha) * (1.0 - drop))
                   .epsilon(1e-12));
  const double v = 1.05;
  double lo = 2.0, hi = 0.0;
  for (double r : d.ratio_curve(v, grid)) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo == Catch::Approx(std::pow(v, -alpha) * (1.0 - drop)).epsilon(1e-12));
  CHECK(hi == Catch::Approx(std::pow(v, -alpha)).epsilon(1e-12));
}

TEST_CASE("degenerate law behaves as a point mass") {
  const auto d = Distribution::two_point(1.0, 1.0, 3.0, 0.0);
  CHECK(d.is_degenerate());
  CHECK(d.atoms().size() == 1);
  CHECK(d.sf(0.999) == 1.0);
  CHECK(d.sf(1.0) == 0.0);
  CHECK(d.quantile(0.3) == 1.0);
  // Mid-cdf value at the atom: cdf_left + cdf - 1 = 0, the hinge that makes
  // constant weights carry no tilt in the dependence layer.
  CHECK(d.cdf_left(1.0) + d.cdf(1.0) - 1.0 == 0.0);
}

}  // namespace
