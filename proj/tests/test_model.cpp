#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wtail/model.hpp"
#include "wtail/scenario_io.hpp"

using wtail::BlockFamily;
using wtail::Distribution;
using wtail::ProbeVerdict;
using wtail::Regime;
using wtail::Scenario;
using wtail::ScenarioRecord;
using wtail::StoppingLaw;
using wtail::ThetaBlockSpec;
using wtail::XBlockSpec;

using Catch::Matchers::ContainsSubstring;

namespace {

ScenarioRecord base_record(int n) {
  ScenarioRecord r;
  r.n = n;
  r.losses.assign(std::size_t(n), Distribution::pareto(2.0, 1.0));
  r.weights.assign(std::size_t(n), Distribution::uniform(0.5, 1.5));
  r.link_kappa.assign(std::size_t(n), 0.0);
  r.regime = Regime::kPTAI;
  return r;
}

XBlockSpec fgm_matrix(int n, double offdiag) {
  XBlockSpec spec;
  spec.family = BlockFamily::kFGM;
  spec.kappa.assign(std::size_t(n), std::vector<double>(std::size_t(n),
                                                        offdiag));
  for (int i = 0; i < n; ++i) spec.kappa[std::size_t(i)][std::size_t(i)] = 0.0;
  return spec;
}

double clamp_unit(double v) {
  return std::min(1.0 - 1e-12, std::max(1e-12, v));
}

}  // namespace

TEST_CASE("stopping law validates and summarizes its pmf") {
  SECTION("worked means") {
    CHECK(StoppingLaw({0.0, 1.0}).mean() == 1.0);
    const StoppingLaw uniform123 = StoppingLaw::from_pairs(
        {{1, 1.0 / 3.0}, {2, 1.0 / 3.0}, {3, 1.0 / 3.0}});
    CHECK(uniform123.mean() == Catch::Approx(2.0).margin(1e-12));
    CHECK(uniform123.max_n() == 3);
    const StoppingLaw gap = StoppingLaw::from_pairs({{0, 0.5}, {4, 0.5}});
    CHECK(gap.mean() == 2.0);
    CHECK(gap.max_n() == 4);
    CHECK(gap.pmf(0) == 0.5);
    CHECK(gap.pmf(1) == 0.0);
    CHECK(gap.pmf(4) == 0.5);
    CHECK(gap.pmf(7) == 0.0);
  }
  SECTION("trailing zeros are trimmed from the support") {
    const StoppingLaw law({0.0, 1.0, 0.0, 0.0});
    CHECK(law.max_n() == 1);
    CHECK(law.probabilities().size() == 2);
  }
  SECTION("rejections name the violated rule") {
    CHECK_THROWS_WITH(StoppingLaw({}), ContainsSubstring("must not be empty"));
    CHECK_THROWS_WITH(StoppingLaw({0.5, 0.4}), ContainsSubstring("sum to 1"));
    CHECK_THROWS_WITH(StoppingLaw({1.0}), ContainsSubstring("P[N >= 1]"));
    CHECK_THROWS_WITH(StoppingLaw({1.0, 0.0}), ContainsSubstring("P[N >= 1]"));
    CHECK_THROWS_WITH(StoppingLaw({1.5, -0.5}),
                      ContainsSubstring("finite and >= 0"));
    CHECK_THROWS_WITH(StoppingLaw::from_pairs({{-1, 0.5}, {1, 0.5}}),
                      ContainsSubstring("support must be >= 0"));
  }
}

TEST_CASE("scenario construction enforces the declared invariants") {
  SECTION("independent baseline builds") {
    const Scenario s = wtail::build_scenario(base_record(2));
    CHECK(s.dimension() == 2);
    CHECK(s.regime() == Regime::kPTAI);
    CHECK_FALSE(s.has_stopping());
    CHECK_THROWS_AS(s.stopping(), std::logic_error);
  }
  SECTION("weights must put mass above zero") {
    ScenarioRecord r = base_record(2);
    r.weights[1] = Distribution::two_point(0.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("non-degenerate at zero"));
  }
  SECTION("tail-dependent loss blocks demand the negative-control regime") {
    ScenarioRecord r = base_record(2);
    r.x_block = XBlockSpec{BlockFamily::kSurvivalClayton, 1.0, {}};
    r.regime = Regime::kPTAI;
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("regime conflict"));
    r.regime = Regime::kPQAI;
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("regime conflict"));
    r.regime = Regime::kNegativeControl;
    CHECK_NOTHROW(wtail::build_scenario(r));
  }
  SECTION("stopped scenarios must be exchangeable") {
    ScenarioRecord r = base_record(3);
    r.stopping = StoppingLaw::from_pairs({{1, 0.5}, {2, 0.5}});
    r.link_kappa = {0.5, 0.5, 0.5};
    r.x_block = fgm_matrix(3, 0.3);
    r.theta_block = ThetaBlockSpec{BlockFamily::kGaussian, 0.4};
    CHECK_NOTHROW(wtail::build_scenario(r));

    ScenarioRecord bad = r;
    bad.losses[2] = Distribution::pareto(3.0, 1.0);
    CHECK_THROWS_WITH(wtail::build_scenario(bad),
                      ContainsSubstring("identical loss marginals"));

    bad = r;
    bad.weights[0] = Distribution::uniform(0.25, 1.75);
    CHECK_THROWS_WITH(wtail::build_scenario(bad),
                      ContainsSubstring("identical weight marginals"));

    bad = r;
    bad.link_kappa[1] = -0.2;
    CHECK_THROWS_WITH(wtail::build_scenario(bad),
                      ContainsSubstring("identical loss-weight links"));

    bad = r;
    bad.x_block.kappa[0][1] = 0.1;
    bad.x_block.kappa[1][0] = 0.1;
    CHECK_THROWS_WITH(wtail::build_scenario(bad),
                      ContainsSubstring("exchangeable loss block"));
  }
  SECTION("shape mismatches are named") {
    ScenarioRecord r = base_record(2);
    r.n = 3;
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("match the number"));
    r = base_record(2);
    r.link_kappa = {0.5};
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("one loss-weight link per coordinate"));
    r = base_record(2);
    r.n = 0;
    r.losses.clear();
    r.weights.clear();
    r.link_kappa.clear();
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("n must be >= 1"));
  }
  SECTION("levels must be exceedance probabilities") {
    ScenarioRecord r = base_record(2);
    r.levels = {1e-3, 1.0};
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("exceedance probabilities"));
    r.levels = {1e-3, 1e-4};
    CHECK_NOTHROW(wtail::build_scenario(r));
  }
}

TEST_CASE("assumption probe reports trivial, decaying, and growing ratios") {
  SECTION("bounded uniform weights zero out beyond the support edge") {
    ScenarioRecord r = base_record(2);
    r.link_kappa = {0.5, 0.5};
    r.theta_block = ThetaBlockSpec{BlockFamily::kFGM, 0.6};
    const Scenario s = wtail::build_scenario(r);
    const auto probe = wtail::probe_assumption_b(s, 0, 1, {3.0, 10.0, 40.0});
    CHECK(probe.verdict == ProbeVerdict::kHoldsTrivially);
    CHECK(probe.b_name == "sqrt");
    CHECK(probe.i == 0);
    CHECK(probe.j == 1);
    for (double numerator : probe.numerators) CHECK(numerator == 0.0);
    for (double denominator : probe.denominators) CHECK(denominator > 0.0);
    for (double ratio : probe.ratios) CHECK(ratio == 0.0);
  }
  SECTION("bounded discrete weights zero out once sqrt(x) clears the top") {
    ScenarioRecord r = base_record(2);
    r.weights.assign(2, Distribution::two_point(1.0, 0.5, 2.0, 0.5));
    const Scenario s = wtail::build_scenario(r);
    const auto probe = wtail::probe_assumption_b(s, 0, 1, {5.0, 9.0, 20.0});
    CHECK(probe.verdict == ProbeVerdict::kHoldsTrivially);
    for (double numerator : probe.numerators) CHECK(numerator == 0.0);
  }
  SECTION("power-law weights against an independent pair grow without bound") {
    ScenarioRecord r = base_record(2);
    r.weights.assign(2, Distribution::pareto(3.0, 1.0));
    const Scenario s = wtail::build_scenario(r);
    std::vector<double> xs;
    for (int k = 0; k <= 6; ++k) xs.push_back(10.0 * std::pow(2.0, k));
    const auto probe = wtail::probe_assumption_b(s, 0, 1, xs);
    CHECK(probe.verdict == ProbeVerdict::kViolated);
    CHECK_FALSE(probe.monotone_decay);
    for (std::size_t k = 1; k < probe.ratios.size(); ++k)
      CHECK(probe.ratios[k] > probe.ratios[k - 1]);
    // Dual route: numerator is the closed power tail, denominator factorizes
    // into two 1-D product-tail integrals under full independence.
    auto product_tail = [&](double x) {
      return oracle::integrate(
          [&](double v) {
            v = clamp_unit(v);
            return s.loss(0).sf(x / s.weight(0).quantile(v));
          },
          0.0, 1.0);
    };
    for (std::size_t k = 0; k < xs.size(); ++k) {
      CHECK(probe.numerators[k] ==
            Catch::Approx(std::pow(xs[k], -1.5)).epsilon(1e-12));
      const double q = product_tail(xs[k]);
      // Deep points sit near the 2-D quadrature's absolute floor (1e-12),
      // which caps the achievable relative agreement around 1e-3.
      CHECK(probe.denominators[k] ==
            Catch::Approx(q * q).epsilon(2e-3).margin(2e-12));
    }
    // The near-linear witness cannot rescue a power-law weight either.
    const auto probe2 = wtail::probe_assumption_b(s, 0, 1, xs, "x_over_log");
    CHECK(probe2.b_name == "x_over_log");
    CHECK(probe2.verdict == ProbeVerdict::kViolated);
  }
  SECTION("light unbounded weights over a tail-dependent pair decay") {
    ScenarioRecord r = base_record(2);
    r.losses.assign(2, Distribution::pareto(1.2, 1.0));
    r.weights.assign(2, Distribution::lognormal(0.0, 0.5));
    r.x_block = XBlockSpec{BlockFamily::kSurvivalClayton, 1.0, {}};
    r.regime = Regime::kNegativeControl;
    const Scenario s = wtail::build_scenario(r);
    const auto probe =
        wtail::probe_assumption_b(s, 0, 1, {10.0, 40.0, 160.0, 640.0, 2560.0});
    CHECK(probe.verdict == ProbeVerdict::kConsistent);
    CHECK(probe.monotone_decay);
    for (std::size_t k = 1; k < probe.ratios.size(); ++k)
      CHECK(probe.ratios[k] < probe.ratios[k - 1]);
  }
  SECTION("oscillating weight tails break monotonicity without growing") {
    // Between the weight's atoms the ratio climbs like x^0.2; every atom
    // crossing halves it; over the whole grid the halvings win.
    ScenarioRecord r = base_record(2);
    r.losses.assign(2, Distribution::pareto(0.8, 1.0));
    r.weights.assign(
        2, Distribution::perturbed_pareto(1.2, 1.0, 0.5, std::exp(1.0)));
    r.x_block = XBlockSpec{BlockFamily::kSurvivalClayton, 1.0, {}};
    r.regime = Regime::kNegativeControl;
    const Scenario s = wtail::build_scenario(r);
    const auto probe = wtail::probe_assumption_b(
        s, 0, 1, {9.0, 36.0, 64.0, 400.0, 1600.0, 10000.0});
    CHECK(probe.verdict == ProbeVerdict::kInconclusive);
    CHECK_FALSE(probe.monotone_decay);
    CHECK(probe.ratios.back() < probe.ratios.front());
    bool any_increase = false;
    for (std::size_t k = 1; k < probe.ratios.size(); ++k)
      any_increase = any_increase || probe.ratios[k] > probe.ratios[k - 1];
    CHECK(any_increase);
  }
  SECTION("argument errors are named") {
    const Scenario s = wtail::build_scenario(base_record(2));
    CHECK_THROWS_WITH(wtail::probe_assumption_b(s, 0, 1, {}),
                      ContainsSubstring("must not be empty"));
    CHECK_THROWS_WITH(wtail::probe_assumption_b(s, 0, 1, {3.0, 3.0}),
                      ContainsSubstring("strictly increasing"));
    CHECK_THROWS_WITH(wtail::probe_assumption_b(s, 0, 1, {3.0}, "cube-root"),
                      ContainsSubstring("b must be"));
  }
  SECTION("a vanished joint tail is a grid error, not a zero ratio") {
    ScenarioRecord r = base_record(2);
    r.losses.assign(2, Distribution::two_point(1.0, 0.5, 2.0, 0.5));
    r.weights.assign(2, Distribution::two_point(1.0, 0.5, 2.0, 0.5));
    const Scenario s = wtail::build_scenario(r);
    CHECK_THROWS_WITH(wtail::probe_assumption_b(s, 0, 1, {5.0}),
                      ContainsSubstring("grid-too-deep"));
  }
}

TEST_CASE("scenario files parse, validate, and round-trip canonically") {
  const std::string s1_text = R"({
  "n": 3,
  "losses": [
    {"family": "pareto", "alpha": 2.0, "scale": 1.0},
    {"family": "pareto", "alpha": 2.0, "scale": 1.0},
    {"family": "pareto", "alpha": 2.0, "scale": 1.0}
  ],
  "weights": [
    {"family": "uniform", "lo": 0.5, "hi": 1.5},
    {"family": "uniform", "lo": 0.5, "hi": 1.5},
    {"family": "uniform", "lo": 0.5, "hi": 1.5}
  ],
  "links": {
    "x_theta": [
      {"i": 1, "copula": "fgm", "kappa": 0.5},
      {"i": 2, "copula": "fgm", "kappa": 0.5},
      {"i": 3, "copula": "fgm", "kappa": 0.5}
    ],
    "x_x": [
      {"i": 1, "j": 2, "copula": "fgm", "kappa": 0.3},
      {"i": 1, "j": 3, "copula": "fgm", "kappa": 0.3},
      {"i": 2, "j": 3, "copula": "fgm", "kappa": 0.3}
    ],
    "theta_theta": {"copula": "gaussian", "rho": 0.4}
  },
  "regime": "pTAI",
  "grids": {"levels": [1e-3, 1e-4]}
})";

  SECTION("the reference document parses into the expected record") {
    const ScenarioRecord r = wtail::parse_scenario_text(s1_text);
    CHECK(r.n == 3);
    REQUIRE(r.losses.size() == 3);
    REQUIRE(r.weights.size() == 3);
    CHECK(r.losses[0].family() == wtail::Family::kPareto);
    CHECK(r.weights[2].family() == wtail::Family::kUniform);
    CHECK(r.link_kappa == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(r.x_block.family == BlockFamily::kFGM);
    CHECK(r.x_block.kappa[0][1] == 0.3);
    CHECK(r.x_block.kappa[2][1] == 0.3);
    CHECK(r.x_block.kappa[1][1] == 0.0);
    CHECK(r.theta_block.family == BlockFamily::kGaussian);
    CHECK(r.theta_block.param == 0.4);
    CHECK(r.regime == Regime::kPTAI);
    CHECK(r.levels == std::vector<double>{1e-3, 1e-4});
    CHECK_NOTHROW(wtail::build_scenario(r));
  }

  SECTION("write -> read -> write is byte-identical") {
    const ScenarioRecord r = wtail::parse_scenario_text(s1_text);
    const std::string once = wtail::write_scenario_text(r);
    const ScenarioRecord back = wtail::parse_scenario_text(once);
    const std::string twice = wtail::write_scenario_text(back);
    CHECK(once == twice);
  }

  SECTION("stopped and negative-control documents round-trip too") {
    ScenarioRecord stopped = wtail::parse_scenario_text(s1_text);
    stopped.stopping = StoppingLaw::from_pairs(
        {{1, 1.0 / 3.0}, {2, 1.0 / 3.0}, {3, 1.0 / 3.0}});
    const std::string once = wtail::write_scenario_text(stopped);
    const ScenarioRecord back = wtail::parse_scenario_text(once);
    REQUIRE(back.stopping.has_value());
    CHECK(back.stopping->mean() == Catch::Approx(2.0).margin(1e-12));
    CHECK(wtail::write_scenario_text(back) == once);

    ScenarioRecord control = wtail::parse_scenario_text(s1_text);
    control.x_block = XBlockSpec{BlockFamily::kSurvivalClayton, 1.0, {}};
    control.regime = Regime::kNegativeControl;
    const std::string ctext = wtail::write_scenario_text(control);
    const ScenarioRecord cback = wtail::parse_scenario_text(ctext);
    CHECK(cback.x_block.family == BlockFamily::kSurvivalClayton);
    CHECK(cback.x_block.param == 1.0);
    CHECK(cback.regime == Regime::kNegativeControl);
    CHECK(wtail::write_scenario_text(cback) == ctext);
    CHECK_NOTHROW(wtail::build_scenario(cback));
  }

  SECTION("every distribution family round-trips") {
    ScenarioRecord r = base_record(2);
    r.losses = {Distribution::frechet(1.7, 2.0),
                Distribution::perturbed_pareto(2.0, 1.0, 0.2,
                                               std::exp(1.0))};
    r.weights = {Distribution::lognormal(0.25, 0.75),
                 Distribution::bounded_discrete({0.5, 1.0, 2.5},
                                                {0.25, 0.5, 0.25})};
    r.regime = Regime::kPQAI;
    const std::string once = wtail::write_scenario_text(r);
    const ScenarioRecord back = wtail::parse_scenario_text(once);
    CHECK(wtail::same_law(back.losses[0], r.losses[0]));
    CHECK(wtail::same_law(back.losses[1], r.losses[1]));
    CHECK(wtail::same_law(back.weights[0], r.weights[0]));
    CHECK(wtail::same_law(back.weights[1], r.weights[1]));
    CHECK(back.regime == Regime::kPQAI);
    CHECK(wtail::write_scenario_text(back) == once);

    ScenarioRecord w = base_record(1);
    w.losses = {Distribution::weibull_heavy(0.5, 1.0)};
    w.weights = {Distribution::two_point(1.0, 0.25, 2.0, 0.75)};
    const std::string wtext = wtail::write_scenario_text(w);
    const ScenarioRecord wback = wtail::parse_scenario_text(wtext);
    CHECK(wtail::same_law(wback.losses[0], w.losses[0]));
    CHECK(wtail::same_law(wback.weights[0], w.weights[0]));
  }

  SECTION("unknown keys are rejected with their path") {
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(R"({"n": 1, "flavor": "spicy"})"),
        ContainsSubstring("unknown key \"flavor\""));
    const std::string bad_dist = R"({
      "n": 1,
      "losses": [{"family": "pareto", "alpha": 2.0, "scale": 1.0, "mu": 0.0}],
      "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
      "regime": "pTAI"
    })";
    CHECK_THROWS_WITH(wtail::parse_scenario_text(bad_dist),
                      ContainsSubstring("losses[0]"));
    CHECK_THROWS_WITH(wtail::parse_scenario_text(bad_dist),
                      ContainsSubstring("unknown key \"mu\""));
  }

  SECTION("syntax errors surface the line") {
    CHECK_THROWS_WITH(wtail::parse_scenario_text("{\n  \"n\": 1,,\n}"),
                      ContainsSubstring("line"));
    CHECK_THROWS_AS(wtail::parse_scenario_text("not json"),
                    wtail::ScenarioParseError);
  }

  SECTION("link grammar violations are rejected with context") {
    auto with_links = [](const std::string& links) {
      return std::string(R"({
  "n": 2,
  "losses": [
    {"family": "pareto", "alpha": 2.0, "scale": 1.0},
    {"family": "pareto", "alpha": 2.0, "scale": 1.0}
  ],
  "weights": [
    {"family": "uniform", "lo": 0.5, "hi": 1.5},
    {"family": "uniform", "lo": 0.5, "hi": 1.5}
  ],
  "links": )") +
             links + ",\n  \"regime\": \"pTAI\"\n}";
    };
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(
            R"({"x_theta": [{"i": 3, "copula": "fgm", "kappa": 0.5}]})")),
        ContainsSubstring("outside 1..2"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(
            R"({"x_theta": [{"i": 1, "copula": "gaussian", "kappa": 0.5}]})")),
        ContainsSubstring("only independence or fgm"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(R"({"x_theta": [
          {"i": 1, "copula": "fgm", "kappa": 0.5},
          {"i": 1, "copula": "fgm", "kappa": 0.2}]})")),
        ContainsSubstring("duplicate entry for coordinate 1"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(
            R"({"x_x": [{"i": 1, "j": 1, "copula": "fgm", "kappa": 0.3}]})")),
        ContainsSubstring("distinct coordinates"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(R"({"x_x": [
          {"i": 1, "j": 2, "copula": "fgm", "kappa": 0.3},
          {"i": 2, "j": 1, "copula": "fgm", "kappa": 0.1}]})")),
        ContainsSubstring("duplicate entry for pair"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(with_links(
            R"({"x_x": [{"i": 1, "j": 2, "copula": "gaussian", "kappa": 0.3}]})")),
        ContainsSubstring("single object"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            with_links(R"({"theta_theta": {"copula": "spearman"}})")),
        ContainsSubstring("unknown copula"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            with_links(R"({"theta_theta": {"copula": "gaussian", "kappa": 0.4}})")),
        ContainsSubstring("unknown key \"kappa\""));
  }

  SECTION("block objects for the loss block parse and round-trip") {
    const std::string text = R"({
  "n": 2,
  "losses": [
    {"family": "pareto", "alpha": 2.0, "scale": 1.0},
    {"family": "pareto", "alpha": 2.0, "scale": 1.0}
  ],
  "weights": [
    {"family": "uniform", "lo": 0.5, "hi": 1.5},
    {"family": "uniform", "lo": 0.5, "hi": 1.5}
  ],
  "links": {"x_x": {"copula": "fgm", "kappa": 0.25}},
  "regime": "pTAI"
})";
    const ScenarioRecord r = wtail::parse_scenario_text(text);
    CHECK(r.x_block.family == BlockFamily::kFGM);
    REQUIRE(r.x_block.kappa.size() == 2);
    CHECK(r.x_block.kappa[0][1] == 0.25);
    CHECK(r.x_block.kappa[0][0] == 0.0);
    const std::string once = wtail::write_scenario_text(r);
    CHECK(wtail::write_scenario_text(wtail::parse_scenario_text(once)) ==
          once);
  }

  SECTION("stopping grammar and degenerate weights flow to build errors") {
    const std::string stopped = R"({
  "n": 1,
  "losses": [{"family": "pareto", "alpha": 2.0, "scale": 1.0}],
  "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
  "regime": "pTAI",
  "stopping": {"pmf": {"0": 0.5, "4": 0.5}}
})";
    const ScenarioRecord r = wtail::parse_scenario_text(stopped);
    REQUIRE(r.stopping.has_value());
    CHECK(r.stopping->mean() == 2.0);
    // Only one coordinate exists, so a stopping time reaching 4 cannot be
    // realized by this scenario.
    CHECK_THROWS_WITH(wtail::build_scenario(r),
                      ContainsSubstring("exceeds the scenario dimension"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            R"({"n": 1, "losses": [{"family": "pareto", "alpha": 2, "scale": 1}],
                "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
                "regime": "pTAI", "stopping": {"pmf": {"minus": 0.5}}})"),
        ContainsSubstring("nonnegative integers"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            R"({"n": 1, "losses": [{"family": "pareto", "alpha": 2, "scale": 1}],
                "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
                "regime": "pTAI", "stopping": {"pmf": {"1": 0.5}}})"),
        ContainsSubstring("sum to 1"));

    const std::string degenerate = R"({
  "n": 1,
  "losses": [{"family": "pareto", "alpha": 2.0, "scale": 1.0}],
  "weights": [{"family": "two_point", "atoms": [0.0], "probs": [1.0]}],
  "regime": "pTAI"
})";
    const ScenarioRecord bad = wtail::parse_scenario_text(degenerate);
    CHECK_THROWS_WITH(wtail::build_scenario(bad),
                      ContainsSubstring("non-degenerate at zero"));
  }

  SECTION("regime and shape errors carry their field") {
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            R"({"n": 1, "losses": [{"family": "pareto", "alpha": 2, "scale": 1}],
                "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
                "regime": "mystery"})"),
        ContainsSubstring("regime"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(
            R"({"n": 2, "losses": [{"family": "pareto", "alpha": 2, "scale": 1}],
                "weights": [{"family": "uniform", "lo": 0.5, "hi": 1.5}],
                "regime": "pTAI"})"),
        ContainsSubstring("exactly n"));
    CHECK_THROWS_WITH(
        wtail::parse_scenario_text(R"({"losses": [], "weights": [],
                                       "regime": "pTAI"})"),
        ContainsSubstring("missing key \"n\""));
  }
}
