#pragma once
// Scenario assembly: a validated bundle of marginals, dependence blocks, a
// declared dependence regime, and (optionally) an independent stopping law
// with bounded support.  Construction failures always name a single
// violation.  Also hosts the finite-grid probe of the joint-tail domination
// condition on the weight tails.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wtail/dependence.hpp"
#include "wtail/distribution.hpp"

namespace wtail {

/// Declared dependence regime of a scenario.  The first two certify that the
/// loss block is (quasi) tail-asymptotically independent; the last marks a
/// deliberately tail-dependent counterexample.
enum class Regime { kPTAI, kPQAI, kNegativeControl };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kPTAI:
      return "pTAI";
    case Regime::kPQAI:
      return "pQAI";
    case Regime::kNegativeControl:
      return "negative-control";
  }
  return "pTAI";
}

inline Regime regime_from_name(const std::string& name) {
  if (name == "pTAI") return Regime::kPTAI;
  if (name == "pQAI") return Regime::kPQAI;
  if (name == "negative-control") return Regime::kNegativeControl;
  throw std::invalid_argument(
      "regime must be one of pTAI, pQAI, negative-control; got \"" + name +
      "\"");
}

/// Distribution of an integer stopping time N with bounded support
/// {0, 1, ..., max_n}.
class StoppingLaw {
 public:
  /// probabilities[k] = P[N = k].
  explicit StoppingLaw(std::vector<double> probabilities)
      : pmf_(std::move(probabilities)) {
    require(!pmf_.empty(), "stopping law: pmf must not be empty");
    double total = 0.0;
    for (double p : pmf_) {
      require(std::isfinite(p) && p >= 0.0,
              "stopping law: probabilities must be finite and >= 0");
      total += p;
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "stopping law: probabilities must sum to 1");
    require(total - pmf_[0] > 0.0, "stopping law: P[N >= 1] must be > 0");
    while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();
  }

  /// Sparse constructor from (k, probability) pairs.
  static StoppingLaw from_pairs(
      const std::vector<std::pair<int, double>>& entries) {
    std::size_t top = 0;
    for (const auto& e : entries) {
      if (e.first < 0)
        throw std::invalid_argument("stopping law: support must be >= 0");
      top = std::max(top, std::size_t(e.first));
    }
    std::vector<double> dense(top + 1, 0.0);
    for (const auto& e : entries) dense[std::size_t(e.first)] += e.second;
    return StoppingLaw(std::move(dense));
  }

  int max_n() const { return int(pmf_.size()) - 1; }

  double pmf(int k) const {
    if (k < 0 || std::size_t(k) >= pmf_.size()) return 0.0;
    return pmf_[std::size_t(k)];
  }

  const std::vector<double>& probabilities() const { return pmf_; }

  /// E[N] = sum_k k P[N = k].
  double mean() const {
    double m = 0.0;
    for (std::size_t k = 1; k < pmf_.size(); ++k) m += double(k) * pmf_[k];
    return m;
  }

 private:
  static void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
  }

  std::vector<double> pmf_;
};

/// Plain data mirror of a scenario file: everything needed to build (and to
/// serialize) a Scenario.
struct ScenarioRecord {
  int n = 0;
  std::vector<Distribution> losses;
  std::vector<Distribution> weights;
  std::vector<double> link_kappa;  // per-coordinate loss-weight link
  ThetaBlockSpec theta_block;
  XBlockSpec x_block;
  Regime regime = Regime::kPTAI;
  std::optional<StoppingLaw> stopping;
  std::vector<double> levels;  // default exceedance-probability grid
};

/// Structural equality of marginal laws (same family and parameters).
inline bool same_law(const Distribution& a, const Distribution& b) {
  return a.family() == b.family() && a.param_a() == b.param_a() &&
         a.param_b() == b.param_b() && a.param_c() == b.param_c() &&
         a.param_p() == b.param_p() && a.atoms() == b.atoms() &&
         a.atom_probs() == b.atom_probs();
}

/// Immutable, fully validated scenario.
class Scenario {
 public:
  explicit Scenario(ScenarioRecord record)
      : record_(std::move(record)),
        joint_(make_joint(record_)),
        regime_(record_.regime) {
    if (regime_ != Regime::kNegativeControl &&
        joint_.x_block().family == BlockFamily::kSurvivalClayton)
      fail(
          "regime conflict: a tail-dependent loss block requires the "
          "negative-control regime");
    if (record_.stopping.has_value()) {
      check_exchangeable();
      if (record_.stopping->max_n() > joint_.dimension())
        fail("stopping law support exceeds the scenario dimension");
    }
    for (double lv : record_.levels)
      if (!(lv > 0.0 && lv < 1.0))
        fail("levels must be exceedance probabilities in (0, 1)");
  }

  int dimension() const { return joint_.dimension(); }
  const JointModel& joint() const { return joint_; }
  Regime regime() const { return regime_; }
  const ScenarioRecord& record() const { return record_; }
  const Distribution& loss(int i) const { return joint_.loss(i); }
  const Distribution& weight(int i) const { return joint_.weight(i); }

  bool has_stopping() const { return record_.stopping.has_value(); }
  const StoppingLaw& stopping() const {
    if (!record_.stopping)
      throw std::logic_error("scenario carries no stopping law");
    return *record_.stopping;
  }

  const std::vector<double>& levels() const { return record_.levels; }

 private:
  [[noreturn]] static void fail(const std::string& message) {
    throw std::invalid_argument(message);
  }

  static JointModel make_joint(const ScenarioRecord& r) {
    if (r.n < 1) fail("scenario: n must be >= 1");
    if (std::size_t(r.n) != r.losses.size() ||
        std::size_t(r.n) != r.weights.size())
      fail("scenario: n must match the number of losses and weights");
    std::vector<double> links = r.link_kappa;
    if (links.empty()) links.assign(std::size_t(r.n), 0.0);
    if (links.size() != std::size_t(r.n))
      fail("scenario: one loss-weight link per coordinate required");
    return JointModel(r.losses, r.weights, links, r.theta_block, r.x_block);
  }

  /// Stopped scenarios sum an exchangeable sequence: identical losses,
  /// identical weights, identical links.
  void check_exchangeable() const {
    const int n = joint_.dimension();
    for (int i = 1; i < n; ++i) {
      if (!same_law(joint_.loss(i), joint_.loss(0)))
        fail("stopped scenarios require identical loss marginals");
      if (!same_law(joint_.weight(i), joint_.weight(0)))
        fail("stopped scenarios require identical weight marginals");
      if (joint_.link_kappa(i) != joint_.link_kappa(0))
        fail("stopped scenarios require identical loss-weight links");
    }
    if (joint_.x_block().family == BlockFamily::kFGM) {
      const double k01 = n > 1 ? joint_.x_pair_kappa(0, 1) : 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (joint_.x_pair_kappa(i, j) != k01)
            fail("stopped scenarios require an exchangeable loss block");
    }
  }

  ScenarioRecord record_;
  JointModel joint_;
  Regime regime_;
};

/// Validate a record and return the immutable scenario; rejects each invalid
/// record with a single named violation.
inline Scenario build_scenario(ScenarioRecord record) {
  return Scenario(std::move(record));
}

/// Verdict of the finite-grid probe of the weight-tail domination condition.
enum class ProbeVerdict { kHoldsTrivially, kConsistent, kInconclusive,
                          kViolated };

inline const char* probe_verdict_name(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::kHoldsTrivially:
      return "holds-trivially";
    case ProbeVerdict::kConsistent:
      return "consistent";
    case ProbeVerdict::kInconclusive:
      return "inconclusive";
    case ProbeVerdict::kViolated:
      return "violated";
  }
  return "inconclusive";
}

/// Finite-grid evidence that the weight tail G_i(b(x)) is negligible next to
/// the joint product tail of the pair (i, j); b(x) = sqrt(x).  No limit is
/// claimed: the verdict reports zero numerators (bounded weights), monotone
/// decay, or the lack of it.
struct AssumptionProbe {
  int i = 0;
  int j = 0;
  std::string b_name = "sqrt";
  std::vector<double> grid;          // strictly increasing thresholds
  std::vector<double> numerators;    // P[Theta_i > b(x)]
  std::vector<double> denominators;  // P[Theta_i X_i > x, Theta_j X_j > x]
  std::vector<double> ratios;
  bool monotone_decay = false;
  ProbeVerdict verdict = ProbeVerdict::kInconclusive;
};

inline AssumptionProbe probe_assumption_b(const Scenario& s, int i, int j,
                                          const std::vector<double>& xs,
                                          const std::string& b_name = "sqrt") {
  if (xs.empty())
    throw std::invalid_argument("assumption probe: grid must not be empty");
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] > xs[k - 1]))
      throw std::invalid_argument(
          "assumption probe: grid must be strictly increasing");
  // Admissible witnesses: b -> infinity with b(x)/x -> 0.
  auto b_of = [&](double x) {
    if (b_name == "sqrt") return std::sqrt(x);
    if (b_name == "x_over_log")
      return x / std::log(std::max(x, std::exp(1.0)));
    throw std::invalid_argument(
        "assumption probe: b must be \"sqrt\" or \"x_over_log\"");
  };

  AssumptionProbe probe;
  probe.i = i;
  probe.j = j;
  probe.b_name = b_name;
  probe.grid = xs;
  bool all_zero = true;
  for (double x : xs) {
    const double numerator = s.weight(i).sf(b_of(x));
    const double denominator = s.joint().weighted_pair_exceedance(i, j, x, x);
    if (denominator <= 0.0) {
      std::ostringstream msg;
      msg << "assumption probe: grid-too-deep, joint product tail vanished "
             "at x = "
          << x;
      throw std::domain_error(msg.str());
    }
    probe.numerators.push_back(numerator);
    probe.denominators.push_back(denominator);
    probe.ratios.push_back(numerator / denominator);
    all_zero = all_zero && numerator == 0.0;
  }

  bool strictly_decreasing = probe.ratios.size() > 1;
  for (std::size_t k = 1; k < probe.ratios.size(); ++k)
    strictly_decreasing =
        strictly_decreasing && probe.ratios[k] < probe.ratios[k - 1];
  probe.monotone_decay = strictly_decreasing;

  if (all_zero) {
    probe.verdict = ProbeVerdict::kHoldsTrivially;
  } else if (strictly_decreasing) {
    probe.verdict = ProbeVerdict::kConsistent;
  } else if (probe.ratios.back() >= probe.ratios.front()) {
    probe.verdict = ProbeVerdict::kViolated;
  } else {
    probe.verdict = ProbeVerdict::kInconclusive;
  }
  return probe;
}

}  // namespace wtail
