#pragma once
// Right-hand sides: exact weighted product tails, first-order sum/max
// asymptotics, Breiman-type constants, two-sided tail and generalized-moment
// bounds driven by declared L-indexes, expected-shortfall and marginal
// expected-shortfall bounds, stopped-sum and ruin approximations, and the
// exceedance-level inverse used to pick thresholds.
//
// Everything here is a pure function of immutable inputs; quadratures target
// absolute 1e-12 / relative 1e-9; discrete weights are summed exactly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wtail/copula.hpp"
#include "wtail/model.hpp"
#include "wtail/quadrature.hpp"

namespace wtail {

/// A single asymptotic right-hand side with its formula tag, threshold echo,
/// and the mask of simulated quantities the underlying theorem covers.
struct AsymptoticValue {
  double value = 0.0;
  std::string formula;
  double x = 0.0;
  bool covers_sum = true;
  bool covers_partial_max = true;
  bool covers_max_summand = true;
};

namespace asym_detail {

[[noreturn]] inline void scope_error(const std::string& message) {
  throw std::domain_error(message);
}

/// Index rho such that E[Theta^r] < inf for all r < rho (infinity for
/// bounded or super-polynomially light weights).
inline double weight_moment_index(const Distribution& g) {
  if (std::isfinite(g.upper_support()))
    return std::numeric_limits<double>::infinity();
  switch (g.family()) {
    case Family::kPareto:
    case Family::kFrechet:
    case Family::kPerturbedPareto:
      return g.param_a();
    default:
      return std::numeric_limits<double>::infinity();
  }
}

/// Index alpha such that E[X^r 1{X > x}] < inf for all r < alpha.
inline double loss_moment_index(const Distribution& f) {
  if (std::isfinite(f.upper_support()))
    return std::numeric_limits<double>::infinity();
  const DistributionMeta meta = f.meta();
  if (meta.rv_index) return *meta.rv_index;
  if (std::isfinite(meta.matuszewska_lower)) return meta.matuszewska_lower;
  return std::numeric_limits<double>::infinity();
}

}  // namespace asym_detail

/// Exact P[Theta X > x] for one (loss, weight) pair tied by a polynomial
/// link of strength kappa: closed-form atom sums for discrete weights,
/// latent-uniform quadrature otherwise.
inline double weighted_product_sf(const Distribution& loss,
                                  const Distribution& weight, double kappa,
                                  double x) {
  if (weight.is_discrete()) {
    double total = 0.0;
    const auto& atoms = weight.atoms();
    const auto& probs = weight.atom_probs();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double mass = probs[k];
      if (mass <= 0.0) continue;
      const double theta = atoms[k];
      if (theta <= 0.0) {
        total += x < 0.0 ? mass : 0.0;
        continue;
      }
      const double u = loss.cdf(x / theta);
      const double z_mid = weight.cdf_left(theta) + weight.cdf(theta) - 1.0;
      // Mean of the tilted conditional over the atom's latent interval.
      total += mass * (1.0 - u) * (1.0 + kappa * u * z_mid);
    }
    return total;
  }
  auto f = [&](double v) {
    const double theta = weight.quantile(v);
    if (theta <= 0.0) return x < 0.0 ? 1.0 : 0.0;
    const double u = loss.cdf(x / theta);
    return 1.0 - tilted_uniform_cdf(u, kappa * (1.0 - 2.0 * v));
  };
  std::vector<double> pts = {0.0, 0.5, 1.0};
  const double lo = loss.lower_support();
  if (lo > 0.0 && x > 0.0) {
    const double v_edge = weight.cdf(x / lo);
    if (v_edge > 0.0 && v_edge < 1.0) pts.push_back(v_edge);
  }
  if (x > 0.0) {
    // The integrand jumps in v wherever x / theta(v) crosses a loss atom:
    // pull each jump back through the weight quantile map.
    const double theta_hi =
        std::min(weight.upper_support(), weight.quantile(1.0 - 1e-12));
    const double theta_lo =
        std::max(weight.lower_support(), weight.quantile(1e-12));
    if (theta_hi > 0.0) {
      const double y_min = std::max(loss.lower_support(), x / theta_hi);
      const double y_max = theta_lo > 0.0 ? x / theta_lo
                                          : std::numeric_limits<double>::max();
      for (double y : loss.sf_jump_points(y_min, y_max)) {
        const double v = weight.cdf(x / y);
        if (v > 0.0 && v < 1.0) pts.push_back(v);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const QuadratureResult r = integrate_segments(f, pts, 1e-12, 1e-9);
  return require_converged(r, "product_tail");
}

/// Exact P[Theta_i X_i > x] for scenario coordinate i.
inline double product_tail(const Scenario& s, int i, double x) {
  return weighted_product_sf(s.loss(i), s.weight(i), s.joint().link_kappa(i),
                             x);
}

/// Exact joint exceedance of two weighted coordinates.
inline double joint_product_tail(const Scenario& s, int i, int j, double xi,
                                 double xj) {
  return s.joint().weighted_pair_exceedance(i, j, xi, xj);
}

/// First-order tail of the weighted sum: sum of the exact product tails,
/// with the mask of quantities the declared regime certifies.
inline AsymptoticValue sum_tail_first_order(const Scenario& s, double x) {
  if (s.regime() == Regime::kNegativeControl)
    asym_detail::scope_error(
        "theorem scope: no first-order sum asymptotics are claimed for the "
        "negative-control regime");
  AsymptoticValue out;
  out.formula = "sum-product-tails";
  out.x = x;
  for (int i = 0; i < s.dimension(); ++i) out.value += product_tail(s, i, x);
  out.covers_max_summand = s.regime() == Regime::kPTAI;
  return out;
}

/// E[Theta^alpha h(Theta)] — the constant that turns sf into the product
/// tail under a power-law loss.  Requires a strictly higher finite weight
/// moment to exist; when the gap between the weight moment index and alpha
/// is very small the quadrature may stop short of its target and throws
/// rather than returning a low-accuracy value.
inline double breiman_constant(const Distribution& weight, double kappa,
                               double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("breiman constant: alpha must be > 0");
  const double idx = asym_detail::weight_moment_index(weight);
  if (!(idx > alpha)) {
    std::ostringstream msg;
    msg << "breiman constant: moment condition E[Theta^rho h(Theta)] < inf "
           "for some rho > alpha fails (weight moment index "
        << idx << " <= alpha " << alpha << ")";
    asym_detail::scope_error(msg.str());
  }
  if (weight.is_discrete()) {
    double total = 0.0;
    const auto& atoms = weight.atoms();
    const auto& probs = weight.atom_probs();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double theta = atoms[k];
      if (theta <= 0.0 || probs[k] <= 0.0) continue;
      const double z_mid = weight.cdf_left(theta) + weight.cdf(theta) - 1.0;
      total += probs[k] * std::pow(theta, alpha) * (1.0 + kappa * z_mid);
    }
    return total;
  }
  // Integration by parts: E[Theta^alpha h(Theta)] =
  // alpha * int theta^(alpha-1) sf(theta) (1 + kappa cdf(theta)) d theta,
  // which avoids the quantile singularity for unbounded weights.
  auto f = [&](double theta) {
    const double sf = weight.sf(theta);
    if (sf <= 0.0 || theta <= 0.0) return 0.0;
    return alpha * std::pow(theta, alpha - 1.0) * sf *
           (1.0 + kappa * weight.cdf(theta));
  };
  std::vector<double> pts;
  if (weight.lower_support() > 0.0) pts.push_back(weight.lower_support());
  if (std::isfinite(weight.upper_support()))
    pts.push_back(weight.upper_support());
  // Relative target 1e-7: smooth integrands still stop at machine accuracy,
  // while slowly decaying ones near the moment boundary stay convergent.
  const QuadratureResult r = integrate_to_infinity(f, 0.0, pts, 1e-12, 1e-7);
  return require_converged(r, "breiman_constant");
}

/// First-order sum tail in explicit Breiman form: requires every loss to
/// carry a regular-variation index.
inline AsymptoticValue rv_sum_tail(const Scenario& s, double x) {
  if (s.regime() == Regime::kNegativeControl)
    asym_detail::scope_error(
        "theorem scope: no first-order sum asymptotics are claimed for the "
        "negative-control regime");
  AsymptoticValue out;
  out.formula = "breiman-rv";
  out.x = x;
  for (int i = 0; i < s.dimension(); ++i) {
    const auto meta = s.loss(i).meta();
    if (!meta.rv_index) {
      std::ostringstream msg;
      msg << "scope: loss " << i + 1
          << " carries no regular-variation index";
      asym_detail::scope_error(msg.str());
    }
    out.value += breiman_constant(s.weight(i), s.joint().link_kappa(i),
                                  *meta.rv_index) *
                 s.loss(i).sf(x);
  }
  out.covers_max_summand = s.regime() == Regime::kPTAI;
  return out;
}

namespace asym_detail {

inline double require_l_index(const Scenario& s, int i) {
  const auto meta = s.loss(i).meta();
  if (!meta.in_D || !(meta.l_index > 0.0)) {
    std::ostringstream msg;
    msg << "scope: loss " << i + 1
        << " is not of dominated variation (L-index 0)";
    scope_error(msg.str());
  }
  return meta.l_index;
}

inline void require_positive_regime(const Scenario& s) {
  if (s.regime() == Regime::kNegativeControl)
    scope_error(
        "theorem scope: two-sided tail bounds are not claimed for the "
        "negative-control regime");
}

}  // namespace asym_detail

/// Two-sided first-order bounds for the sum tail driven by the declared
/// L-indexes; they collapse onto sum_tail_first_order when every L is 1.
inline std::pair<AsymptoticValue, AsymptoticValue> dclass_tail_bounds(
    const Scenario& s, double x) {
  asym_detail::require_positive_regime(s);
  AsymptoticValue lower, upper;
  lower.formula = "dclass-lower";
  upper.formula = "dclass-upper";
  lower.x = upper.x = x;
  for (int i = 0; i < s.dimension(); ++i) {
    const double l_index = asym_detail::require_l_index(s, i);
    const double tail = product_tail(s, i, x);
    lower.value += l_index * tail;
    upper.value += tail / l_index;
  }
  const bool max_ok = s.regime() == Regime::kPTAI;
  lower.covers_max_summand = upper.covers_max_summand = max_ok;
  return {lower, upper};
}

/// Nondecreasing transform with a declared sub-homogeneity constant
/// (phi(2y) <= C phi(y) for large y).
class PhiSpec {
 public:
  enum class Tag { kOne, kIdentity, kPower, kClampedExp };

  static PhiSpec one() { return PhiSpec(Tag::kOne, 0.0); }
  static PhiSpec identity() { return PhiSpec(Tag::kIdentity, 1.0); }
  static PhiSpec power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::invalid_argument("phi power: exponent must be >= 1");
    return PhiSpec(Tag::kPower, p);
  }
  static PhiSpec clamped_exp(double cap) {
    if (!(cap > 1.0) || !std::isfinite(cap))
      throw std::invalid_argument("phi clamped_exp: cap must be > 1");
    return PhiSpec(Tag::kClampedExp, 0.0, cap);
  }

  Tag tag() const { return tag_; }
  double exponent() const { return exponent_; }
  double cap() const { return cap_; }

  const char* name() const {
    switch (tag_) {
      case Tag::kOne:
        return "one";
      case Tag::kIdentity:
        return "identity";
      case Tag::kPower:
        return "power";
      case Tag::kClampedExp:
        return "clamped_exp";
    }
    return "one";
  }

  /// phi(y) for y >= 0.
  double operator()(double y) const {
    switch (tag_) {
      case Tag::kOne:
        return 1.0;
      case Tag::kIdentity:
        return y;
      case Tag::kPower:
        return std::pow(y, exponent_);
      case Tag::kClampedExp:
        return std::min(std::exp(y), cap_);
    }
    return 1.0;
  }

  /// d phi / dy away from the clamp point.
  double derivative(double y) const {
    switch (tag_) {
      case Tag::kOne:
        return 0.0;
      case Tag::kIdentity:
        return 1.0;
      case Tag::kPower:
        return exponent_ * std::pow(y, exponent_ - 1.0);
      case Tag::kClampedExp:
        return y < std::log(cap_) ? std::exp(y) : 0.0;
    }
    return 0.0;
  }

  /// Polynomial growth order: the moment the transform consumes.
  double growth_order() const {
    switch (tag_) {
      case Tag::kOne:
      case Tag::kClampedExp:
        return 0.0;
      case Tag::kIdentity:
        return 1.0;
      case Tag::kPower:
        return exponent_;
    }
    return 0.0;
  }

  /// Declared constant C with phi(2y) <= C phi(y) for all relevant y.
  double sub_homogeneity() const {
    switch (tag_) {
      case Tag::kOne:
        return 1.0;
      case Tag::kIdentity:
        return 2.0;
      case Tag::kPower:
        return std::pow(2.0, exponent_);
      case Tag::kClampedExp:
        return cap_;
    }
    return 1.0;
  }

 private:
  PhiSpec(Tag tag, double exponent, double cap = 0.0)
      : tag_(tag), exponent_(exponent), cap_(cap) {}

  Tag tag_;
  double exponent_;
  double cap_;
};

/// Throws when E[phi(Theta_i X_i)] is declared infinite by the coordinate's
/// moment indexes.  Shared precondition of the closed-form moment and its
/// Monte Carlo counterpart, so both routes reject the same inputs with the
/// same message.
inline void require_phi_integrable(const Scenario& s, int i,
                                   const PhiSpec& phi) {
  const double order = phi.growth_order();
  if (order <= 0.0) return;
  const double loss_idx = asym_detail::loss_moment_index(s.loss(i));
  const double weight_idx = asym_detail::weight_moment_index(s.weight(i));
  if (!(order < loss_idx) || !(order < weight_idx)) {
    std::ostringstream msg;
    msg << "declared divergence: phi of growth order " << order
        << " against coordinate " << i + 1 << " (loss index " << loss_idx
        << ", weight index " << weight_idx << ")";
    asym_detail::scope_error(msg.str());
  }
}

/// E[phi(Theta_i X_i) 1{Theta_i X_i > x}] in survival form:
/// phi(x) P[Z > x] + integral of phi'(z) P[Z > z] over z > x.
inline double coordinate_phi_moment(const Scenario& s, int i,
                                    const PhiSpec& phi, double x) {
  require_phi_integrable(s, i, phi);
  const double at_x = phi(x) * product_tail(s, i, x);
  if (phi.tag() == PhiSpec::Tag::kOne) return at_x;
  auto f = [&](double z) { return phi.derivative(z) * product_tail(s, i, z); };
  if (phi.tag() == PhiSpec::Tag::kClampedExp) {
    const double top = std::log(phi.cap());
    if (x >= top) return at_x;
    const QuadratureResult r = integrate(f, x, top, 1e-12, 1e-9);
    return at_x + require_converged(r, "phi_moment");
  }
  // Relative target 1e-7 (see breiman_constant): keeps integrands whose decay
  // exponent sits within one of the divergence boundary convergent.
  const QuadratureResult r = integrate_to_infinity(f, x, {}, 1e-12, 1e-7);
  return at_x + require_converged(r, "phi_moment");
}

/// Two-sided bounds for E[phi(S) 1{S > x}] driven by declared L-indexes.
inline std::pair<AsymptoticValue, AsymptoticValue> genmoment_bounds(
    const Scenario& s, const PhiSpec& phi, double x) {
  asym_detail::require_positive_regime(s);
  AsymptoticValue lower, upper;
  lower.formula = "genmoment-lower";
  upper.formula = "genmoment-upper";
  lower.x = upper.x = x;
  for (int i = 0; i < s.dimension(); ++i) {
    const double l_index = asym_detail::require_l_index(s, i);
    const double moment = coordinate_phi_moment(s, i, phi, x);
    lower.value += l_index * moment;
    upper.value += moment / l_index;
  }
  const bool max_ok = s.regime() == Regime::kPTAI;
  lower.covers_max_summand = upper.covers_max_summand = max_ok;
  return {lower, upper};
}

/// Two-sided bounds for the expected shortfall E[S | S > x], given the tail
/// of S (first-order or simulated).
inline std::pair<AsymptoticValue, AsymptoticValue> es_bounds(
    const Scenario& s, double x, double tail_of_sum) {
  if (!(tail_of_sum > 0.0))
    throw std::domain_error("es bounds: tail of the sum must be > 0");
  auto [lower, upper] = genmoment_bounds(s, PhiSpec::identity(), x);
  lower.value /= tail_of_sum;
  upper.value /= tail_of_sum;
  lower.formula = "es-lower";
  upper.formula = "es-upper";
  return {lower, upper};
}

/// Bounds for the marginal expected shortfall E[Theta_j X_j | S > x].  The
/// lower bound exists only under the stronger regime; the weaker one keeps
/// the upper bound alone.
struct MesBounds {
  std::optional<AsymptoticValue> lower;
  AsymptoticValue upper;
  bool dominance_warning = false;
};

inline MesBounds mes_bounds(const Scenario& s, int j, double x,
                            double tail_of_sum) {
  if (!(tail_of_sum > 0.0))
    throw std::domain_error("mes bounds: tail of the sum must be > 0");
  asym_detail::require_positive_regime(s);
  const double l_index = asym_detail::require_l_index(s, j);
  const double moment = coordinate_phi_moment(s, j, PhiSpec::identity(), x);

  MesBounds out;
  out.upper.value = moment / tail_of_sum;
  out.upper.formula = "mes-upper";
  out.upper.x = x;
  if (s.regime() == Regime::kPTAI) {
    AsymptoticValue lower;
    lower.value = l_index * moment / tail_of_sum;
    lower.formula = "mes-lower";
    lower.x = x;
    out.lower = lower;
  }

  // Every other coordinate's product tail must stay of the same order or
  // smaller along a doubling grid; steady growth flags the scope condition.
  const double pj0 = product_tail(s, j, x);
  const double pj2 = product_tail(s, j, 4.0 * x);
  for (int i = 0; i < s.dimension() && !out.dominance_warning; ++i) {
    if (i == j) continue;
    const double r0 = product_tail(s, i, x) / pj0;
    const double r2 = product_tail(s, i, 4.0 * x) / pj2;
    out.dominance_warning = r2 > 1.1 * r0 && r2 > 1.0;
  }
  return out;
}

/// First-order tail of the randomly stopped weighted sum: E[N] times the
/// common product tail.
inline AsymptoticValue stopped_first_order(const Scenario& s, double x) {
  if (!s.has_stopping())
    throw std::invalid_argument(
        "stopped sums need a stopping law in the scenario");
  if (s.regime() == Regime::kNegativeControl)
    asym_detail::scope_error(
        "theorem scope: no stopped-sum asymptotics are claimed for the "
        "negative-control regime");
  AsymptoticValue out;
  out.formula = "stopped-first-order";
  out.x = x;
  out.value = s.stopping().mean() * product_tail(s, 0, x);
  out.covers_max_summand = s.regime() == Regime::kPTAI;
  return out;
}

/// Stopped-sum tail in explicit Breiman form (regular-variation losses).
inline AsymptoticValue stopped_first_order_rv(const Scenario& s, double x) {
  if (!s.has_stopping())
    throw std::invalid_argument(
        "stopped sums need a stopping law in the scenario");
  if (s.regime() == Regime::kNegativeControl)
    asym_detail::scope_error(
        "theorem scope: no stopped-sum asymptotics are claimed for the "
        "negative-control regime");
  const auto meta = s.loss(0).meta();
  if (!meta.rv_index)
    asym_detail::scope_error(
        "scope: loss 1 carries no regular-variation index");
  AsymptoticValue out;
  out.formula = "stopped-breiman-rv";
  out.x = x;
  out.value = s.stopping().mean() *
              breiman_constant(s.weight(0), s.joint().link_kappa(0),
                               *meta.rv_index) *
              s.loss(0).sf(x);
  out.covers_max_summand = s.regime() == Regime::kPTAI;
  return out;
}

/// First-order ruin probability over the first `horizon` periods.
inline AsymptoticValue ruin_first_order(const Scenario& s, double x,
                                        int horizon) {
  if (horizon < 1 || horizon > s.dimension())
    throw std::invalid_argument(
        "ruin horizon must lie between 1 and the scenario dimension");
  if (s.regime() == Regime::kNegativeControl)
    asym_detail::scope_error(
        "theorem scope: no ruin asymptotics are claimed for the "
        "negative-control regime");
  AsymptoticValue out;
  out.formula = "ruin-finite-horizon";
  out.x = x;
  for (int i = 0; i < horizon; ++i) out.value += product_tail(s, i, x);
  return out;
}

/// First-order ruin probability over the random horizon N.
inline AsymptoticValue ruin_random_horizon(const Scenario& s, double x) {
  AsymptoticValue out = stopped_first_order(s, x);
  out.formula = "ruin-random-horizon";
  return out;
}

/// Threshold whose first-order sum tail equals the given exceedance level
/// (bisection on the exact product-tail sum; regime-agnostic level map).
inline double level_to_x(const Scenario& s, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("level must lie in (0, 1)");
  auto total = [&](double x) {
    double t = 0.0;
    for (int i = 0; i < s.dimension(); ++i) t += product_tail(s, i, x);
    return t;
  };
  double lo = 1e-9;
  if (total(lo) <= level) return lo;
  double hi = 1.0;
  while (total(hi) > level) {
    hi *= 2.0;
    if (hi > 1e300)
      throw std::runtime_error("level_to_x: bracketing failed");
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) > level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wtail
