#pragma once
// Marginal distribution catalogue: exact survival functions, generalized
// inverse quantiles, inversion sampling, moments, and declared tail-class
// metadata (dominated / consistent / long-tailed / subexponential flags,
// Matuszewska indexes, lower limiting ratio index).
//
// Every value is immutable after construction and safe to share across
// threads.  Constructors throw std::invalid_argument on bad parameters;
// operations throw std::domain_error on out-of-domain arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wtail/normal.hpp"
#include "wtail/rng.hpp"

namespace wtail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Declared tail-class membership and scaling indexes of a marginal law.
struct DistributionMeta {
  bool in_D = false;  // dominated variation
  bool in_L = false;  // long tail
  bool in_C = false;  // consistent variation
  bool in_S = false;  // subexponential
  std::optional<double> rv_index;     // power-law index when regularly varying
  double matuszewska_upper = kInf;    // alpha_F
  double matuszewska_lower = kInf;    // beta_F
  double l_index = 0.0;               // L_F in [0, 1]
};

enum class Family {
  kPareto,
  kFrechet,
  kLognormal,
  kWeibullHeavy,
  kUniform,
  kTwoPoint,
  kBoundedDiscrete,
  kPerturbedPareto,
};

class Distribution {
 public:
  // ---- factories ---------------------------------------------------------
  static Distribution pareto(double alpha, double scale) {
    require(alpha > 0.0 && std::isfinite(alpha), "pareto: alpha must be > 0");
    require(scale > 0.0 && std::isfinite(scale), "pareto: scale must be > 0");
    Distribution d(Family::kPareto);
    d.a_ = alpha;
    d.b_ = scale;
    return d;
  }
  static Distribution frechet(double alpha, double scale) {
    require(alpha > 0.0 && std::isfinite(alpha), "frechet: alpha must be > 0");
    require(scale > 0.0 && std::isfinite(scale), "frechet: scale must be > 0");
    Distribution d(Family::kFrechet);
    d.a_ = alpha;
    d.b_ = scale;
    return d;
  }
  static Distribution lognormal(double mu, double sigma) {
    require(std::isfinite(mu), "lognormal: mu must be finite");
    require(sigma > 0.0 && std::isfinite(sigma),
            "lognormal: sigma must be > 0");
    Distribution d(Family::kLognormal);
    d.a_ = mu;
    d.b_ = sigma;
    return d;
  }
  static Distribution weibull_heavy(double shape, double scale) {
    require(shape > 0.0 && shape < 1.0,
            "weibull_heavy: shape must lie in (0, 1)");
    require(scale > 0.0 && std::isfinite(scale),
            "weibull_heavy: scale must be > 0");
    Distribution d(Family::kWeibullHeavy);
    d.a_ = shape;
    d.b_ = scale;
    return d;
  }
  static Distribution uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
            "uniform: require lo < hi, both finite");
    Distribution d(Family::kUniform);
    d.a_ = lo;
    d.b_ = hi;
    return d;
  }
  static Distribution two_point(double x1, double p1, double x2, double p2) {
    require(x1 >= 0.0 && x2 >= 0.0, "two_point: atoms must be >= 0");
    require(p1 >= 0.0 && p2 >= 0.0, "two_point: probabilities must be >= 0");
    require(std::fabs(p1 + p2 - 1.0) <= 1e-12,
            "two_point: probabilities must sum to 1");
    Distribution d(Family::kTwoPoint);
    if (x1 == x2) {
      d.atoms_ = {x1};
      d.probs_ = {1.0};
    } else if (x1 < x2) {
      d.atoms_ = {x1, x2};
      d.probs_ = {p1, p2};
    } else {
      d.atoms_ = {x2, x1};
      d.probs_ = {p2, p1};
    }
    d.drop_null_atoms();
    d.finish_discrete("two_point");
    return d;
  }
  static Distribution bounded_discrete(std::vector<double> atoms,
                                       std::vector<double> probs) {
    require(!atoms.empty() && atoms.size() == probs.size(),
            "bounded_discrete: need matching nonempty atom/probability lists");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      require(std::isfinite(atoms[i]) && atoms[i] >= 0.0,
              "bounded_discrete: atoms must be finite and >= 0");
      require(probs[i] >= 0.0, "bounded_discrete: probabilities must be >= 0");
      total += probs[i];
    }
    require(std::fabs(total - 1.0) <= 1e-12,
            "bounded_discrete: probabilities must sum to 1");
    std::vector<std::size_t> order(atoms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&atoms](std::size_t i, std::size_t j) {
                return atoms[i] < atoms[j];
              });
    Distribution d(Family::kBoundedDiscrete);
    for (std::size_t i : order) {
      require(d.atoms_.empty() || atoms[i] > d.atoms_.back(),
              "bounded_discrete: duplicate atom");
      d.atoms_.push_back(atoms[i]);
      d.probs_.push_back(probs[i]);
    }
    d.drop_null_atoms();
    d.finish_discrete("bounded_discrete");
    return d;
  }
  /// Pareto body with a geometric sequence of multiplicative survival drops
  /// of size `drop` every factor `period` in x.  The law keeps bounded
  /// scaled-tail ratios (a power envelope holds) but the ratio oscillates
  /// forever, so the limiting lower ratio index is 1 - drop rather than 1,
  /// and the tail is not shift-insensitive (the drops are genuine atoms).
  static Distribution perturbed_pareto(double alpha, double scale, double drop,
                                       double period) {
    require(alpha > 0.0 && std::isfinite(alpha),
            "perturbed_pareto: alpha must be > 0");
    require(scale > 0.0 && std::isfinite(scale),
            "perturbed_pareto: scale must be > 0");
    require(drop > 0.0 && drop < 1.0,
            "perturbed_pareto: drop must lie in (0, 1)");
    require(period > 1.0 && std::isfinite(period),
            "perturbed_pareto: period must be > 1");
    Distribution d(Family::kPerturbedPareto);
    d.a_ = alpha;
    d.b_ = scale;
    d.c_ = drop;
    d.p_ = period;
    return d;
  }

  // ---- basic probability interface ---------------------------------------
  Family family() const { return family_; }

  double sf(double x) const {
    switch (family_) {
      case Family::kPareto:
        return x <= b_ ? 1.0 : std::pow(x / b_, -a_);
      case Family::kFrechet:
        return x <= 0.0 ? 1.0 : -std::expm1(-std::pow(x / b_, -a_));
      case Family::kLognormal:
        return x <= 0.0 ? 1.0 : normal_sf((std::log(x) - a_) / b_);
      case Family::kWeibullHeavy:
        return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / b_, a_));
      case Family::kUniform:
        if (x < a_) return 1.0;
        if (x >= b_) return 0.0;
        return (b_ - x) / (b_ - a_);
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete: {
        double s = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
          if (atoms_[k] > x) s += probs_[k];
        return s;
      }
      case Family::kPerturbedPareto: {
        if (x <= b_) return 1.0;
        const long n = pp_jump_count(x);
        return std::pow(x / b_, -a_) * std::pow(1.0 - c_, double(n));
      }
    }
    return 0.0;
  }

  double cdf(double x) const { return 1.0 - sf(x); }

  /// Left limit of the survival function, P[X >= x].
  double sf_left(double x) const {
    switch (family_) {
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete: {
        double s = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
          if (atoms_[k] >= x) s += probs_[k];
        return s;
      }
      case Family::kPerturbedPareto: {
        if (x <= b_) return 1.0;
        long n = pp_jump_count(x);
        if (n >= 1 && pp_atom(n) == x) n -= 1;  // left limit excludes the atom
        return std::pow(x / b_, -a_) * std::pow(1.0 - c_, double(n));
      }
      default:
        return sf(x);
    }
  }

  /// Left limit of the cdf (differs from cdf only at atoms).
  double cdf_left(double x) const { return 1.0 - sf_left(x); }

  double point_mass(double x) const { return sf_left(x) - sf(x); }

  /// Generalized inverse: smallest x with cdf(x) >= p, for p in (0, 1).
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
      throw std::domain_error("quantile: p must lie in (0, 1)");
    const double s = 1.0 - p;  // target survival level
    switch (family_) {
      case Family::kPareto:
        return b_ * std::pow(s, -1.0 / a_);
      case Family::kFrechet:
        return b_ * std::pow(-std::log(p), -1.0 / a_);
      case Family::kLognormal:
        return std::exp(a_ + b_ * normal_ppf(p));
      case Family::kWeibullHeavy:
        return b_ * std::pow(-std::log(s), 1.0 / a_);
      case Family::kUniform:
        return a_ + p * (b_ - a_);
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete: {
        double c = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
          c += probs_[k];
          if (c >= p) return atoms_[k];
        }
        return atoms_.back();
      }
      case Family::kPerturbedPareto:
        return pp_quantile(s);
    }
    return 0.0;
  }

  /// Deterministic inversion sampling.
  std::vector<double> sample_iid(std::uint64_t seed, std::size_t m) const {
    if (m < 1) throw std::domain_error("sample_iid: m must be >= 1");
    Xoshiro256pp rng(seed);
    std::vector<double> out(m);
    for (auto& v : out) v = quantile(rng.next_uniform());
    return out;
  }

  // ---- moments ------------------------------------------------------------
  /// E[X^q] for q >= 0; +infinity when the moment diverges.
  double moment(double q) const {
    if (q < 0.0) throw std::domain_error("moment: q must be >= 0");
    if (q == 0.0) return 1.0;
    switch (family_) {
      case Family::kPareto:
        return q < a_ ? a_ * std::pow(b_, q) / (a_ - q) : kInf;
      case Family::kFrechet:
        return q < a_ ? std::pow(b_, q) * std::tgamma(1.0 - q / a_) : kInf;
      case Family::kLognormal:
        return std::exp(q * a_ + 0.5 * q * q * b_ * b_);
      case Family::kWeibullHeavy:
        return std::pow(b_, q) * std::tgamma(1.0 + q / a_);
      case Family::kUniform: {
        if (a_ < 0.0)
          throw std::domain_error("moment: signed uniform support");
        const double num = std::pow(b_, q + 1.0) - std::pow(a_, q + 1.0);
        return num / ((q + 1.0) * (b_ - a_));
      }
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete: {
        double m = 0.0;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
          m += probs_[k] * std::pow(atoms_[k], q);
        return m;
      }
      case Family::kPerturbedPareto: {
        // E[X^q] = scale^q + q * Int_scale^inf x^{q-1} sf(x) dx, summed in
        // closed form segment by segment; geometric ratio (1-c) P^{q-a}.
        const double ratio = (1.0 - c_) * std::pow(p_, q - a_);
        if (ratio >= 1.0) return kInf;
        const double sq = std::pow(b_, q);
        if (q == a_) return sq * (1.0 + a_ * std::log(p_) / c_);
        const double seg = (std::pow(p_, q - a_) - 1.0) / (q - a_);
        return sq * (1.0 + q * seg / (1.0 - ratio));
      }
    }
    return kInf;
  }

  double mean() const { return moment(1.0); }

  // ---- support ------------------------------------------------------------
  double lower_support() const {
    switch (family_) {
      case Family::kPareto:
      case Family::kPerturbedPareto:
        return b_;
      case Family::kFrechet:
      case Family::kLognormal:
      case Family::kWeibullHeavy:
        return 0.0;
      case Family::kUniform:
        return a_;
      default:
        return atoms_.front();
    }
  }
  double upper_support() const {
    switch (family_) {
      case Family::kUniform:
        return b_;
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete:
        return atoms_.back();
      default:
        return kInf;
    }
  }
  bool is_discrete() const {
    return family_ == Family::kTwoPoint || family_ == Family::kBoundedDiscrete;
  }
  bool is_degenerate() const { return is_discrete() && atoms_.size() == 1; }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& atom_probs() const { return probs_; }

  /// Locations in [lo, hi] where the survival function jumps (law atoms).
  std::vector<double> sf_jump_points(double lo, double hi) const {
    std::vector<double> out;
    if (is_discrete()) {
      for (double a : atoms_)
        if (a >= lo && a <= hi) out.push_back(a);
    } else if (family_ == Family::kPerturbedPareto) {
      if (hi > b_ * p_) {
        long k = std::max<long>(1, pp_jump_count(std::max(lo, b_ * p_)));
        while (k >= 1 && pp_atom(k) >= lo) --k;
        for (++k; pp_atom(k) <= hi; ++k)
          if (pp_atom(k) >= lo) out.push_back(pp_atom(k));
      }
    }
    return out;
  }

  // ---- declared tail metadata ----------------------------------------------
  DistributionMeta meta() const {
    DistributionMeta m;
    switch (family_) {
      case Family::kPareto:
      case Family::kFrechet:
        m.in_D = m.in_L = m.in_C = m.in_S = true;
        m.rv_index = a_;
        m.matuszewska_upper = m.matuszewska_lower = a_;
        m.l_index = 1.0;
        break;
      case Family::kLognormal:
      case Family::kWeibullHeavy:
        m.in_L = m.in_S = true;  // lighter-than-power yet heavy tails
        break;
      case Family::kUniform:
      case Family::kTwoPoint:
      case Family::kBoundedDiscrete:
        break;  // bounded support: no heavy-tail structure
      case Family::kPerturbedPareto: {
        m.in_D = true;  // power envelope holds, but drops never fade
        const double idx = a_ + std::log(1.0 / (1.0 - c_)) / std::log(p_);
        m.matuszewska_upper = m.matuszewska_lower = idx;
        m.l_index = 1.0 - c_;
        break;
      }
    }
    return m;
  }

  /// Pointwise exact scaled-tail ratios sf(v x)/sf(x) over a grid.
  std::vector<double> ratio_curve(double v, const std::vector<double>& xs) const {
    if (!(v > 0.0)) throw std::domain_error("ratio_curve: v must be > 0");
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
      const double den = sf(x);
      if (den <= 0.0)
        throw std::domain_error(
            "ratio_curve: survival vanishes at grid point x=" +
            std::to_string(x));
      out.push_back(sf(v * x) / den);
    }
    return out;
  }

  // ---- equality (used by scenario round-trip checks) -----------------------
  friend bool operator==(const Distribution& l, const Distribution& r) {
    return l.family_ == r.family_ && l.a_ == r.a_ && l.b_ == r.b_ &&
           l.c_ == r.c_ && l.p_ == r.p_ && l.atoms_ == r.atoms_ &&
           l.probs_ == r.probs_;
  }

  // Family parameters, exposed for serialization.
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_c() const { return c_; }
  double param_p() const { return p_; }

 private:
  explicit Distribution(Family f) : family_(f) {}

  static void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  }

  void drop_null_atoms() {
    std::vector<double> a, p;
    for (std::size_t k = 0; k < atoms_.size(); ++k)
      if (probs_[k] > 0.0) {
        a.push_back(atoms_[k]);
        p.push_back(probs_[k]);
      }
    atoms_ = std::move(a);
    probs_ = std::move(p);
  }
  void finish_discrete(const char* who) {
    require(!atoms_.empty(),
            (std::string(who) + ": all probabilities are zero").c_str());
  }
  static void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
  }

  // ---- geometric-drop Pareto internals -------------------------------------
  double pp_atom(long k) const { return b_ * std::pow(p_, double(k)); }
  /// Number of drop atoms at or below x (right-continuous convention).
  long pp_jump_count(double x) const {
    if (x < b_ * p_) return 0;
    long k = long(std::floor(std::log(x / b_) / std::log(p_)));
    while (k >= 1 && pp_atom(k) > x) --k;
    while (pp_atom(k + 1) <= x) ++k;
    return k;
  }
  /// Smallest x with sf(x) <= s, for s in (0, 1).
  double pp_quantile(double s) const {
    // On segment k (between atoms k and k+1) the survival runs continuously
    // from hi_k = P^{-a k}(1-c)^k down to hi_{k+1}/(1-c); levels inside the
    // gap (hi_{k+1}, hi_{k+1}/(1-c)] are absorbed by the atom at k+1.
    const double step = std::log(std::pow(p_, -a_) * (1.0 - c_));
    long k = std::max<long>(0, long(std::floor(std::log(s) / step)) - 4);
    auto hi = [this](long j) {
      return std::pow(p_, -a_ * double(j)) * std::pow(1.0 - c_, double(j));
    };
    while (hi(k + 1) >= s) ++k;
    // Now hi(k+1) < s <= hi(k).
    const double lo_k = hi(k + 1) / (1.0 - c_);
    if (s > lo_k)  // continuous stretch of segment k
      return b_ * std::pow(s / std::pow(1.0 - c_, double(k)), -1.0 / a_);
    return pp_atom(k + 1);
  }

  Family family_;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0, p_ = 0.0;
  std::vector<double> atoms_, probs_;  // discrete families only
};

}  // namespace wtail
