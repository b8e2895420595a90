#pragma once
// Bivariate copula catalogue: independence, the polynomial (FGM) family,
// Gaussian, and the survival-Clayton family (the only one with genuine upper
// tail dependence, kept as a negative control).  Exact cdfs, conditional
// cdfs, conditional-inversion sampling, and tail-dependence coefficients.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wtail/distribution.hpp"
#include "wtail/normal.hpp"
#include "wtail/rng.hpp"

namespace wtail {

/// cdf of a uniform tilted by the linear factor 1 + s(1 - 2 w): the map
/// t(w) = w (1 + s (1 - w)) for s in [-1, 1].  This is both the conditional
/// cdf of one FGM coordinate given the other and the distributional tilt
/// used by the joint model.
inline double tilted_uniform_cdf(double w, double s) {
  return w * (1.0 + s * (1.0 - w));
}

/// Inverse of tilted_uniform_cdf in w for t in [0, 1], numerically stable at
/// s -> 0 (rationalized quadratic root).
inline double tilted_uniform_cdf_inverse(double t, double s) {
  const double disc = (1.0 + s) * (1.0 + s) - 4.0 * s * t;
  const double root = std::sqrt(std::max(0.0, disc));
  const double denom = (1.0 + s) + root;
  if (denom <= 0.0) return std::sqrt(std::max(0.0, t));  // s = -1 endpoint
  return 2.0 * t / denom;
}

/// Density of the tilt at w: 1 + s (1 - 2 w).
inline double tilted_uniform_pdf(double w, double s) {
  return 1.0 + s * (1.0 - 2.0 * w);
}

enum class CopulaFamily { kIndependence, kFGM, kGaussian, kSurvivalClayton };

class Copula {
 public:
  static Copula independence() { return Copula(CopulaFamily::kIndependence, 0.0); }
  static Copula fgm(double kappa) {
    if (!(kappa > -1.0 && kappa < 1.0))
      throw std::invalid_argument("fgm: kappa must lie in (-1, 1)");
    return Copula(CopulaFamily::kFGM, kappa);
  }
  static Copula gaussian(double rho) {
    if (!(rho > -1.0 && rho < 1.0))
      throw std::invalid_argument("gaussian: rho must lie in (-1, 1)");
    return Copula(CopulaFamily::kGaussian, rho);
  }
  static Copula survival_clayton(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("survival_clayton: theta must be > 0");
    return Copula(CopulaFamily::kSurvivalClayton, theta);
  }

  CopulaFamily family() const { return family_; }
  double parameter() const { return param_; }

  double cdf(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
      throw std::domain_error("copula cdf: arguments must lie in [0, 1]");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    switch (family_) {
      case CopulaFamily::kIndependence:
        return u * v;
      case CopulaFamily::kFGM:
        return u * v * (1.0 + param_ * (1.0 - u) * (1.0 - v));
      case CopulaFamily::kGaussian:
        return bivariate_normal_cdf(normal_ppf(u), normal_ppf(v), param_);
      case CopulaFamily::kSurvivalClayton:
        return u + v - 1.0 + clayton_cdf(1.0 - u, 1.0 - v, param_);
    }
    return 0.0;
  }

  /// P[V <= v | U = u].
  double conditional_cdf(double v, double u) const {
    if (!(u > 0.0 && u < 1.0) || !(v >= 0.0 && v <= 1.0))
      throw std::domain_error("conditional_cdf: u in (0,1), v in [0,1]");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    switch (family_) {
      case CopulaFamily::kIndependence:
        return v;
      case CopulaFamily::kFGM:
        return tilted_uniform_cdf(v, param_ * (1.0 - 2.0 * u));
      case CopulaFamily::kGaussian: {
        const double z = normal_ppf(u);
        const double w = normal_ppf(v);
        return normal_cdf((w - param_ * z) /
                          std::sqrt(1.0 - param_ * param_));
      }
      case CopulaFamily::kSurvivalClayton:
        return 1.0 - clayton_conditional(1.0 - v, 1.0 - u, param_);
    }
    return v;
  }

  /// Inverse of conditional_cdf in v: draws (u, v) by conditional inversion
  /// from two independent uniforms.
  double conditional_quantile(double w, double u) const {
    switch (family_) {
      case CopulaFamily::kIndependence:
        return w;
      case CopulaFamily::kFGM:
        return tilted_uniform_cdf_inverse(w, param_ * (1.0 - 2.0 * u));
      case CopulaFamily::kGaussian: {
        const double z = normal_ppf(u);
        return normal_cdf(param_ * z +
                          std::sqrt(1.0 - param_ * param_) * normal_ppf(w));
      }
      case CopulaFamily::kSurvivalClayton: {
        // Invert the Clayton conditional for the reflected coordinates.
        const double s = 1.0 - u;
        const double th = param_;
        const double t = std::pow(
            std::pow(s, -th) * (std::pow(1.0 - w, -th / (th + 1.0)) - 1.0) +
                1.0,
            -1.0 / th);
        return 1.0 - t;
      }
    }
    return w;
  }

  std::pair<double, double> sample(Xoshiro256pp& rng) const {
    const double u = rng.next_uniform();
    const double w = rng.next_uniform();
    return {u, conditional_quantile(w, u)};
  }

  /// Copula density c(u, v) at interior points.
  double density(double u, double v) const {
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
      throw std::domain_error("copula density: arguments must lie in (0, 1)");
    switch (family_) {
      case CopulaFamily::kIndependence:
        return 1.0;
      case CopulaFamily::kFGM:
        return 1.0 + param_ * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
      case CopulaFamily::kGaussian: {
        const double a = normal_ppf(u);
        const double b = normal_ppf(v);
        const double r2 = 1.0 - param_ * param_;
        return std::exp(-(param_ * param_ * (a * a + b * b) -
                          2.0 * param_ * a * b) /
                        (2.0 * r2)) /
               std::sqrt(r2);
      }
      case CopulaFamily::kSurvivalClayton: {
        const double s = 1.0 - u;
        const double t = 1.0 - v;
        const double th = param_;
        const double a = std::pow(s, -th) + std::pow(t, -th) - 1.0;
        return (th + 1.0) * std::pow(s * t, -th - 1.0) *
               std::pow(a, -1.0 / th - 2.0);
      }
    }
    return 1.0;
  }

  /// Coefficient of upper tail dependence.
  double upper_tail_dependence() const {
    if (family_ == CopulaFamily::kSurvivalClayton)
      return std::pow(2.0, -1.0 / param_);
    return 0.0;
  }

  bool has_upper_tail_dependence() const {
    return upper_tail_dependence() > 0.0;
  }

  friend bool operator==(const Copula& l, const Copula& r) {
    return l.family_ == r.family_ && l.param_ == r.param_;
  }

 private:
  Copula(CopulaFamily f, double p) : family_(f), param_(p) {}

  static double clayton_cdf(double s, double t, double theta) {
    if (s <= 0.0 || t <= 0.0) return 0.0;
    return std::pow(std::pow(s, -theta) + std::pow(t, -theta) - 1.0,
                    -1.0 / theta);
  }
  /// d/ds of the Clayton cdf: P[T <= t | S = s].
  static double clayton_conditional(double t, double s, double theta) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::pow(s, -theta) + std::pow(t, -theta) - 1.0;
    return std::pow(s, -theta - 1.0) * std::pow(a, -1.0 / theta - 1.0);
  }

  CopulaFamily family_;
  double param_;
};

/// Exact joint exceedance P[Xi > xi, Xj > xj] when (Xi, Xj) carry copula c:
/// survival-copula algebra 1 - u - v + C(u, v) at u = Fi(xi), v = Fj(xj).
inline double joint_exceedance(const Copula& c, const Distribution& fi,
                               const Distribution& fj, double xi, double xj) {
  const double u = fi.cdf(xi);
  const double v = fj.cdf(xj);
  return std::max(0.0, 1.0 - u - v + c.cdf(u, v));
}

}  // namespace wtail
