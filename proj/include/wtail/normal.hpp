#pragma once
// Standard normal pdf/cdf/quantile and the bivariate normal cdf.
//
// The quantile uses Wichura's rational approximations (relative error below
// 1e-15 over the full double range).  The bivariate cdf uses the tetrachoric
// identity: d(Phi2)/d(rho) equals the bivariate density, which integrates in
// closed angular form to
//   Phi2(h, k, rho) = Phi(h) Phi(k)
//     + (1/2pi) * Int_0^{asin rho} exp(-(h^2 + k^2 - 2 h k sin t)
//                                      / (2 cos^2 t)) dt,
// evaluated with the adaptive Gauss-Kronrod integrator.  The integrand is
// bounded by 1 and smooth in the open interval, so the rule converges fast
// for |rho| < 1; rho = +-1 falls back to the exact monotone-coupling bounds.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wtail/quadrature.hpp"

namespace wtail {

inline double normal_pdf(double z) {
  static const double kInvSqrt2Pi = 0.3989422804014326779399461;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244008444);
}

inline double normal_sf(double z) {
  return 0.5 * std::erfc(z * 0.7071067811865475244008444);
}

/// Inverse standard normal cdf for p in (0, 1); returns +-infinity at the
/// endpoints and throws outside [0, 1].
inline double normal_ppf(double p) {
  if (p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw std::invalid_argument("normal_ppf: p must lie in [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.226495278852545610e3 * r + 2.8729085735721942674e4) * r +
               3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
             5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
           4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
               2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
             3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
           4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
               1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
             6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
           2.05319162663775882187e0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
               1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
             2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
           5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
               1.8463183175100546818e-5) * r + 7.8686913114561329960e-4) * r +
             1.4875361290850615023e-2) * r + 1.36929880922735805310e-1) * r +
           5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return (q < 0.0) ? -value : value;
}

/// P[Z1 <= h, Z2 <= k] for standard bivariate normal with correlation rho.
inline double bivariate_normal_cdf(double h, double k, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::invalid_argument("bivariate_normal_cdf: |rho| must be <= 1");
  if (std::isnan(h) || std::isnan(k))
    throw std::invalid_argument("bivariate_normal_cdf: NaN argument");
  if (h == -std::numeric_limits<double>::infinity() ||
      k == -std::numeric_limits<double>::infinity())
    return 0.0;
  if (h == std::numeric_limits<double>::infinity()) return normal_cdf(k);
  if (k == std::numeric_limits<double>::infinity()) return normal_cdf(h);
  if (rho == 1.0) return normal_cdf(std::min(h, k));
  if (rho == -1.0) return std::max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0);
  const double base = normal_cdf(h) * normal_cdf(k);
  if (rho == 0.0) return base;
  const double s = std::asin(rho);
  auto integrand = [h, k](double t) {
    const double ct = std::cos(t);
    const double c2 = ct * ct;
    if (c2 <= 0.0) return 0.0;  // unreachable for |rho| < 1 at interior nodes
    return std::exp(-(h * h + k * k - 2.0 * h * k * std::sin(t)) / (2.0 * c2));
  };
  const QuadratureResult r =
      integrate(integrand, std::min(0.0, s), std::max(0.0, s), 1e-14, 1e-11);
  const double correction =
      require_converged(r, "bivariate_normal_cdf") / (2.0 * M_PI);
  const double value = base + ((s >= 0.0) ? correction : -correction);
  return std::min(1.0, std::max(0.0, value));
}

}  // namespace wtail
