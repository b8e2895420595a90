#pragma once
// Joint model over n (loss, weight) pairs, built in layers so that every
// declared bivariate margin is exact:
//
//   1. latent weight uniforms V = (V_1..V_n) follow the weight-block copula
//      (independence, equal-parameter polynomial family, or equicorrelated
//      Gaussian), sampled by sequential conditional inversion;
//   2. latent loss uniforms W = (W_1..W_n) follow the loss-block copula
//      (independence, pairwise polynomial matrix, equicorrelated Gaussian,
//      or exchangeable survival-Clayton), independent of V;
//   3. each loss uniform is tilted against its own weight through the
//      conditional quantile of the bivariate polynomial copula,
//      U_i = T_{V_i}^{-1}(W_i) with T_v(u) = u (1 + kappa_i (1-u)(1-2v)),
//      which makes (U_i, V_i) exactly that bivariate copula while leaving
//      W's cross-loss dependence intact;
//   4. X_i and Theta_i are the marginal quantiles of U_i and V_i.
//
// The same tilt yields closed-form conditional survivals (the basis of the
// variance-reduced estimators) and closed-form limit link functions h and g.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wtail/copula.hpp"
#include "wtail/distribution.hpp"
#include "wtail/normal.hpp"
#include "wtail/quadrature.hpp"
#include "wtail/rng.hpp"

namespace wtail {

inline constexpr int kMaxDimension = 8;

enum class BlockFamily { kIndependence, kFGM, kGaussian, kSurvivalClayton };

/// Dependence among the weight coordinates.  `param` is the shared pairwise
/// polynomial parameter or the Gaussian equicorrelation.
struct ThetaBlockSpec {
  BlockFamily family = BlockFamily::kIndependence;
  double param = 0.0;
};

/// Dependence among the loss coordinates.  The polynomial family takes a
/// full symmetric parameter matrix; Gaussian takes an equicorrelation; the
/// survival-Clayton block is exchangeable with parameter `param`.
struct XBlockSpec {
  BlockFamily family = BlockFamily::kIndependence;
  double param = 0.0;
  std::vector<std::vector<double>> kappa;  // polynomial matrix (n x n)
};

/// One sampled row of the joint model.
struct Replicate {
  std::array<double, kMaxDimension> v{};      // weight uniforms
  std::array<double, kMaxDimension> w{};      // loss-block uniforms
  std::array<double, kMaxDimension> u{};      // tilted loss uniforms
  std::array<double, kMaxDimension> theta{};  // weights
  std::array<double, kMaxDimension> x{};      // losses
};

class JointModel {
 public:
  JointModel(std::vector<Distribution> losses, std::vector<Distribution> weights,
             std::vector<double> link_kappas, ThetaBlockSpec theta_block,
             XBlockSpec x_block)
      : losses_(std::move(losses)),
        weights_(std::move(weights)),
        link_(std::move(link_kappas)),
        theta_block_(theta_block),
        x_block_(std::move(x_block)) {
    n_ = int(losses_.size());
    require(n_ >= 1 && n_ <= kMaxDimension,
            "joint model: dimension must lie in 1..8");
    require(int(weights_.size()) == n_ && int(link_.size()) == n_,
            "joint model: losses, weights, links must have equal length");
    for (int i = 0; i < n_; ++i) {
      require(std::fabs(link_[i]) < 1.0,
              "weight link: kappa must lie in (-1, 1)");
      require(weights_[i].lower_support() >= 0.0,
              "weight coordinates must be nonnegative");
      require(weights_[i].sf(0.0) > 0.0,
              "weight coordinates must be non-degenerate at zero");
    }
    validate_theta_block();
    validate_x_block();
  }

  int dimension() const { return n_; }
  const Distribution& loss(int i) const { return losses_[std::size_t(i)]; }
  const Distribution& weight(int i) const { return weights_[std::size_t(i)]; }
  double link_kappa(int i) const { return link_[std::size_t(i)]; }
  const ThetaBlockSpec& theta_block() const { return theta_block_; }
  const XBlockSpec& x_block() const { return x_block_; }
  double x_pair_kappa(int i, int j) const {
    if (x_block_.family != BlockFamily::kFGM) return 0.0;
    return x_block_.kappa[std::size_t(i)][std::size_t(j)];
  }

  /// Coefficient of upper tail dependence between any two loss coordinates.
  double x_pair_upper_tail_dependence() const {
    if (x_block_.family == BlockFamily::kSurvivalClayton)
      return std::pow(2.0, -1.0 / x_block_.param);
    return 0.0;
  }

  // ---- link functions -------------------------------------------------------

  /// Linear tilt factor as a function of the latent weight uniform v.
  double h_tilde(int i, double v) const {
    return 1.0 + link_[std::size_t(i)] * (2.0 * v - 1.0);
  }

  /// Mid-cdf value of the weight at theta: G(theta-) + G(theta) - 1.
  double z_mid(int i, double theta) const {
    const auto& g = weights_[std::size_t(i)];
    return g.cdf_left(theta) + g.cdf(theta) - 1.0;
  }

  /// Limit of conditional-to-unconditional tail ratio of X_i given
  /// Theta_i = theta.
  double h_limit(int i, double theta) const {
    check_weight_support(i, theta, "h_limit");
    return 1.0 + link_[std::size_t(i)] * z_mid(i, theta);
  }

  /// Exact P[X_i > x | Theta_i = theta] at finite x.
  double conditional_sf_given_weight(int i, double x, double theta) const {
    check_weight_support(i, theta, "conditional_sf_given_weight");
    const auto& f = losses_[std::size_t(i)];
    return f.sf(x) * (1.0 + link_[std::size_t(i)] * f.cdf(x) * z_mid(i, theta));
  }

  /// Exact P[X_i > x | V_i = v] (latent-uniform conditioning; integrates the
  /// previous function over a weight atom's v-interval).
  double conditional_sf_given_v(int i, double x, double v) const {
    const auto& f = losses_[std::size_t(i)];
    return f.sf(x) * (1.0 + link_[std::size_t(i)] * f.cdf(x) * (2.0 * v - 1.0));
  }

  /// The tilt T_v(u): conditional cdf of U_i at u given V_i = v.
  double tilt(int i, double u, double v) const {
    return tilted_uniform_cdf(u, link_[std::size_t(i)] * (1.0 - 2.0 * v));
  }

  /// Pairwise copula of the latent weight uniforms (V_i, V_j).
  Copula theta_pair_copula(int i, int j) const {
    (void)i;
    (void)j;
    switch (theta_block_.family) {
      case BlockFamily::kFGM:
        return Copula::fgm(theta_block_.param);
      case BlockFamily::kGaussian:
        return Copula::gaussian(theta_block_.param);
      default:
        return Copula::independence();
    }
  }

  /// Cov(V_i, V_j) under the weight block (closed forms).
  double theta_pair_v_cov(int i, int j) const {
    (void)i;
    (void)j;
    switch (theta_block_.family) {
      case BlockFamily::kFGM:
        return theta_block_.param / 36.0;
      case BlockFamily::kGaussian:
        return std::asin(theta_block_.param / 2.0) / (2.0 * M_PI);
      default:
        return 0.0;
    }
  }

  /// E[h~_i(V_i) h~_j(V_j)], the normalizer of the pair limit function.
  double pair_hh_mean(int i, int j) const {
    return 1.0 + 4.0 * link_[std::size_t(i)] * link_[std::size_t(j)] *
                     theta_pair_v_cov(i, j);
  }

  /// Joint survival of the loss-block pair (W_i, W_j) at (a, b).
  double x_pair_survival(int i, int j, double a, double b) const {
    a = std::min(1.0, std::max(0.0, a));
    b = std::min(1.0, std::max(0.0, b));
    switch (x_block_.family) {
      case BlockFamily::kIndependence:
        return (1.0 - a) * (1.0 - b);
      case BlockFamily::kFGM: {
        const double k = x_block_.kappa[std::size_t(i)][std::size_t(j)];
        return (1.0 - a) * (1.0 - b) * (1.0 + k * a * b);
      }
      case BlockFamily::kGaussian: {
        const Copula c = Copula::gaussian(x_block_.param);
        return std::max(0.0, 1.0 - a - b + c.cdf(a, b));
      }
      case BlockFamily::kSurvivalClayton: {
        const double th = x_block_.param;
        const double s = 1.0 - a, t = 1.0 - b;
        if (s <= 0.0 || t <= 0.0) return 0.0;
        return std::pow(std::pow(s, -th) + std::pow(t, -th) - 1.0, -1.0 / th);
      }
    }
    return (1.0 - a) * (1.0 - b);
  }

  /// Whether the loss block admits the limiting pair link function.
  bool g_supported() const {
    return x_block_.family == BlockFamily::kIndependence ||
           x_block_.family == BlockFamily::kFGM;
  }

  /// Limit of P[X_i > x_i, X_j > x_j | Theta_i = ti, Theta_j = tj] over
  /// P[X_i > x_i, X_j > x_j] as both thresholds grow.
  double g_limit(int i, int j, double ti, double tj) const {
    require_g(i, j);
    check_weight_support(i, ti, "g_limit");
    check_weight_support(j, tj, "g_limit");
    return box_hh_mean(i, j, ti, tj) / pair_hh_mean(i, j);
  }

  /// Finite bound K_ij with g_ij <= K_ij on the whole weight support.
  double g_bound(int i, int j) const {
    require_g(i, j);
    const double denom = pair_hh_mean(i, j);
    const auto& gi = weights_[std::size_t(i)];
    const auto& gj = weights_[std::size_t(j)];
    if (gi.is_discrete() && gj.is_discrete()) {
      double best = 0.0;
      for (double a : gi.atoms())
        for (double b : gj.atoms())
          best = std::max(best, g_limit(i, j, a, b));
      return best;
    }
    return (1.0 + std::fabs(link_[std::size_t(i)])) *
           (1.0 + std::fabs(link_[std::size_t(j)])) / denom;
  }

  /// Exact unconditional loss-pair exceedance P[X_i > xi, X_j > xj] with the
  /// weights integrated out (latent 2-D quadrature).
  double loss_pair_exceedance(int i, int j, double xi, double xj) const {
    const double ui = losses_[std::size_t(i)].cdf(xi);
    const double uj = losses_[std::size_t(j)].cdf(xj);
    if (ui >= 1.0 || uj >= 1.0) return 0.0;
    if (theta_block_.family == BlockFamily::kIndependence ||
        (link_[std::size_t(i)] == 0.0 && link_[std::size_t(j)] == 0.0)) {
      // V_i and V_j decouple: both inner expectations are closed-form
      // moments of the tilt, see x-block cases.
      return pair_exceedance_decoupled(i, j, ui, uj);
    }
    const Copula pair = theta_pair_copula(i, j);
    auto f = [&](double vi, double vj) {
      return x_pair_survival(i, j, tilt(i, ui, vi), tilt(j, uj, vj)) *
             pair.density(vi, vj);
    };
    const QuadratureResult r =
        integrate_2d(f, {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, 1e-12, 1e-8);
    return require_converged(r, "loss_pair_exceedance");
  }

  /// Exact joint exceedance of the weighted products,
  /// P[Theta_i X_i > xi, Theta_j X_j > xj], by quadrature over the latent
  /// weight uniforms (v_i, v_j).
  double weighted_pair_exceedance(int i, int j, double xi, double xj) const {
    require_pair(i, j);
    const Copula pair = theta_pair_copula(i, j);
    auto f = [&](double vi, double vj) {
      return x_pair_survival(i, j, product_u_threshold(i, xi, vi),
                             product_u_threshold(j, xj, vj)) *
             pair.density(vi, vj);
    };
    const QuadratureResult r =
        integrate_2d(f, product_v_breakpoints(i, xi),
                     product_v_breakpoints(j, xj), 1e-12, 1e-8);
    return require_converged(r, "weighted_pair_exceedance");
  }

  // ---- sampling -------------------------------------------------------------

  /// Draw one row; consumes exactly 2 n uniforms for every block family.
  void sample_replicate(Xoshiro256pp& rng, Replicate& out) const {
    sample_v_block(rng, out.v);
    sample_w_block(rng, out.w);
    for (int i = 0; i < n_; ++i) {
      const std::size_t k = std::size_t(i);
      out.u[k] = tilted_uniform_cdf_inverse(
          out.w[k], link_[k] * (1.0 - 2.0 * out.v[k]));
      out.theta[k] = weights_[k].quantile(out.v[k]);
      out.x[k] = losses_[k].quantile(out.u[k]);
    }
  }

  std::vector<Replicate> sample_joint(std::uint64_t seed, std::size_t m) const {
    if (m < 1) throw std::domain_error("sample_joint: m must be >= 1");
    std::vector<Replicate> rows(m);
    const std::uint64_t chunks = chunk_count(m);
    std::size_t at = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      Xoshiro256pp rng = chunk_rng(seed, c);
      const std::size_t hi = std::min<std::size_t>(m, (c + 1) * kChunkSize);
      for (; at < hi; ++at) sample_replicate(rng, rows[at]);
    }
    return rows;
  }

  // ---- conditional machinery for variance reduction -------------------------

  /// P[W_i > t | W_j = w_j for j < active, j != i].  `active` < n restricts
  /// to a prefix of coordinates (used by randomly stopped sums).
  double conditional_w_survival(int i, double t, const Replicate& rep,
                                int active) const {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    switch (x_block_.family) {
      case BlockFamily::kIndependence:
        return 1.0 - t;
      case BlockFamily::kFGM: {
        double d = 1.0;
        for (int j = 0; j < active; ++j) {
          if (j == i) continue;
          for (int l = j + 1; l < active; ++l) {
            if (l == i) continue;
            d += x_block_.kappa[std::size_t(j)][std::size_t(l)] *
                 (1.0 - 2.0 * rep.w[std::size_t(j)]) *
                 (1.0 - 2.0 * rep.w[std::size_t(l)]);
          }
        }
        double s = 0.0;
        for (int j = 0; j < active; ++j) {
          if (j == i) continue;
          s += x_block_.kappa[std::size_t(i)][std::size_t(j)] *
               (1.0 - 2.0 * rep.w[std::size_t(j)]);
        }
        s /= d;
        return (1.0 - t) * (1.0 - s * t);
      }
      case BlockFamily::kGaussian: {
        const double rho = x_block_.param;
        int r = 0;
        double zsum = 0.0;
        for (int j = 0; j < active; ++j) {
          if (j == i) continue;
          zsum += normal_ppf(rep.w[std::size_t(j)]);
          ++r;
        }
        if (r == 0) return 1.0 - t;
        const double denom = 1.0 + (r - 1) * rho;
        const double mu = rho * zsum / denom;
        const double var = 1.0 - rho * rho * double(r) / denom;
        return normal_sf((normal_ppf(t) - mu) / std::sqrt(var));
      }
      case BlockFamily::kSurvivalClayton: {
        const double th = x_block_.param;
        int r = 0;
        double s2 = 0.0;
        for (int j = 0; j < active; ++j) {
          if (j == i) continue;
          s2 += std::pow(1.0 - rep.w[std::size_t(j)], -th);
          ++r;
        }
        if (r == 0) return 1.0 - t;
        const double num = std::pow(1.0 - t, -th) + s2 - double(r);
        const double den = s2 - double(r) + 1.0;
        return std::pow(num / den, -(1.0 / th + double(r)));
      }
    }
    return 1.0 - t;
  }

  /// P[Theta_i X_i > y | all latent coordinates except W_i], with the first
  /// `active` coordinates participating in the loss block.
  double conditional_product_sf(int i, double y, const Replicate& rep,
                                int active) const {
    const std::size_t k = std::size_t(i);
    const double theta = rep.theta[k];
    if (theta <= 0.0) return y < 0.0 ? 1.0 : 0.0;
    const double u_threshold = losses_[k].cdf(y / theta);
    const double t = tilt(i, u_threshold, rep.v[k]);
    return conditional_w_survival(i, t, rep, active);
  }

 private:
  static void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
  }

  void require_g(int i, int j) const {
    require_pair(i, j);
    if (!g_supported())
      throw std::domain_error(
          "pair link: loss block admits no finite limiting pair function "
          "(tail-dependent or scale-sensitive joint tail)");
  }

  void require_pair(int i, int j) const {
    if (i == j) throw std::domain_error("pair link: indices must differ");
  }

  /// Loss-block uniform threshold for {Theta_k X_k > x} given V_k = v.
  double product_u_threshold(int k, double x, double v) const {
    const double theta = weights_[std::size_t(k)].quantile(v);
    if (theta <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return tilt(k, losses_[std::size_t(k)].cdf(x / theta), v);
  }

  /// Quadrature breakpoints in v for the product-threshold integrand: weight
  /// quantile jumps (discrete atoms) and the loss support edge crossing.
  std::vector<double> product_v_breakpoints(int k, double x) const {
    std::vector<double> pts = {0.0, 1.0};
    const auto& g = weights_[std::size_t(k)];
    if (g.is_discrete()) {
      for (double a : g.atoms()) {
        const double c = g.cdf(a);
        if (c > 0.0 && c < 1.0) pts.push_back(c);
      }
    } else {
      const double lo = losses_[std::size_t(k)].lower_support();
      if (lo > 0.0 && x > 0.0) {
        const double v_edge = g.cdf(x / lo);
        if (v_edge > 0.0 && v_edge < 1.0) pts.push_back(v_edge);
      }
      pts.push_back(0.5);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  void check_weight_support(int i, double theta, const char* who) const {
    const auto& g = weights_[std::size_t(i)];
    const bool inside =
        g.is_discrete()
            ? g.point_mass(theta) > 0.0
            : (theta >= g.lower_support() && theta <= g.upper_support());
    if (!inside)
      throw std::domain_error(std::string(who) +
                              ": theta outside the weight support");
  }

  /// Mean of h~ over a v-interval under a uniform marginal (closed form).
  double interval_h_mean(int k, double lo, double hi) const {
    return 1.0 + link_[std::size_t(k)] * (lo + hi - 1.0);
  }

  // E[h~_i(V_i) h~_j(V_j) | V in the atom boxes of (ti, tj)]; degenerate
  // boxes (continuous weights) collapse to point evaluations.
  double box_hh_mean(int i, int j, double ti, double tj) const {
    const auto& gi = weights_[std::size_t(i)];
    const auto& gj = weights_[std::size_t(j)];
    const bool di = gi.is_discrete();
    const bool dj = gj.is_discrete();
    if (!di && !dj) return h_tilde(i, gi.cdf(ti)) * h_tilde(j, gj.cdf(tj));
    const bool indep = theta_block_.family == BlockFamily::kIndependence;
    const Copula pair = theta_pair_copula(i, j);
    if (di && dj) {
      const double a1 = gi.cdf_left(ti), a2 = gi.cdf(ti);
      const double b1 = gj.cdf_left(tj), b2 = gj.cdf(tj);
      if (indep) return interval_h_mean(i, a1, a2) * interval_h_mean(j, b1, b2);
      const double mass =
          pair.cdf(a2, b2) - pair.cdf(a1, b2) - pair.cdf(a2, b1) +
          pair.cdf(a1, b1);
      auto f = [&](double vi, double vj) {
        return h_tilde(i, vi) * h_tilde(j, vj) * pair.density(vi, vj);
      };
      const QuadratureResult r =
          integrate_2d(f, {a1, a2}, {b1, b2}, 1e-13, 1e-10);
      return require_converged(r, "pair link box expectation") / mass;
    }
    // Mixed: condition on the continuous coordinate's point value.
    const int pi = di ? j : i;   // point coordinate
    const int bi = di ? i : j;   // box coordinate
    const auto& gp = weights_[std::size_t(pi)];
    const auto& gb = weights_[std::size_t(bi)];
    const double vp_raw = gp.cdf(di ? tj : ti);
    const double b1 = gb.cdf_left(di ? ti : tj), b2 = gb.cdf(di ? ti : tj);
    if (indep)
      return h_tilde(pi, vp_raw) * interval_h_mean(bi, b1, b2);
    // Conditioning value nudged off exact support endpoints, where the
    // conditional law may be degenerate; the one-sided limit is taken.
    const double vp = std::min(1.0 - 1e-12, std::max(1e-12, vp_raw));
    const double mass =
        pair.conditional_cdf(b2, vp) - pair.conditional_cdf(b1, vp);
    auto f = [&](double vb) {
      // density of V_box given V_point = vp is the copula density.
      return h_tilde(bi, vb) * pair.density(vp, vb);
    };
    const QuadratureResult r = integrate(f, b1, b2, 1e-13, 1e-10);
    const double num = require_converged(r, "pair link box expectation");
    return h_tilde(pi, vp_raw) * num / mass;
  }

  // Closed-form loss-pair exceedance when V_i, V_j decouple.
  double pair_exceedance_decoupled(int i, int j, double ui, double uj) const {
    // E[T] = u and E[T(1-T)] = u(1-u)(1 - kappa^2 u(1-u)/3) for the tilt T
    // averaged over a uniform latent v.
    auto t_self = [this](int k, double u) {
      const double kap = link_[std::size_t(k)];
      return u * (1.0 - u) * (1.0 - kap * kap * u * (1.0 - u) / 3.0);
    };
    switch (x_block_.family) {
      case BlockFamily::kIndependence:
        return (1.0 - ui) * (1.0 - uj);
      case BlockFamily::kFGM: {
        const double k = x_block_.kappa[std::size_t(i)][std::size_t(j)];
        return (1.0 - ui) * (1.0 - uj) + k * t_self(i, ui) * t_self(j, uj);
      }
      default: {
        // Gaussian or survival-Clayton loss block: integrate the pair
        // survival against the independent tilts.
        auto f = [&](double vi, double vj) {
          return x_pair_survival(i, j, tilt(i, ui, vi), tilt(j, uj, vj));
        };
        const QuadratureResult r =
            integrate_2d(f, {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, 1e-12, 1e-8);
        return require_converged(r, "loss_pair_exceedance");
      }
    }
  }

  // ---- block validation -----------------------------------------------------

  void validate_theta_block() {
    switch (theta_block_.family) {
      case BlockFamily::kIndependence:
        break;
      case BlockFamily::kFGM: {
        require(std::fabs(theta_block_.param) < 1.0,
                "weight block: kappa must lie in (-1, 1)");
        std::vector<std::vector<double>> m(
            std::size_t(n_), std::vector<double>(std::size_t(n_), 0.0));
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b)
            if (a != b) m[std::size_t(a)][std::size_t(b)] = theta_block_.param;
        check_corners(m, "weight block");
        break;
      }
      case BlockFamily::kGaussian: {
        require(std::fabs(theta_block_.param) < 1.0,
                "weight block: rho must lie in (-1, 1)");
        theta_chol_ = equicorrelation_cholesky(theta_block_.param,
                                               "weight block");
        break;
      }
      case BlockFamily::kSurvivalClayton:
        require(false,
                "weight block: survival-Clayton weights are not supported");
        break;
    }
  }

  void validate_x_block() {
    switch (x_block_.family) {
      case BlockFamily::kIndependence:
        break;
      case BlockFamily::kFGM: {
        auto& m = x_block_.kappa;
        require(int(m.size()) == n_, "loss block: kappa matrix must be n x n");
        for (int a = 0; a < n_; ++a) {
          require(int(m[std::size_t(a)].size()) == n_,
                  "loss block: kappa matrix must be n x n");
          require(m[std::size_t(a)][std::size_t(a)] == 0.0,
                  "loss block: kappa diagonal must be zero");
          for (int b = 0; b < n_; ++b) {
            require(std::fabs(m[std::size_t(a)][std::size_t(b)]) < 1.0,
                    "loss block: kappa entries must lie in (-1, 1)");
            require(m[std::size_t(a)][std::size_t(b)] ==
                        m[std::size_t(b)][std::size_t(a)],
                    "loss block: kappa matrix must be symmetric");
          }
        }
        check_corners(m, "loss block");
        break;
      }
      case BlockFamily::kGaussian:
        require(std::fabs(x_block_.param) < 1.0,
                "loss block: rho must lie in (-1, 1)");
        x_chol_ = equicorrelation_cholesky(x_block_.param, "loss block");
        break;
      case BlockFamily::kSurvivalClayton:
        require(x_block_.param > 0.0 && std::isfinite(x_block_.param),
                "loss block: survival-Clayton parameter must be > 0");
        break;
    }
  }

  /// Multilinear-density admissibility: the density's minimum over the cube
  /// sits at a vertex, so enumerate all 2^n sign vectors and report a
  /// violating one verbatim.
  void check_corners(const std::vector<std::vector<double>>& m,
                     const char* who) const {
    for (std::uint32_t bits = 0; bits < (1u << n_); ++bits) {
      double corner = 1.0;
      for (int a = 0; a < n_; ++a)
        for (int b = a + 1; b < n_; ++b) {
          const double ea = (bits >> a) & 1u ? 1.0 : -1.0;
          const double eb = (bits >> b) & 1u ? 1.0 : -1.0;
          corner += m[std::size_t(a)][std::size_t(b)] * ea * eb;
        }
      if (corner < 0.0) {
        std::ostringstream os;
        os << who << ": inadmissible kappa matrix; density corner "
           << corner << " at sign vector [";
        for (int a = 0; a < n_; ++a)
          os << (((bits >> a) & 1u) ? "+1" : "-1") << (a + 1 < n_ ? "," : "");
        os << "]";
        throw std::invalid_argument(os.str());
      }
    }
  }

  std::vector<std::vector<double>> equicorrelation_cholesky(
      double rho, const char* who) const {
    std::vector<std::vector<double>> l(
        std::size_t(n_), std::vector<double>(std::size_t(n_), 0.0));
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b <= a; ++b) {
        double sum = (a == b) ? 1.0 : rho;
        for (int k = 0; k < b; ++k)
          sum -= l[std::size_t(a)][std::size_t(k)] *
                 l[std::size_t(b)][std::size_t(k)];
        if (a == b) {
          if (sum <= 0.0)
            throw std::invalid_argument(
                std::string(who) +
                ": equicorrelation matrix is not positive definite");
          l[std::size_t(a)][std::size_t(b)] = std::sqrt(sum);
        } else {
          l[std::size_t(a)][std::size_t(b)] =
              sum / l[std::size_t(b)][std::size_t(b)];
        }
      }
    }
    return l;
  }

  // ---- block samplers (each consumes exactly n uniforms) --------------------

  void sample_v_block(Xoshiro256pp& rng,
                      std::array<double, kMaxDimension>& v) const {
    switch (theta_block_.family) {
      case BlockFamily::kIndependence:
        for (int t = 0; t < n_; ++t) v[std::size_t(t)] = rng.next_uniform();
        break;
      case BlockFamily::kFGM:
        sample_fgm_equal(rng, v, theta_block_.param);
        break;
      case BlockFamily::kGaussian:
        sample_gaussian(rng, v, theta_chol_);
        break;
      case BlockFamily::kSurvivalClayton:
        break;  // rejected at construction
    }
  }

  void sample_w_block(Xoshiro256pp& rng,
                      std::array<double, kMaxDimension>& w) const {
    switch (x_block_.family) {
      case BlockFamily::kIndependence:
        for (int t = 0; t < n_; ++t) w[std::size_t(t)] = rng.next_uniform();
        break;
      case BlockFamily::kFGM:
        sample_fgm_matrix(rng, w, x_block_.kappa);
        break;
      case BlockFamily::kGaussian:
        sample_gaussian(rng, w, x_chol_);
        break;
      case BlockFamily::kSurvivalClayton:
        sample_survival_clayton(rng, w, x_block_.param);
        break;
    }
  }

  void sample_fgm_equal(Xoshiro256pp& rng,
                        std::array<double, kMaxDimension>& out,
                        double kappa) const {
    double density = 1.0;
    for (int t = 0; t < n_; ++t) {
      double s = 0.0;
      for (int k = 0; k < t; ++k) s += kappa * (1.0 - 2.0 * out[std::size_t(k)]);
      s /= density;
      const double draw = rng.next_uniform();
      out[std::size_t(t)] = tilted_uniform_cdf_inverse(draw, s);
      density *= 1.0 + s * (1.0 - 2.0 * out[std::size_t(t)]);
    }
  }

  void sample_fgm_matrix(Xoshiro256pp& rng,
                         std::array<double, kMaxDimension>& out,
                         const std::vector<std::vector<double>>& m) const {
    double density = 1.0;
    for (int t = 0; t < n_; ++t) {
      double s = 0.0;
      for (int k = 0; k < t; ++k)
        s += m[std::size_t(k)][std::size_t(t)] *
             (1.0 - 2.0 * out[std::size_t(k)]);
      s /= density;
      const double draw = rng.next_uniform();
      out[std::size_t(t)] = tilted_uniform_cdf_inverse(draw, s);
      density *= 1.0 + s * (1.0 - 2.0 * out[std::size_t(t)]);
    }
  }

  void sample_gaussian(Xoshiro256pp& rng,
                       std::array<double, kMaxDimension>& out,
                       const std::vector<std::vector<double>>& chol) const {
    std::array<double, kMaxDimension> z{};
    for (int t = 0; t < n_; ++t)
      z[std::size_t(t)] = normal_ppf(rng.next_uniform());
    for (int t = 0; t < n_; ++t) {
      double acc = 0.0;
      for (int k = 0; k <= t; ++k)
        acc += chol[std::size_t(t)][std::size_t(k)] * z[std::size_t(k)];
      out[std::size_t(t)] = normal_cdf(acc);
    }
  }

  void sample_survival_clayton(Xoshiro256pp& rng,
                               std::array<double, kMaxDimension>& out,
                               double th) const {
    double s = 0.0;  // running sum of u^{-th}
    for (int t = 0; t < n_; ++t) {
      const double q = rng.next_uniform();
      double ucl;
      if (t == 0) {
        ucl = q;
      } else {
        const double b = s - double(t) + 1.0;
        const double c = 1.0 / th + double(t);
        ucl = std::pow(b * (std::pow(q, -1.0 / c) - 1.0) + 1.0, -1.0 / th);
      }
      s += std::pow(ucl, -th);
      out[std::size_t(t)] = 1.0 - ucl;
    }
  }

  int n_ = 0;
  std::vector<Distribution> losses_, weights_;
  std::vector<double> link_;
  ThetaBlockSpec theta_block_;
  XBlockSpec x_block_;
  std::vector<std::vector<double>> theta_chol_, x_chol_;
};

}  // namespace wtail
