#pragma once

/// Tail-index and dependence diagnostics.
///
/// Three groups of read-only tools over marginals, samples, and joint
/// models:
///   * hill() corroborates a declared power-law index from a sample's
///     upper order statistics.
///   * l_index_scan() / matuszewska_scan() tabulate scaled-tail ratios
///     sf(v x)/sf(x) over a (v, x) grid -- exactly from a marginal law or
///     empirically from a sample -- and derive the limiting lower ratio
///     near v = 1 (l_index) together with the upper/lower scaling indexes
///     read off at the largest v (the matuszewska pair).
///   * tai_curve() and the uniformity residuals quantify pairwise tail
///     dependence along an x grid and measure how far the finite-level
///     conditional laws sit from their limiting link functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wtail/copula.hpp"
#include "wtail/dependence.hpp"
#include "wtail/distribution.hpp"
#include "wtail/model.hpp"
#include "wtail/quadrature.hpp"

namespace wtail {

// Engineering thresholds behind the qualitative verdicts.  The limits they
// probe carry no finite-x criterion, so the cutoffs are fixed here (and
// reported alongside results) rather than chosen silently per call site.
inline constexpr double kTaiVanishBelow = 0.01;    // "vanishing" ceiling at the deepest x
inline constexpr double kTaiPersistAbove = 0.10;   // "persistent" floor across the grid
inline constexpr double kTaiMonotoneSlack = 1.25;  // tolerated cell-to-cell upward wobble
inline constexpr double kHillHeavyCeiling = 5.0;   // larger index estimates look non-heavy
inline constexpr double kAlphaSpreadTol = 0.3;     // per-v index stability window
inline constexpr std::size_t kMinTailCount = 100;  // empirical depth floor at the deepest x

inline constexpr const char* kVerdictVanishing = "vanishing";
inline constexpr const char* kVerdictPersistent = "persistent";
inline constexpr const char* kVerdictInconclusive = "inconclusive";

/// Geometric threshold grid: `count` points from lo to hi inclusive with a
/// constant ratio between neighbours (endpoints exact).
inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw std::invalid_argument(
        "geometric_grid: require 0 < lo < hi, both finite");
  if (count < 2)
    throw std::invalid_argument("geometric_grid: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / double(count - 1);
  for (int t = 0; t < count; ++t)
    out[std::size_t(t)] = lo * std::exp(step * double(t));
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Result of the Hill log-excess scan of a sample's upper tail.
struct HillEstimate {
  double alpha = 0.0;       ///< reciprocal mean log-excess over the threshold
  double threshold = 0.0;   ///< the (k+1)-th largest sample value
  std::size_t k = 0;        ///< number of upper order statistics averaged
  bool looks_heavy = true;  ///< false once alpha exceeds kHillHeavyCeiling
};

/// Scaled-tail ratios sf(v x)/sf(x) over a (v, x) grid with the derived
/// index estimates.  Rows follow `vs`, columns follow `xs`.  In empirical
/// mode a cell is NaN when the denominator count is zero and 0 when only
/// the numerator count is; such cells are excluded from the estimates and
/// mark the scan inconclusive.
struct RatioScan {
  std::vector<double> vs;  ///< scale factors, >= 1, strictly increasing
  std::vector<double> xs;  ///< thresholds, positive, strictly increasing
  std::vector<std::vector<double>> ratios;  ///< [v-index][x-index]

  std::vector<double> inf_ratio;   ///< per-v minimum over the x grid
  std::vector<double> sup_ratio;   ///< per-v maximum over the x grid
  std::vector<double> alpha_by_v;  ///< -log(inf_ratio)/log(v); NaN at v = 1

  double matuszewska_upper = kInf;  ///< index from the infimum ratio at the largest v
  double matuszewska_lower = kInf;  ///< index from the supremum ratio at the largest v
  double l_index = std::numeric_limits<double>::quiet_NaN();  ///< v -> 1 limit of inf_ratio
  std::string extrapolation;  ///< how l_index was obtained

  /// Set by matuszewska_scan only: whether the per-v index estimates stay
  /// within kAlphaSpreadTol of each other on the scanned range (a bounded
  /// power envelope exists); an estimate drifting upward with v means no
  /// such envelope and the flag reads false.
  std::optional<bool> dominated_variation;

  /// Empirical mode only: too few exceedances at the deepest thresholds
  /// for the estimates to be trusted.
  bool inconclusive = false;
};

/// Pairwise tail-dependence diagnostic along an x grid: the ratio
/// P[|X_i| > x, X_j > x] / (sf_i(x) + sf_j(x)) split into its two-sided
/// parts, plus a qualitative verdict.  The left-cross part is identically
/// zero when coordinate i cannot go below -x.
struct DependenceCurve {
  std::vector<double> xs;
  std::vector<double> joint_exceedance;  ///< P[X_i > x, X_j > x]
  std::vector<double> left_cross;        ///< P[X_i < -x, X_j > x]
  std::vector<double> marginal_sum;      ///< sf_i(x) + sf_j(x)
  std::vector<double> ratio;             ///< (joint + left cross) / marginal sum
  std::string verdict;  ///< "vanishing" | "persistent" | "inconclusive"
};

namespace diag_detail {

[[noreturn]] inline void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

inline void check_scan_grids(const std::vector<double>& vs,
                             const std::vector<double>& xs) {
  if (vs.empty()) fail("scan: v grid must be nonempty");
  if (xs.empty()) fail("scan: x grid must be nonempty");
  for (std::size_t a = 0; a < vs.size(); ++a)
    if (!std::isfinite(vs[a]) || vs[a] < 1.0 ||
        (a > 0 && vs[a] <= vs[a - 1]))
      fail("scan: v grid must be finite, >= 1, and strictly increasing");
  for (std::size_t b = 0; b < xs.size(); ++b)
    if (!std::isfinite(xs[b]) || xs[b] <= 0.0 ||
        (b > 0 && xs[b] <= xs[b - 1]))
      fail("scan: x grid must be finite, positive, and strictly increasing");
}

inline void check_x_grid(const std::vector<double>& xs, const char* who) {
  if (xs.empty()) fail(std::string(who) + ": x grid must be nonempty");
  for (std::size_t b = 0; b < xs.size(); ++b)
    if (!std::isfinite(xs[b]) || xs[b] <= 0.0 ||
        (b > 0 && xs[b] <= xs[b - 1]))
      fail(std::string(who) +
           ": x grid must be finite, positive, and strictly increasing");
}

/// Fills the derived fields of a scan whose vs/xs/ratios are set.  Cells
/// that are not finite and positive are ignored; the l-index comes from a
/// log-log least-squares line through (v, inf_ratio) over v > 1, read off
/// at v = 1 and clamped into [0, 1].
inline void finish_scan(RatioScan& s) {
  const std::size_t nv = s.vs.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.inf_ratio.assign(nv, nan);
  s.sup_ratio.assign(nv, nan);
  s.alpha_by_v.assign(nv, nan);
  for (std::size_t a = 0; a < nv; ++a) {
    double lo = kInf, hi = 0.0;
    bool any = false;
    for (double r : s.ratios[a]) {
      if (!std::isfinite(r) || r <= 0.0) continue;
      any = true;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (!any) continue;
    s.inf_ratio[a] = lo;
    s.sup_ratio[a] = hi;
    if (s.vs[a] > 1.0) s.alpha_by_v[a] = -std::log(lo) / std::log(s.vs[a]);
  }
  for (std::size_t a = nv; a-- > 0;) {
    if (!(s.vs[a] > 1.0) || !std::isfinite(s.inf_ratio[a])) continue;
    s.matuszewska_upper = -std::log(s.inf_ratio[a]) / std::log(s.vs[a]);
    s.matuszewska_lower = -std::log(s.sup_ratio[a]) / std::log(s.vs[a]);
    break;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int np = 0;
  for (std::size_t a = 0; a < nv; ++a) {
    if (!(s.vs[a] > 1.0) || !std::isfinite(s.inf_ratio[a]) ||
        s.inf_ratio[a] <= 0.0)
      continue;
    const double lx = std::log(s.vs[a]);
    const double ly = std::log(s.inf_ratio[a]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++np;
  }
  if (np >= 2) {
    const double det = double(np) * sxx - sx * sx;
    const double intercept = (sy * sxx - sx * sxy) / det;
    s.l_index = std::min(1.0, std::max(0.0, std::exp(intercept)));
    s.extrapolation =
        "log-log least squares of the per-v infimum ratio over v > 1, "
        "intercept taken at v = 1";
  } else {
    s.extrapolation = "unavailable: need at least two v values above 1";
  }
}

inline RatioScan scan_exact(const Distribution& d, std::vector<double> vs,
                            std::vector<double> xs) {
  RatioScan s;
  s.vs = std::move(vs);
  s.xs = std::move(xs);
  s.ratios.reserve(s.vs.size());
  for (double v : s.vs) s.ratios.push_back(d.ratio_curve(v, s.xs));
  finish_scan(s);
  return s;
}

inline RatioScan scan_empirical(const std::vector<double>& sample,
                                std::vector<double> vs,
                                std::vector<double> xs) {
  if (sample.empty()) fail("scan: sample must be nonempty");
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  auto count_above = [&sorted](double x) {
    return std::size_t(sorted.end() -
                       std::upper_bound(sorted.begin(), sorted.end(), x));
  };
  RatioScan s;
  s.vs = std::move(vs);
  s.xs = std::move(xs);
  bool thin = count_above(s.xs.back()) < kMinTailCount;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.ratios.assign(s.vs.size(), std::vector<double>(s.xs.size(), 0.0));
  for (std::size_t a = 0; a < s.vs.size(); ++a) {
    for (std::size_t b = 0; b < s.xs.size(); ++b) {
      const std::size_t den = count_above(s.xs[b]);
      const std::size_t num = count_above(s.vs[a] * s.xs[b]);
      if (den == 0) {
        s.ratios[a][b] = nan;
        thin = true;
      } else {
        s.ratios[a][b] = double(num) / double(den);
        if (num == 0) thin = true;
      }
    }
  }
  s.inconclusive = thin;
  finish_scan(s);
  return s;
}

/// Whether the per-v index estimates admit a bounded power envelope on the
/// scanned range (all finite and within kAlphaSpreadTol of each other).
inline void judge_envelope(RatioScan& s) {
  double lo = kInf, hi = -kInf;
  bool ok = true;
  for (std::size_t a = 0; a < s.vs.size(); ++a) {
    if (!(s.vs[a] > 1.0)) continue;
    const double alpha = s.alpha_by_v[a];
    if (!std::isfinite(alpha)) {
      ok = false;
      break;
    }
    lo = std::min(lo, alpha);
    hi = std::max(hi, alpha);
  }
  s.dominated_variation = ok && hi - lo <= kAlphaSpreadTol;
}

inline std::string judge_tai(const std::vector<double>& ratio, bool thin) {
  if (thin) return kVerdictInconclusive;
  bool persistent = true;
  for (double r : ratio) persistent = persistent && r >= kTaiPersistAbove;
  if (persistent) return kVerdictPersistent;
  bool decreasing = true;
  for (std::size_t t = 1; t < ratio.size(); ++t)
    decreasing = decreasing && ratio[t] <= ratio[t - 1] * kTaiMonotoneSlack;
  if (decreasing && ratio.back() < kTaiVanishBelow) return kVerdictVanishing;
  return kVerdictInconclusive;
}

/// Exact P[X_i > x, X_j > x | Theta_i = ti, Theta_j = tj].  Continuous
/// weights pin their latent uniforms; a discrete weight's atom averages
/// over its latent box under the weight-block pair copula.
inline double pair_conditional_exceedance(const JointModel& m, int i, int j,
                                          double x, double ti, double tj) {
  const double ui = m.loss(i).cdf(x);
  const double uj = m.loss(j).cdf(x);
  if (ui >= 1.0 || uj >= 1.0) return 0.0;
  auto surv = [&](double vi, double vj) {
    return m.x_pair_survival(i, j, m.tilt(i, ui, vi), m.tilt(j, uj, vj));
  };
  const Distribution& gi = m.weight(i);
  const Distribution& gj = m.weight(j);
  const bool di = gi.is_discrete();
  const bool dj = gj.is_discrete();
  if (!di && !dj) return surv(gi.cdf(ti), gj.cdf(tj));
  const Copula pair = m.theta_pair_copula(i, j);
  if (di && dj) {
    const double a1 = gi.cdf_left(ti), a2 = gi.cdf(ti);
    const double b1 = gj.cdf_left(tj), b2 = gj.cdf(tj);
    const double mass = pair.cdf(a2, b2) - pair.cdf(a1, b2) -
                        pair.cdf(a2, b1) + pair.cdf(a1, b1);
    auto f = [&](double vi, double vj) {
      return surv(vi, vj) * pair.density(vi, vj);
    };
    const QuadratureResult r =
        integrate_2d(f, {a1, a2}, {b1, b2}, 1e-13, 1e-9);
    return require_converged(r, "pair conditional exceedance") / mass;
  }
  // Mixed: the continuous coordinate pins its uniform; integrate over the
  // discrete coordinate's box.  The pin is nudged off exact 0/1, where the
  // conditional copula law can degenerate.
  const double vp_raw = di ? gj.cdf(tj) : gi.cdf(ti);
  const double vp = std::min(1.0 - 1e-12, std::max(1e-12, vp_raw));
  const Distribution& gb = di ? gi : gj;
  const double tb = di ? ti : tj;
  const double b1 = gb.cdf_left(tb), b2 = gb.cdf(tb);
  const double mass =
      pair.conditional_cdf(b2, vp) - pair.conditional_cdf(b1, vp);
  auto f = [&](double vb) {
    return (di ? surv(vb, vp_raw) : surv(vp_raw, vb)) * pair.density(vp, vb);
  };
  const QuadratureResult r = integrate(f, b1, b2, 1e-13, 1e-9);
  return require_converged(r, "pair conditional exceedance") / mass;
}

/// Evaluation grid over one weight's support: the atoms when discrete, a
/// quantile lattice with exact endpoints when continuous.  An unbounded
/// upper endpoint is probed at survival level 1e-9.
inline std::vector<double> weight_grid(const Distribution& g, int points) {
  if (g.is_discrete()) return g.atoms();
  if (points < 2)
    fail("uniformity residual: need at least two grid points");
  std::vector<double> out;
  out.reserve(std::size_t(points));
  const bool bounded = std::isfinite(g.upper_support());
  for (int t = 0; t < points; ++t) {
    if (t == 0)
      out.push_back(g.lower_support());
    else if (t == points - 1)
      out.push_back(bounded ? g.upper_support() : g.quantile(1.0 - 1e-9));
    else
      out.push_back(g.quantile(double(t) / double(points - 1)));
  }
  return out;
}

}  // namespace diag_detail

// ---- index estimation -------------------------------------------------------

/// Hill estimator: reciprocal mean log-excess of the k largest sample
/// values over the (k+1)-th largest.  Requires 30 <= k <= m/10 and a
/// positive threshold; flags estimates above kHillHeavyCeiling as not
/// looking heavy-tailed.
inline HillEstimate hill(const std::vector<double>& sample, std::size_t k) {
  const std::size_t m = sample.size();
  if (k < 30) diag_detail::fail("hill: k must be at least 30");
  if (k > m / 10)
    diag_detail::fail("hill: k must not exceed a tenth of the sample size");
  std::vector<double> top(sample);
  std::partial_sort(top.begin(), top.begin() + std::ptrdiff_t(k + 1),
                    top.end(), std::greater<>());
  const double threshold = top[k];
  if (!(threshold > 0.0))
    throw std::domain_error("hill: nonpositive values in the upper tail");
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) sum += std::log(top[t] / threshold);
  HillEstimate h;
  h.alpha = double(k) / sum;
  h.threshold = threshold;
  h.k = k;
  h.looks_heavy = h.alpha <= kHillHeavyCeiling;
  return h;
}

/// Default v grids: factors near 1 probe the limiting lower ratio, octave
/// factors probe the scaling-index pair.
inline std::vector<double> default_l_index_vs() { return {1.05, 1.1, 1.2}; }
inline std::vector<double> default_matuszewska_vs() { return {2.0, 4.0, 8.0}; }

/// Scaled-tail ratio scan tuned for the limiting lower ratio near v = 1,
/// exact mode.  Needs at least two v values above 1 for the extrapolation;
/// a v = 1 column is allowed and tabulates as exactly 1.
inline RatioScan l_index_scan(const Distribution& d, std::vector<double> vs,
                              std::vector<double> xs) {
  diag_detail::check_scan_grids(vs, xs);
  int above = 0;
  for (double v : vs) above += v > 1.0 ? 1 : 0;
  if (above < 2)
    diag_detail::fail("l-index scan: need at least two v values above 1");
  return diag_detail::scan_exact(d, std::move(vs), std::move(xs));
}

/// Empirical counterpart of l_index_scan over an iid sample.
inline RatioScan l_index_scan(const std::vector<double>& sample,
                              std::vector<double> vs, std::vector<double> xs) {
  diag_detail::check_scan_grids(vs, xs);
  int above = 0;
  for (double v : vs) above += v > 1.0 ? 1 : 0;
  if (above < 2)
    diag_detail::fail("l-index scan: need at least two v values above 1");
  return diag_detail::scan_empirical(sample, std::move(vs), std::move(xs));
}

/// Scaled-tail ratio scan tuned for the scaling-index pair, exact mode.
/// All v must be 2 or larger; the dominated_variation flag reports whether
/// the per-v estimates stay stable across the scanned range.
inline RatioScan matuszewska_scan(const Distribution& d,
                                  std::vector<double> vs,
                                  std::vector<double> xs) {
  diag_detail::check_scan_grids(vs, xs);
  if (vs.front() < 2.0)
    diag_detail::fail("matuszewska scan: v grid must start at 2 or above");
  RatioScan s = diag_detail::scan_exact(d, std::move(vs), std::move(xs));
  diag_detail::judge_envelope(s);
  return s;
}

/// Empirical counterpart of matuszewska_scan over an iid sample.
inline RatioScan matuszewska_scan(const std::vector<double>& sample,
                                  std::vector<double> vs,
                                  std::vector<double> xs) {
  diag_detail::check_scan_grids(vs, xs);
  if (vs.front() < 2.0)
    diag_detail::fail("matuszewska scan: v grid must start at 2 or above");
  RatioScan s =
      diag_detail::scan_empirical(sample, std::move(vs), std::move(xs));
  diag_detail::judge_envelope(s);
  return s;
}

// ---- pairwise tail dependence -------------------------------------------------

/// Exact pairwise tail-dependence curve for loss coordinates (i, j) of a
/// joint model.  The numerator takes |X_i|: its left-cross part is exact
/// and identically zero whenever coordinate i cannot fall below -x.
inline DependenceCurve tai_curve(const JointModel& m, int i, int j,
                                 std::vector<double> xs) {
  if (i < 0 || j < 0 || i >= m.dimension() || j >= m.dimension())
    diag_detail::fail("tai curve: coordinate pair out of range");
  if (i == j) diag_detail::fail("tai curve: coordinates must differ");
  diag_detail::check_x_grid(xs, "tai curve");
  DependenceCurve c;
  c.xs = std::move(xs);
  for (double x : c.xs) {
    const double up = m.loss_pair_exceedance(i, j, x, x);
    double lc = 0.0;
    if (m.loss(i).lower_support() < 0.0) {
      // P[X_i < -x, X_j > x] = P[X_j > x] - P[X_i > -x, X_j > x]; losses
      // with atoms are nonnegative by construction, so -x carries no mass.
      lc = std::max(0.0, m.loss(j).sf(x) -
                             m.loss_pair_exceedance(i, j, -x, x));
    }
    const double den = m.loss(i).sf(x) + m.loss(j).sf(x);
    if (!(den > 0.0))
      throw std::domain_error(
          "tai curve: marginal survival vanishes at grid point x=" +
          std::to_string(x));
    c.joint_exceedance.push_back(up);
    c.left_cross.push_back(lc);
    c.marginal_sum.push_back(den);
    c.ratio.push_back((up + lc) / den);
  }
  c.verdict = diag_detail::judge_tai(c.ratio, false);
  return c;
}

inline DependenceCurve tai_curve(const Scenario& s, int i, int j,
                                 std::vector<double> xs) {
  return tai_curve(s.joint(), i, j, std::move(xs));
}

/// Empirical pairwise tail-dependence curve from paired samples.  The scan
/// is inconclusive when the summed marginal exceedance count at the deepest
/// x falls below kMinTailCount (or vanishes anywhere on the grid).
inline DependenceCurve tai_curve(const std::vector<double>& xi,
                                 const std::vector<double>& xj,
                                 std::vector<double> xs) {
  if (xi.empty() || xi.size() != xj.size())
    diag_detail::fail(
        "tai curve: paired samples must have equal nonzero length");
  diag_detail::check_x_grid(xs, "tai curve");
  DependenceCurve c;
  c.xs = std::move(xs);
  const double m = double(xi.size());
  bool thin = false;
  for (double x : c.xs) {
    std::size_t ci = 0, cj = 0, cup = 0, clc = 0;
    for (std::size_t t = 0; t < xi.size(); ++t) {
      const bool hi = xi[t] > x;
      const bool hj = xj[t] > x;
      ci += hi ? 1 : 0;
      cj += hj ? 1 : 0;
      cup += hi && hj ? 1 : 0;
      clc += xi[t] < -x && hj ? 1 : 0;
    }
    c.joint_exceedance.push_back(double(cup) / m);
    c.left_cross.push_back(double(clc) / m);
    c.marginal_sum.push_back(double(ci + cj) / m);
    if (ci + cj == 0) {
      thin = true;
      c.ratio.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      c.ratio.push_back(double(cup + clc) / double(ci + cj));
    }
  }
  std::size_t deepest = 0;
  for (std::size_t t = 0; t < xi.size(); ++t) {
    deepest += xi[t] > c.xs.back() ? 1 : 0;
    deepest += xj[t] > c.xs.back() ? 1 : 0;
  }
  thin = thin || deepest < kMinTailCount;
  c.verdict = diag_detail::judge_tai(c.ratio, thin);
  return c;
}

// ---- uniformity residuals -----------------------------------------------------

/// Sup over the weight support of |P[X_i > x | Theta_i = t] /
/// (h_i(t) P[X_i > x]) - 1|: how far the finite-level conditional tail
/// sits from its limiting tilt at the probe threshold.
inline double weight_link_residual(const JointModel& m, int i, double x,
                                   int grid_points = 129) {
  if (i < 0 || i >= m.dimension())
    diag_detail::fail("uniformity residual: coordinate index out of range");
  const double tail = m.loss(i).sf(x);
  if (!(tail > 0.0))
    throw std::domain_error(
        "uniformity residual: loss survival vanishes at the probe point");
  double worst = 0.0;
  for (double t : diag_detail::weight_grid(m.weight(i), grid_points)) {
    const double cond = m.conditional_sf_given_weight(i, x, t);
    const double lim = m.h_limit(i, t) * tail;
    worst = std::max(worst, std::fabs(cond / lim - 1.0));
  }
  return worst;
}

/// Sup over the weight-support lattice of |P[X_i > x, X_j > x | Theta_i,
/// Theta_j] / (g_ij P[X_i > x, X_j > x]) - 1| at the probe threshold.
/// Requires a loss block that admits the limiting pair function.
inline double pair_link_residual(const JointModel& m, int i, int j, double x,
                                 int grid_points = 17) {
  if (i < 0 || j < 0 || i >= m.dimension() || j >= m.dimension())
    diag_detail::fail("uniformity residual: coordinate pair out of range");
  if (i == j)
    diag_detail::fail("uniformity residual: coordinates must differ");
  const double unc = m.loss_pair_exceedance(i, j, x, x);
  if (!(unc > 0.0))
    throw std::domain_error(
        "uniformity residual: joint survival vanishes at the probe point");
  double worst = 0.0;
  for (double ti : diag_detail::weight_grid(m.weight(i), grid_points)) {
    for (double tj : diag_detail::weight_grid(m.weight(j), grid_points)) {
      const double cond =
          diag_detail::pair_conditional_exceedance(m, i, j, x, ti, tj);
      const double lim = m.g_limit(i, j, ti, tj) * unc;
      worst = std::max(worst, std::fabs(cond / lim - 1.0));
    }
  }
  return worst;
}

}  // namespace wtail
