#pragma once
// Monte Carlo estimation of the tail functionals the closed forms predict:
// sum / partial-maximum / max-summand exceedance, generalized moments,
// expected shortfall and its marginal decomposition, finite-horizon ruin, and
// randomly stopped sums.  Every estimator draws through the chunk-splittable
// streams of rng.hpp and reduces per-chunk partial accumulators in chunk
// order, so results are bit-identical for a fixed seed regardless of the
// worker count.
//
// Stream discipline: estimators over a fixed number of summands consume
// exactly 2 n uniforms per replicate (one joint draw), so any two of them run
// on the same scenario, seed, and replicate count see the *same* paths and
// pathwise identities between them hold bit-exactly.  Randomly stopped
// estimators consume 2 n + 1 uniforms per replicate (the joint draw plus the
// stopping variable), which places them on a different stream; identities
// linking them to fixed-n estimators hold in distribution, not bitwise.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wtail/asymptotics.hpp"
#include "wtail/dependence.hpp"
#include "wtail/model.hpp"
#include "wtail/rng.hpp"

namespace wtail {

/// One Monte Carlo answer: a point estimate with its standard error, the
/// 95% central-limit interval (always point +/- 1.96 stderr, degenerate when
/// the standard error is zero), and the provenance needed to reproduce it.
struct TailEstimate {
  double estimate = 0.0;
  double stderror = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string method = "crude";  // "crude" or "conditional"
  bool zero_hits = false;        // no replicate contributed to the event
  bool widened_ci = false;       // too few exceedances for a trusty interval
  bool fallback_crude = false;   // conditional request served crudely

  /// Active flags as stable strings, for reports.
  std::vector<std::string> flags() const {
    std::vector<std::string> out;
    if (zero_hits) out.push_back("zero-hits");
    if (widened_ci) out.push_back("widened-ci");
    if (fallback_crude) out.push_back("fallback-crude");
    return out;
  }
};

/// The three tail functionals estimated from common paths.
struct TailTriple {
  TailEstimate sum;          // P[S > x]
  TailEstimate partial_max;  // P[max_k S_k > x]
  TailEstimate max_summand;  // P[max_i Theta_i X_i > x]
};

/// Pathwise summary of one joint draw: the weighted summands and their
/// prefix sums / prefix maxima, the raw material of every estimator here.
struct SumDrawKit {
  int n = 0;
  std::array<double, kMaxDimension> summand{};      // Theta_i X_i
  std::array<double, kMaxDimension> prefix_sum{};   // S_k over i <= k
  std::array<double, kMaxDimension> prefix_max{};   // max_{j <= k} S_j
  std::array<double, kMaxDimension> summand_max{};  // max_{i <= k} summand_i

  static SumDrawKit from(const Replicate& rep, int n) {
    SumDrawKit kit;
    kit.n = n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t k = std::size_t(i);
      const double z = rep.theta[k] * rep.x[k];
      kit.summand[k] = z;
      s += z;
      kit.prefix_sum[k] = s;
      kit.prefix_max[k] = (i == 0) ? s : std::max(kit.prefix_max[k - 1], s);
      kit.summand_max[k] = (i == 0) ? z : std::max(kit.summand_max[k - 1], z);
    }
    return kit;
  }

  double total() const { return prefix_sum[std::size_t(n - 1)]; }
  double max_prefix_sum() const { return prefix_max[std::size_t(n - 1)]; }
  double max_summand() const { return summand_max[std::size_t(n - 1)]; }
};

namespace sim_detail {

inline void require_mc_args(std::size_t m, int workers) {
  if (m < 10000)
    throw std::invalid_argument(
        "monte carlo: m must be at least 10000 replicates");
  if (workers < 1)
    throw std::invalid_argument("monte carlo: workers must be >= 1");
}

/// Run `body(acc, rep, rng)` once per replicate, chunk by chunk, on up to
/// `workers` threads.  Each chunk owns its generator and its accumulator;
/// the returned partials are indexed by chunk and must be reduced in chunk
/// order for bit-stable results.
template <class Acc, class Body>
std::vector<Acc> run_chunks(const JointModel& joint, std::size_t m,
                            std::uint64_t seed, int workers,
                            const Body& body) {
  const std::uint64_t chunks = chunk_count(m);
  std::vector<Acc> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  auto drain = [&]() {
    Replicate rep;
    for (std::uint64_t c = next.fetch_add(1); c < chunks;
         c = next.fetch_add(1)) {
      Xoshiro256pp rng = chunk_rng(seed, c);
      const std::size_t lo = std::size_t(c * kChunkSize);
      const std::size_t hi =
          std::min<std::size_t>(m, std::size_t((c + 1) * kChunkSize));
      Acc acc;
      for (std::size_t k = lo; k < hi; ++k) {
        joint.sample_replicate(rng, rep);
        body(acc, rep, rng);
      }
      partial[c] = acc;
    }
  };
  const int nthreads =
      int(std::min<std::uint64_t>(std::uint64_t(workers), chunks));
  if (nthreads <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  return partial;
}

/// Binomial finalization of an exceedance count.
inline TailEstimate binomial_estimate(std::uint64_t hits, std::size_t m,
                                      std::uint64_t seed) {
  TailEstimate e;
  e.m = m;
  e.seed = seed;
  const double p = double(hits) / double(m);
  e.estimate = p;
  e.stderror = std::sqrt(p * (1.0 - p) / double(m));
  e.zero_hits = (hits == 0);
  e.ci_lo = e.estimate - 1.96 * e.stderror;
  e.ci_hi = e.estimate + 1.96 * e.stderror;
  return e;
}

/// Mean/variance finalization of an accumulated per-replicate statistic.
/// `probability` clamps the point into [0, 1] (an unbiased conditional
/// estimator can average slightly above 1 at shallow thresholds).
inline TailEstimate moment_estimate(double sum, double sumsq,
                                    std::uint64_t nonzero, std::size_t m,
                                    std::uint64_t seed, bool probability) {
  TailEstimate e;
  e.m = m;
  e.seed = seed;
  const double mean = sum / double(m);
  const double var = std::max(0.0, sumsq / double(m) - mean * mean);
  e.estimate = probability ? std::min(1.0, std::max(0.0, mean)) : mean;
  e.stderror = std::sqrt(var / double(m));
  e.zero_hits = (nonzero == 0);
  e.ci_lo = e.estimate - 1.96 * e.stderror;
  e.ci_hi = e.estimate + 1.96 * e.stderror;
  return e;
}

/// Delta-method finalization of the ratio E[numerator] / P[event] from the
/// joint accumulators of one run: `hits` exceedances, `sy` and `syy` the
/// first two moments of the numerator summed over all m replicates.
inline TailEstimate ratio_estimate(std::uint64_t hits, double sy, double syy,
                                   std::size_t m, std::uint64_t seed) {
  TailEstimate e;
  e.m = m;
  e.seed = seed;
  e.widened_ci = (hits < 100);
  if (hits == 0) {
    e.zero_hits = true;
    return e;
  }
  const double md = double(m);
  const double xbar = double(hits) / md;
  const double ybar = sy / md;
  const double ratio = sy / double(hits);
  // With the indicator X in {0,1} and numerator Y supported on {X = 1},
  // E[XY] = E[Y], so Cov(X, Y) = ybar (1 - xbar).
  const double var_y = std::max(0.0, syy / md - ybar * ybar);
  const double var_x = xbar * (1.0 - xbar);
  const double cov = ybar * (1.0 - xbar);
  const double var_ratio =
      (var_y - 2.0 * ratio * cov + ratio * ratio * var_x) /
      (md * xbar * xbar);
  e.estimate = ratio;
  e.stderror = std::sqrt(std::max(0.0, var_ratio));
  e.ci_lo = e.estimate - 1.96 * e.stderror;
  e.ci_hi = e.estimate + 1.96 * e.stderror;
  return e;
}

struct TripleHitsAcc {
  std::uint64_t sum = 0;
  std::uint64_t prefix_max = 0;
  std::uint64_t summand_max = 0;
};

struct MomentAcc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::uint64_t nonzero = 0;
};

struct RatioAcc {
  std::uint64_t hits = 0;
  double sy = 0.0;
  double syy = 0.0;
};

struct HitsAcc {
  std::uint64_t hits = 0;
};

/// A coordinate whose weighted summand carries point masses above zero:
/// a discrete weight against a loss with atoms.  Two such coordinates can
/// tie at the maximum with positive probability, which breaks the
/// max-term decomposition the conditional estimator rests on.
inline bool atomic_summand(const Scenario& s, int i) {
  const bool loss_atoms = s.loss(i).is_discrete() ||
                          s.loss(i).family() == Family::kPerturbedPareto;
  return s.weight(i).is_discrete() && loss_atoms;
}

}  // namespace sim_detail

/// Crude estimates of the three tail functionals from common joint draws.
/// The final sum never exceeds the max prefix sum pathwise, so the sum
/// estimate never exceeds the partial-max estimate; with nonnegative
/// summands the max summand is dominated the same way.
inline TailTriple tails_all_mc(const Scenario& s, double x, std::size_t m,
                               std::uint64_t seed, int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  const int n = s.dimension();
  auto body = [&](sim_detail::TripleHitsAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    if (kit.total() > x) ++acc.sum;
    if (kit.max_prefix_sum() > x) ++acc.prefix_max;
    if (kit.max_summand() > x) ++acc.summand_max;
  };
  const auto partial = sim_detail::run_chunks<sim_detail::TripleHitsAcc>(
      s.joint(), m, seed, workers, body);
  sim_detail::TripleHitsAcc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.prefix_max += a.prefix_max;
    total.summand_max += a.summand_max;
  }
  TailTriple out;
  out.sum = sim_detail::binomial_estimate(total.sum, m, seed);
  out.partial_max = sim_detail::binomial_estimate(total.prefix_max, m, seed);
  out.max_summand = sim_detail::binomial_estimate(total.summand_max, m, seed);
  return out;
}

/// Variance-reduced estimate of P[S > x] by the max-term decomposition:
/// each replicate contributes sum_i P[Z_i > max(M_{-i}, x - S_{-i}) | rest],
/// the closed conditional survival given every latent coordinate except the
/// loss uniform of i.  Unbiased whenever the maximal summand is almost
/// surely unique, which fails only when two coordinates both carry summand
/// atoms; such scenarios (and only such) fall back to the crude estimator
/// with the fallback flag set.
inline TailEstimate tail_sum_condmc(const Scenario& s, double x,
                                    std::size_t m, std::uint64_t seed,
                                    int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  if (!(x > 0.0))
    throw std::invalid_argument(
        "conditional tail estimation requires a threshold x > 0");
  const int n = s.dimension();

  int atomic = 0;
  for (int i = 0; i < n; ++i)
    if (sim_detail::atomic_summand(s, i)) ++atomic;
  if (atomic >= 2) {
    TailEstimate e = tails_all_mc(s, x, m, seed, workers).sum;
    e.fallback_crude = true;
    return e;
  }

  const JointModel& joint = s.joint();
  auto body = [&](sim_detail::MomentAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    const double total = kit.total();
    double y = 0.0;
    for (int i = 0; i < n; ++i) {
      const double zi = kit.summand[std::size_t(i)];
      double other_max = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (j != i)
          other_max = std::max(other_max, kit.summand[std::size_t(j)]);
      const double threshold = std::max(other_max, x - (total - zi));
      y += joint.conditional_product_sf(i, threshold, rep, n);
    }
    acc.sum += y;
    acc.sumsq += y * y;
    if (y > 0.0) ++acc.nonzero;
  };
  const auto partial = sim_detail::run_chunks<sim_detail::MomentAcc>(
      joint, m, seed, workers, body);
  sim_detail::MomentAcc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.sumsq += a.sumsq;
    total.nonzero += a.nonzero;
  }
  TailEstimate e = sim_detail::moment_estimate(total.sum, total.sumsq,
                                               total.nonzero, m, seed, true);
  e.method = "conditional";
  return e;
}

/// Variance-reduced estimates of all three tail functionals from common
/// draws.  The sum and max-summand tails use the max-term decomposition of
/// tail_sum_condmc (thresholds x - S_{-i} and x respectively) and inherit
/// its uniqueness caveat; the running-maximum tail decomposes by the first
/// passage index — replicate i contributes P[Z_i > x - S_{i-1} | rest] when
/// no earlier prefix already cleared x — which stays unbiased even with
/// tied summand atoms because first-passage events are disjoint by
/// construction.  When two coordinates carry summand atoms the sum and
/// max-summand components fall back to crude counting (flagged) while the
/// running maximum stays conditional.
inline TailTriple tails_all_condmc(const Scenario& s, double x, std::size_t m,
                                   std::uint64_t seed, int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  if (!(x > 0.0))
    throw std::invalid_argument(
        "conditional tail estimation requires a threshold x > 0");
  const int n = s.dimension();

  int atomic = 0;
  for (int i = 0; i < n; ++i)
    if (sim_detail::atomic_summand(s, i)) ++atomic;
  const bool decomposed = atomic < 2;

  struct Acc {
    double sum = 0.0, sumsq = 0.0;
    double pmax = 0.0, pmaxsq = 0.0;
    double msum = 0.0, msumsq = 0.0;
    std::uint64_t sum_nonzero = 0, pmax_nonzero = 0, msum_nonzero = 0;
  };
  const JointModel& joint = s.joint();
  auto body = [&](Acc& acc, const Replicate& rep, Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    const double total = kit.total();
    double ys = 0.0, yp = 0.0, ym = 0.0;
    for (int i = 0; i < n; ++i) {
      if (decomposed) {
        const double zi = kit.summand[std::size_t(i)];
        double other_max = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
          if (j != i)
            other_max = std::max(other_max, kit.summand[std::size_t(j)]);
        ys += joint.conditional_product_sf(
            i, std::max(other_max, x - (total - zi)), rep, n);
        ym += joint.conditional_product_sf(i, std::max(other_max, x), rep, n);
      }
      const double prev_sum = i > 0 ? kit.prefix_sum[std::size_t(i - 1)] : 0.0;
      const double prev_max =
          i > 0 ? kit.prefix_max[std::size_t(i - 1)]
                : -std::numeric_limits<double>::infinity();
      // S_{i-1} <= prev_max <= x keeps the passage threshold nonnegative.
      if (prev_max <= x)
        yp += joint.conditional_product_sf(i, x - prev_sum, rep, n);
    }
    acc.sum += ys;
    acc.sumsq += ys * ys;
    acc.pmax += yp;
    acc.pmaxsq += yp * yp;
    acc.msum += ym;
    acc.msumsq += ym * ym;
    if (ys > 0.0) ++acc.sum_nonzero;
    if (yp > 0.0) ++acc.pmax_nonzero;
    if (ym > 0.0) ++acc.msum_nonzero;
  };
  const auto partial = sim_detail::run_chunks<Acc>(joint, m, seed, workers,
                                                   body);
  Acc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.sumsq += a.sumsq;
    total.pmax += a.pmax;
    total.pmaxsq += a.pmaxsq;
    total.msum += a.msum;
    total.msumsq += a.msumsq;
    total.sum_nonzero += a.sum_nonzero;
    total.pmax_nonzero += a.pmax_nonzero;
    total.msum_nonzero += a.msum_nonzero;
  }
  TailTriple out;
  out.partial_max = sim_detail::moment_estimate(
      total.pmax, total.pmaxsq, total.pmax_nonzero, m, seed, true);
  out.partial_max.method = "conditional";
  if (decomposed) {
    out.sum = sim_detail::moment_estimate(total.sum, total.sumsq,
                                          total.sum_nonzero, m, seed, true);
    out.max_summand = sim_detail::moment_estimate(
        total.msum, total.msumsq, total.msum_nonzero, m, seed, true);
    out.sum.method = out.max_summand.method = "conditional";
  } else {
    const TailTriple crude = tails_all_mc(s, x, m, seed, workers);
    out.sum = crude.sum;
    out.max_summand = crude.max_summand;
    out.sum.fallback_crude = out.max_summand.fallback_crude = true;
  }
  return out;
}

/// Crude estimate of E[phi(S) 1{S > x}].  With phi identically one the
/// accumulator counts exactly the sum exceedances, so the point estimate
/// reproduces the tails_all_mc sum estimate bit for bit on a common seed.
inline TailEstimate genmoment_mc(const Scenario& s, const PhiSpec& phi,
                                 double x, std::size_t m, std::uint64_t seed,
                                 int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  for (int i = 0; i < s.dimension(); ++i) require_phi_integrable(s, i, phi);
  const int n = s.dimension();
  auto body = [&](sim_detail::MomentAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    if (kit.total() > x) {
      const double t = phi(kit.total());
      acc.sum += t;
      acc.sumsq += t * t;
      ++acc.nonzero;
    }
  };
  const auto partial = sim_detail::run_chunks<sim_detail::MomentAcc>(
      s.joint(), m, seed, workers, body);
  sim_detail::MomentAcc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.sumsq += a.sumsq;
    total.nonzero += a.nonzero;
  }
  return sim_detail::moment_estimate(total.sum, total.sumsq, total.nonzero,
                                     m, seed, false);
}

/// Crude ratio estimate of the expected shortfall E[S | S > x], with the
/// delta-method standard error of a ratio of correlated means.  Fewer than
/// 100 realized exceedances set the widened-interval flag.
inline TailEstimate es_mc(const Scenario& s, double x, std::size_t m,
                          std::uint64_t seed, int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  const int n = s.dimension();
  auto body = [&](sim_detail::RatioAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    const double total = kit.total();
    if (total > x) {
      ++acc.hits;
      acc.sy += total;
      acc.syy += total * total;
    }
  };
  const auto partial = sim_detail::run_chunks<sim_detail::RatioAcc>(
      s.joint(), m, seed, workers, body);
  sim_detail::RatioAcc total;
  for (const auto& a : partial) {
    total.hits += a.hits;
    total.sy += a.sy;
    total.syy += a.syy;
  }
  return sim_detail::ratio_estimate(total.hits, total.sy, total.syy, m, seed);
}

/// Crude ratio estimate of the marginal expected shortfall
/// E[Theta_j X_j | S > x] from the same kind of draws as es_mc; summed over
/// j the estimates reassemble the expected shortfall up to rounding.
inline TailEstimate mes_mc(const Scenario& s, int j, double x, std::size_t m,
                           std::uint64_t seed, int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  if (j < 0 || j >= s.dimension())
    throw std::invalid_argument("mes: coordinate index out of range");
  const int n = s.dimension();
  auto body = [&](sim_detail::RatioAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    if (kit.total() > x) {
      const double y = kit.summand[std::size_t(j)];
      ++acc.hits;
      acc.sy += y;
      acc.syy += y * y;
    }
  };
  const auto partial = sim_detail::run_chunks<sim_detail::RatioAcc>(
      s.joint(), m, seed, workers, body);
  sim_detail::RatioAcc total;
  for (const auto& a : partial) {
    total.hits += a.hits;
    total.sy += a.sy;
    total.syy += a.syy;
  }
  return sim_detail::ratio_estimate(total.hits, total.sy, total.syy, m, seed);
}

/// Crude estimate of the finite-horizon ruin probability
/// P[max_{k <= horizon} S_k > x].  At horizon = n this is the partial-max
/// tail of tails_all_mc, bit for bit on a common seed.
inline TailEstimate ruin_finite_mc(const Scenario& s, double x, int horizon,
                                   std::size_t m, std::uint64_t seed,
                                   int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  if (horizon < 1 || horizon > s.dimension())
    throw std::invalid_argument(
        "ruin horizon must lie between 1 and the scenario dimension");
  const int n = s.dimension();
  auto body = [&](sim_detail::HitsAcc& acc, const Replicate& rep,
                  Xoshiro256pp&) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    if (kit.prefix_max[std::size_t(horizon - 1)] > x) ++acc.hits;
  };
  const auto partial = sim_detail::run_chunks<sim_detail::HitsAcc>(
      s.joint(), m, seed, workers, body);
  std::uint64_t hits = 0;
  for (const auto& a : partial) hits += a.hits;
  return sim_detail::binomial_estimate(hits, m, seed);
}

/// Crude estimates of the randomly stopped tails: the stopped sum S_N, the
/// stopped running maximum max_{k <= N} S_k, and the stopped largest summand
/// max_{i <= N} Theta_i X_i, all three from common draws.  Each replicate
/// consumes one extra uniform for N (drawn after the joint row, by inversion
/// of the stopping pmf); N = 0 contributes zero to all three statistics.
inline TailTriple stopped_tails_mc(const Scenario& s, double x, std::size_t m,
                                   std::uint64_t seed, int workers = 1) {
  sim_detail::require_mc_args(m, workers);
  if (!s.has_stopping())
    throw std::invalid_argument(
        "stopped sums need a stopping law in the scenario");
  const StoppingLaw& law = s.stopping();
  const int top = law.max_n();
  std::vector<double> cum(std::size_t(top) + 1, 0.0);
  double run = 0.0;
  for (int k = 0; k <= top; ++k) {
    run += law.pmf(k);
    cum[std::size_t(k)] = run;
  }
  const int n = s.dimension();
  auto body = [&](sim_detail::TripleHitsAcc& acc, const Replicate& rep,
                  Xoshiro256pp& rng) {
    const SumDrawKit kit = SumDrawKit::from(rep, n);
    const double u = rng.next_uniform();
    int stop = 0;
    while (stop < top && u > cum[std::size_t(stop)]) ++stop;
    const std::size_t k = std::size_t(stop - 1);
    const double stopped_sum = stop > 0 ? kit.prefix_sum[k] : 0.0;
    const double stopped_max = stop > 0 ? kit.prefix_max[k] : 0.0;
    const double stopped_summand = stop > 0 ? kit.summand_max[k] : 0.0;
    if (stopped_sum > x) ++acc.sum;
    if (stopped_max > x) ++acc.prefix_max;
    if (stopped_summand > x) ++acc.summand_max;
  };
  const auto partial = sim_detail::run_chunks<sim_detail::TripleHitsAcc>(
      s.joint(), m, seed, workers, body);
  sim_detail::TripleHitsAcc total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.prefix_max += a.prefix_max;
    total.summand_max += a.summand_max;
  }
  TailTriple out;
  out.sum = sim_detail::binomial_estimate(total.sum, m, seed);
  out.partial_max = sim_detail::binomial_estimate(total.prefix_max, m, seed);
  out.max_summand = sim_detail::binomial_estimate(total.summand_max, m, seed);
  return out;
}

}  // namespace wtail
