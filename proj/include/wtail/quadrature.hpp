#pragma once
// Adaptive numerical integration built on the Gauss-Kronrod 7-15 pair.
//
// The rule evaluates 15 interior nodes per interval; the embedded 7-point
// Gauss value supplies the error estimate.  Adaptivity is global: the
// interval with the largest error estimate is bisected until the summed
// error meets max(abs_tol, rel_tol * |integral|) or the evaluation budget is
// exhausted.  Nodes never touch interval endpoints, so integrable endpoint
// singularities (e.g. (1-u)^(-s), s < 1) converge, just more slowly.
//
// Integrands with known kinks or jumps must be pre-split at the break
// points; `integrate_segments` takes care of that.  Semi-infinite ranges go
// through the rational substitution x = a + t/(1-t).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wtail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;       // estimated absolute error
  bool converged = false;
  long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half; the rule
// is symmetric).  Even-indexed abscissae are the Kronrod extensions,
// odd-indexed ones are the embedded Gauss-7 nodes.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& kronrod,
                 double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk = 0.0;  // Kronrod accumulation
  double fg = 0.0;  // Gauss accumulation
  for (int i = 0; i < 8; ++i) {
    const double x = h * kGK15Nodes[i];
    double v;
    if (i == 7) {
      v = f(c);
    } else {
      v = f(c - x) + f(c + x);
    }
    fk += kGK15Weights[i] * v;
    if (i % 2 == 1) fg += kG7Weights[i / 2] * v;
  }
  kronrod = fk * h;
  const double gauss = fg * h;
  // Standard QUADPACK-style scaled error estimate.
  const double diff = std::fabs(kronrod - gauss);
  err = diff;
  const double resasc = std::fabs(kronrod);
  if (resasc > 0.0 && diff > 0.0) {
    const double scaled = std::pow(200.0 * diff / (resasc + diff), 1.5) *
                          (resasc + diff) / 200.0;
    err = std::min(diff, scaled);
  }
}

struct Interval {
  double a, b, value, error;
};

}  // namespace detail

/// Adaptively integrate `f` over the finite segments given by consecutive
/// entries of `points` (which must be sorted).  `points` with two entries is
/// the plain single-interval case.
template <class F>
QuadratureResult integrate_segments(F&& f, const std::vector<double>& points,
                                    double abs_tol = 1e-12,
                                    double rel_tol = 1e-9,
                                    long max_evaluations = 200000) {
  QuadratureResult out;
  std::vector<detail::Interval> heap;
  heap.reserve(64);
  auto by_error = [](const detail::Interval& x, const detail::Interval& y) {
    return x.error < y.error;
  };
  for (std::size_t s = 0; s + 1 < points.size(); ++s) {
    const double a = points[s], b = points[s + 1];
    if (!(b > a)) continue;  // collapsed or inverted segment: no mass
    detail::Interval iv{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, iv.value, iv.error);
    out.evaluations += 15;
    heap.push_back(iv);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  if (heap.empty()) {
    out.converged = true;
    return out;
  }
  auto totals = [&heap](double& v, double& e) {
    v = 0.0;
    e = 0.0;
    for (const auto& iv : heap) {
      v += iv.value;
      e += iv.error;
    }
  };
  double value, error;
  totals(value, error);
  while (error > std::max(abs_tol, rel_tol * std::fabs(value)) &&
         out.evaluations + 30 <= max_evaluations) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    detail::Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Interval at floating-point resolution: cannot be refined further.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    detail::Interval left{worst.a, mid, 0.0, 0.0};
    detail::Interval right{mid, worst.b, 0.0, 0.0};
    detail::gk15(f, left.a, left.b, left.value, left.error);
    detail::gk15(f, right.a, right.b, right.value, right.error);
    out.evaluations += 30;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    totals(value, error);
  }
  totals(value, error);
  out.value = value;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::fabs(value));
  return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                           double rel_tol = 1e-9,
                           long max_evaluations = 200000) {
  return integrate_segments(std::forward<F>(f), std::vector<double>{a, b},
                            abs_tol, rel_tol, max_evaluations);
}

/// Integrate over [a, inf) via x = a + t/(1-t); `inner_points` are optional
/// additional break points in x-space (values <= a are ignored).
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a,
                                       std::vector<double> inner_points = {},
                                       double abs_tol = 1e-12,
                                       double rel_tol = 1e-9,
                                       long max_evaluations = 400000) {
  std::vector<double> ts{0.0};
  std::sort(inner_points.begin(), inner_points.end());
  for (double x : inner_points) {
    if (x > a && std::isfinite(x)) {
      const double t = (x - a) / (1.0 + (x - a));
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  }
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  auto g = [&f, a](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    return f(x) / (om * om);
  };
  return integrate_segments(g, ts, abs_tol, rel_tol, max_evaluations);
}

/// Two-dimensional tensor integration: adaptive outer integral over x whose
/// integrand is an adaptive inner integral over y.  `x_points` / `y_points`
/// are sorted break-point lists covering the rectangle.
template <class F>
QuadratureResult integrate_2d(F&& f, const std::vector<double>& x_points,
                              const std::vector<double>& y_points,
                              double abs_tol = 1e-12, double rel_tol = 1e-9,
                              long max_evaluations = 2000000) {
  long inner_evaluations = 0;
  bool inner_ok = true;
  auto outer = [&](double x) {
    QuadratureResult r =
        integrate_segments([&f, x](double y) { return f(x, y); }, y_points,
                           abs_tol * 0.1, rel_tol * 0.1, max_evaluations);
    inner_evaluations += r.evaluations;
    inner_ok = inner_ok && r.converged;
    return r.value;
  };
  QuadratureResult out = integrate_segments(outer, x_points, abs_tol, rel_tol,
                                            max_evaluations);
  out.evaluations += inner_evaluations;
  out.converged = out.converged && inner_ok;
  return out;
}

/// Throw if a quadrature used by an exact operation failed to converge.
inline double require_converged(const QuadratureResult& r,
                                const std::string& operation) {
  if (!r.converged)
    throw std::runtime_error(operation +
                             ": quadrature did not converge (error estimate " +
                             std::to_string(r.error) + ")");
  return r.value;
}

}  // namespace wtail
