#include "crib/core/scalar_optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "crib/core/errors.hpp"

namespace crib {

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tolerance) {
  ScalarOptimum out;
  if (hi < lo) std::swap(lo, hi);
  if (hi - lo <= x_tolerance) {
    const double x = (hi == lo) ? lo : 0.5 * (lo + hi);
    out.argmax = x;
    out.value = f(x);
    out.evaluations = 1;
    return out;
  }
  const double inv_phi = 1.0 / std::numbers::phi;
  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = f(c), fd = f(d);
  std::size_t evals = 2;
  while (b - a > x_tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
    ++evals;
  }
  if (fc >= fd) {
    out.argmax = c;
    out.value = fc;
  } else {
    out.argmax = d;
    out.value = fd;
  }
  out.evaluations = evals;
  return out;
}

namespace {

// Number of strict interior local maxima plus maxima at the ends.
std::size_t count_peaks(const std::vector<double>& y) {
  std::size_t peaks = 0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || y[i] > y[i - 1];
    const bool right_ok = (i + 1 == n) || y[i] >= y[i + 1];
    if (left_ok && right_ok) ++peaks;
  }
  return peaks;
}

}  // namespace

ScalarOptimum maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              const MaximizeOptions& options) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("maximize_scalar: non-finite range");
  if (hi < lo) throw ConfigError("maximize_scalar: range is reversed");
  if (hi == lo) {
    ScalarOptimum out;
    out.argmax = out.scan_argmax = lo;
    out.value = out.scan_value = f(lo);
    out.evaluations = 1;
    return out;
  }

  auto scan = [&](std::size_t n) {
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      ys[i] = f(xs[i]);
    }
    return std::pair{xs, ys};
  };

  auto [xs, ys] = scan(std::max<std::size_t>(options.probe_points, 3));
  std::size_t evals = xs.size();
  bool fallback = false;
  if (count_peaks(ys) > 1) {
    fallback = true;
    std::tie(xs, ys) = scan(std::max<std::size_t>(options.dense_points, 3));
    evals += xs.size();
  }
  const auto best = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];

  ScalarOptimum refined = golden_section_maximize(f, a, b, options.x_tolerance);
  ScalarOptimum out = refined;
  if (ys[best] > refined.value) {
    out.argmax = xs[best];
    out.value = ys[best];
  }
  out.evaluations = evals + refined.evaluations;
  out.fallback_scan = fallback;
  out.scan_argmax = xs[best];
  out.scan_value = ys[best];
  return out;
}

}  // namespace crib
