#include "crib/transfer/dop853.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "crib/core/errors.hpp"
#include "dop853_tableau.hpp"

namespace crib {

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

double rms_scaled(std::span<const Complex> v, std::span<const double> scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = std::abs(v[i]) / scale[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(std::max<std::size_t>(v.size(), 1)));
}

[[noreturn]] void fail(const char* what, double t) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "integrator: " << what << " at t = " << t;
  throw NumericalError(msg.str());
}

}  // namespace

void integrate_dop853(const OdeRhs& rhs, double t0, double t1, ComplexVector& y,
                      std::span<const double> samples, const SampleObserver& observer,
                      const IntegratorOptions& options, IntegratorStats& stats) {
  if (!(t1 >= t0)) throw ConfigError("integrate_dop853: t1 must be >= t0");
  const std::size_t n = y.size();
  auto next_sample = std::upper_bound(samples.begin(), samples.end(), t0);
  auto sample_end = std::upper_bound(samples.begin(), samples.end(), t1);
  if (t1 == t0 || n == 0) {
    for (; next_sample != sample_end; ++next_sample) observer(*next_sample, y);
    return;
  }

  std::array<ComplexVector, dop853::kStagesExtended> k;
  for (auto& v : k) v.assign(n, Complex{});
  ComplexVector y_new(n), y_stage(n), err5(n), err3(n), dense_y(n);
  std::vector<double> scale(n);
  auto eval = [&](double t, const ComplexVector& state, ComplexVector& out) {
    rhs(t, state, out);
    ++stats.evaluations;
  };

  double t = t0;
  eval(t, y, k[0]);

  // Initial step size (Hairer's heuristic).
  double h;
  {
    for (std::size_t i = 0; i < n; ++i) scale[i] = options.atol + options.rtol * std::abs(y[i]);
    const double d0 = rms_scaled(y, scale);
    const double d1 = rms_scaled(k[0], scale);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    for (std::size_t i = 0; i < n; ++i) y_stage[i] = y[i] + h0 * k[0][i];
    eval(t + h0, y_stage, k[1]);
    for (std::size_t i = 0; i < n; ++i) err5[i] = k[1][i] - k[0][i];
    const double d2 = rms_scaled(err5, scale) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 8.0);
    h = std::min({100.0 * h0, h1, options.max_step, t1 - t0});
  }

  bool last_rejected = false;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > options.max_steps) fail("maximum number of steps exceeded", t);
    const double min_step = 10.0 * std::abs(std::nextafter(t, t1) - t);
    if (h < min_step) fail("step size underflow", t);
    h = std::min(h, options.max_step);
    bool final_step = false;
    if (t + h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    for (int s = 1; s < dop853::kStages; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex acc = 0.0;
        for (int j = 0; j < s; ++j) acc += dop853::A[s][j] * k[j][i];
        y_stage[i] = y[i] + h * acc;
      }
      eval(t + dop853::C[s] * h, y_stage, k[s]);
    }
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < dop853::kStages; ++j) acc += dop853::B[j] * k[j][i];
      y_new[i] = y[i] + h * acc;
      finite = finite && std::isfinite(y_new[i].real()) && std::isfinite(y_new[i].imag());
    }
    const double t_new = final_step ? t1 : t + h;
    double error_norm = std::numeric_limits<double>::infinity();
    if (finite) {
      eval(t_new, y_new, k[dop853::kStages]);
      for (std::size_t i = 0; i < n; ++i) {
        scale[i] = options.atol + options.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        Complex e5 = 0.0, e3 = 0.0;
        for (int j = 0; j <= dop853::kStages; ++j) {
          e5 += dop853::E5[j] * k[j][i];
          e3 += dop853::E3[j] * k[j][i];
        }
        err5[i] = e5;
        err3[i] = e3;
      }
      double n5 = 0.0, n3 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        n5 += std::norm(err5[i]) / (scale[i] * scale[i]);
        n3 += std::norm(err3[i]) / (scale[i] * scale[i]);
      }
      error_norm = (n5 == 0.0 && n3 == 0.0)
                       ? 0.0
                       : h * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(n));
    }

    if (!(error_norm < 1.0)) {
      const double factor =
          std::isfinite(error_norm) ? std::max(kMinFactor, kSafety * std::pow(error_norm, kErrorExponent))
                                    : kMinFactor;
      h *= factor;
      last_rejected = true;
      ++stats.rejected;
      continue;
    }

    // Dense output for samples inside (t, t_new).
    if (next_sample != sample_end && *next_sample < t_new) {
      for (int s = dop853::kStages + 1; s < dop853::kStagesExtended; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
          Complex acc = 0.0;
          for (int j = 0; j < s; ++j) acc += dop853::A[s][j] * k[j][i];
          y_stage[i] = y[i] + h * acc;
        }
        eval(t + dop853::C[s] * h, y_stage, k[s]);
      }
      std::array<ComplexVector, 7> f;
      for (auto& v : f) v.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Complex dy = y_new[i] - y[i];
        f[0][i] = dy;
        f[1][i] = h * k[0][i] - dy;
        f[2][i] = 2.0 * dy - h * (k[dop853::kStages][i] + k[0][i]);
        for (int r = 0; r < 4; ++r) {
          Complex acc = 0.0;
          for (int j = 0; j < dop853::kStagesExtended; ++j) acc += dop853::D[r][j] * k[j][i];
          f[3 + r][i] = h * acc;
        }
      }
      while (next_sample != sample_end && *next_sample < t_new) {
        const double x = (*next_sample - t) / h;
        for (std::size_t i = 0; i < n; ++i) {
          Complex acc = 0.0;
          for (int r = 6, parity = 0; r >= 0; --r, ++parity) {
            acc += f[r][i];
            acc *= (parity % 2 == 0) ? x : (1.0 - x);
          }
          dense_y[i] = y[i] + acc;
        }
        observer(*next_sample, dense_y);
        ++next_sample;
      }
    }

    y.swap(y_new);
    std::swap(k[0], k[dop853::kStages]);
    t = t_new;
    ++stats.accepted;
    while (next_sample != sample_end && *next_sample <= t) {
      observer(*next_sample, y);
      ++next_sample;
    }

    double factor = error_norm == 0.0 ? kMaxFactor
                                      : std::min(kMaxFactor, kSafety * std::pow(error_norm, kErrorExponent));
    if (last_rejected) factor = std::min(1.0, factor);
    h *= factor;
    last_rejected = false;
  }
}

}  // namespace crib
