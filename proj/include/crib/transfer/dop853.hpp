#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "crib/core/types.hpp"

namespace crib {

using ComplexVector = std::vector<Complex>;
using OdeRhs = std::function<void(double t, std::span<const Complex> y, std::span<Complex> dydt)>;
using SampleObserver = std::function<void(double t, std::span<const Complex> y)>;

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Adaptive Dormand-Prince 8(5,3) on a complex vector, from t0 to t1 >= t0.
/// Each sample time in (t0, t1] is reported through `observer` using the
/// 7th-order continuous extension; `samples` must be sorted. The final step is
/// clipped to land on t1 exactly, so callers can treat t1 as a breakpoint.
///
/// Throws NumericalError on step-size underflow or when max_steps is hit.
void integrate_dop853(const OdeRhs& rhs, double t0, double t1, ComplexVector& y,
                      std::span<const double> samples, const SampleObserver& observer,
                      const IntegratorOptions& options, IntegratorStats& stats);

}  // namespace crib
