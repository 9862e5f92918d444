#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace crib {

struct ScalarOptimum {
  double argmax = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// True when the probe scan saw more than one local maximum and the dense
  /// scan was used to pick the bracket.
  bool fallback_scan = false;
  double scan_argmax = 0.0;  // best point of the scan stage
  double scan_value = 0.0;
};

struct MaximizeOptions {
  double x_tolerance = 1e-6;
  std::size_t probe_points = 9;
  std::size_t dense_points = 64;
};

/// Maximizes f on [lo, hi]: a coarse probe checks unimodality, then a
/// golden-section search refines inside the bracket around the best probe.
/// A non-unimodal probe switches to a dense scan before refining.
ScalarOptimum maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              const MaximizeOptions& options = {});

/// Plain golden-section search for a maximum on [lo, hi].
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tolerance);

}  // namespace crib
