#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crib/core/scalar_optimize.hpp"
#include "crib/transfer/dynamics.hpp"

namespace crib {

/// Names accepted for sweep axes, in display order.
const std::vector<std::string>& sweep_axis_names();
/// Writes `value` into the field of `settings` that `axis` names.
void apply_axis(TransferSettings& settings, std::string_view axis, double value);

struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  std::size_t n_points = 2;

  double value(std::size_t index) const;
};

struct SweepSpec {
  SweepAxis axis1{"delta_IB", 0.0, 5.0, 40};
  SweepAxis axis2{"tau_R", 0.0, 0.5, 40};
  TransferSettings fixed;
  std::size_t workers = 1;
};

/// Throws ConfigError for unknown axis names (listing the valid ones),
/// fewer than two points or min >= max.
void validate(const SweepSpec& spec);

/// delta_IB x tau_R grid with delta_inh = 7 and kappa sqrt(N) = 6.
SweepSpec fig2_spec();

struct SweepPoint {
  double value1 = 0.0;
  double value2 = 0.0;
  double efficiency = 0.0;  // NaN when the point failed
  std::string error;
  bool resumed = false;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;  // row-major, axis1 outer
  std::size_t failures = 0;
  std::size_t resumed = 0;
  std::size_t computed = 0;
  double wall_time = 0.0;

  const SweepPoint& at(std::size_t i1, std::size_t i2) const {
    return points[i1 * spec.axis2.n_points + i2];
  }
};

/// Efficiencies already present in a previous CSV for the same grid, by
/// row-major index. Rows with NaN efficiency count as missing. Throws
/// ConfigError when the header or the axis values do not match the sweep definition.
std::vector<std::optional<double>> read_completed_points(std::istream& in, const SweepSpec& spec);

/// Called once per grid point in row-major order, as soon as every earlier
/// point is done, so a caller can stream a partial CSV that stays resumable.
using SweepRowSink = std::function<void(std::size_t index, const SweepPoint& point)>;

/// Runs the staggered protocol at every grid point on `spec.workers` threads.
/// A failed point becomes a NaN hole with its error message kept.
SweepResult run_sweep(const SweepSpec& spec,
                      const std::vector<std::optional<double>>& completed = {},
                      const SweepRowSink& on_row = {});

void write_sweep_header(std::ostream& out, const SweepSpec& spec);
void write_sweep_row(std::ostream& out, const SweepPoint& point);

/// Header `<axis1>,<axis2>,efficiency`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Parameter echo, seed, version, wall time and failures.
nlohmann::json sweep_sidecar(const SweepResult& result);

/// Variables accepted by optimize_scalar.
const std::vector<std::string>& optimizable_variables();

/// Maximizes the staggered efficiency over tau_R, trim_S or trim_C.
ScalarOptimum optimize_scalar(const TransferSettings& settings, std::string_view variable, double lo,
                              double hi, const MaximizeOptions& options = {});

nlohmann::json settings_to_json(const TransferSettings& settings);

}  // namespace crib
