#include "crib/sweep/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "crib/core/csv.hpp"
#include "crib/core/errors.hpp"
#include "crib/transfer/protocols.hpp"

namespace crib {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

const std::vector<std::string>& sweep_axis_names() {
  static const std::vector<std::string> names{"delta_IB", "tau_R",  "kappa_sqrtN", "delta_inh",
                                              "Delta",    "trim_S", "trim_C",      "spin_detuning"};
  return names;
}

void apply_axis(TransferSettings& s, std::string_view axis, double value) {
  if (axis == "delta_IB") s.intrinsic_half_width = value;
  else if (axis == "tau_R") s.rephasing_time = value;
  else if (axis == "kappa_sqrtN") s.collective_coupling = value;
  else if (axis == "delta_inh") s.induced_half_width = value;
  else if (axis == "Delta") s.initial_cavity_detuning = value;
  else if (axis == "trim_S") s.trim_spin = value;
  else if (axis == "trim_C") s.trim_cavity = value;
  else if (axis == "spin_detuning") s.spin_center_detuning = value;
  else throw ConfigError("unknown sweep axis '" + std::string(axis) + "'; valid axes: " + join(sweep_axis_names()));
}

double SweepAxis::value(std::size_t index) const {
  if (index + 1 == n_points) return max;
  return min + (max - min) * static_cast<double>(index) / static_cast<double>(n_points - 1);
}

void validate(const SweepSpec& spec) {
  for (const auto* axis : {&spec.axis1, &spec.axis2}) {
    const auto& names = sweep_axis_names();
    if (std::find(names.begin(), names.end(), axis->name) == names.end()) {
      throw ConfigError("unknown sweep axis '" + axis->name + "'; valid axes: " + join(names));
    }
    if (axis->n_points < 2) throw ConfigError("sweep axis '" + axis->name + "' needs n_points >= 2");
    if (!(axis->min < axis->max)) throw ConfigError("sweep axis '" + axis->name + "' needs min < max");
  }
  if (spec.axis1.name == spec.axis2.name) throw ConfigError("sweep axes must differ");
  if (spec.workers == 0) throw ConfigError("workers must be >= 1");
}

SweepSpec fig2_spec() {
  SweepSpec spec;
  spec.fixed.induced_half_width = 7.0;
  spec.fixed.collective_coupling = 6.0;
  return spec;
}

std::vector<std::optional<double>> read_completed_points(std::istream& in, const SweepSpec& spec) {
  const CsvTable table = read_numeric_csv(in);
  if (table.header != std::vector<std::string>{spec.axis1.name, spec.axis2.name, "efficiency"}) {
    throw ConfigError("resume: CSV header does not match the sweep axes");
  }
  const std::size_t n = spec.axis1.n_points * spec.axis2.n_points;
  if (table.rows.size() > n) throw ConfigError("resume: CSV has more rows than the grid");
  std::vector<std::optional<double>> out(n);
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const double v1 = spec.axis1.value(k / spec.axis2.n_points);
    const double v2 = spec.axis2.value(k % spec.axis2.n_points);
    if (!same_value(row[0], v1) || !same_value(row[1], v2)) {
      throw ConfigError("resume: row " + std::to_string(k + 2) + " does not match the grid");
    }
    if (!std::isnan(row[2])) out[k] = row[2];
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, const std::vector<std::optional<double>>& completed,
                      const SweepRowSink& on_row) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n2 = spec.axis2.n_points;
  const std::size_t n = spec.axis1.n_points * n2;
  if (!completed.empty() && completed.size() != n) throw ConfigError("resume: completed points do not match the grid");

  SweepResult result;
  result.spec = spec;
  result.points.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.points[k].value1 = spec.axis1.value(k / n2);
    result.points[k].value2 = spec.axis2.value(k % n2);
    if (!completed.empty() && completed[k]) {
      result.points[k].efficiency = *completed[k];
      result.points[k].resumed = true;
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex emit_mutex;
  std::vector<char> done(n, 0);
  std::size_t emitted = 0;
  auto finish = [&](std::size_t k) {
    std::lock_guard lock(emit_mutex);
    done[k] = 1;
    while (emitted < n && done[emitted]) {
      if (on_row) on_row(emitted, result.points[emitted]);
      ++emitted;
    }
  };
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      auto& point = result.points[k];
      if (point.resumed) {
        finish(k);
        continue;
      }
      try {
        TransferSettings s = spec.fixed;
        apply_axis(s, spec.axis1.name, point.value1);
        apply_axis(s, spec.axis2.name, point.value2);
        point.efficiency = run_staggered(s).efficiency;
      } catch (const std::exception& e) {
        point.efficiency = std::numeric_limits<double>::quiet_NaN();
        point.error = e.what();
      }
      finish(k);
    }
  };
  const std::size_t n_threads = std::min(spec.workers, std::max<std::size_t>(n, 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }

  for (const auto& p : result.points) {
    if (p.resumed) ++result.resumed;
    else if (std::isnan(p.efficiency)) ++result.failures;
    else ++result.computed;
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_sweep_header(std::ostream& out, const SweepSpec& spec) {
  out << spec.axis1.name << ',' << spec.axis2.name << ",efficiency\n";
}

void write_sweep_row(std::ostream& out, const SweepPoint& p) {
  out << format_double(p.value1) << ',' << format_double(p.value2) << ',' << format_double(p.efficiency) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  write_sweep_header(out, r.spec);
  for (const auto& p : r.points) write_sweep_row(out, p);
}

nlohmann::json sweep_sidecar(const SweepResult& r) {
  auto axis = [](const SweepAxis& a) {
    return nlohmann::json{{"name", a.name}, {"min", a.min}, {"max", a.max}, {"n_points", a.n_points}};
  };
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const auto& p = r.points[k];
    if (!p.error.empty()) {
      failures.push_back({{"index", k}, {r.spec.axis1.name, p.value1}, {r.spec.axis2.name, p.value2}, {"error", p.error}});
    }
  }
  return {{"schema", "crib-sweep"},
          {"version", 1},
          {"artifact_version", CRIB_VERSION},
          {"seed", r.spec.fixed.seed},
          {"axes", {axis(r.spec.axis1), axis(r.spec.axis2)}},
          {"order", "row-major, first axis outer"},
          {"fixed", settings_to_json(r.spec.fixed)},
          {"workers", r.spec.workers},
          {"wall_time_s", r.wall_time},
          {"points", r.points.size()},
          {"computed", r.computed},
          {"resumed", r.resumed},
          {"failures", failures}};
}

const std::vector<std::string>& optimizable_variables() {
  static const std::vector<std::string> names{"tau_R", "trim_S", "trim_C"};
  return names;
}

ScalarOptimum optimize_scalar(const TransferSettings& settings, std::string_view variable, double lo,
                              double hi, const MaximizeOptions& options) {
  const auto& names = optimizable_variables();
  if (std::find(names.begin(), names.end(), variable) == names.end()) {
    throw ConfigError("cannot optimize '" + std::string(variable) + "'; valid variables: " + join(names));
  }
  auto objective = [&](double x) {
    TransferSettings s = settings;
    apply_axis(s, variable, x);
    return run_staggered(s).efficiency;
  };
  return maximize_scalar(objective, lo, hi, options);
}

nlohmann::json settings_to_json(const TransferSettings& s) {
  return {{"n_spins", s.n_spins},
          {"delta_IB", s.intrinsic_half_width},
          {"delta_inh", s.induced_half_width},
          {"kappa_sqrtN", s.collective_coupling},
          {"intrinsic_profile", std::string(to_string(s.intrinsic_profile))},
          {"seed", s.seed},
          {"spin_detuning", s.spin_center_detuning},
          {"Delta", s.initial_cavity_detuning},
          {"G", s.qubit_coupling},
          {"tau_R", s.rephasing_time},
          {"trim_S", s.trim_spin},
          {"trim_C", s.trim_cavity},
          {"park_duration", s.park_duration},
          {"gap", s.gap},
          {"ramp_duration", s.ramp_duration},
          {"tolerance", s.integration.tolerance},
          {"n_samples", s.integration.n_samples}};
}

}  // namespace crib
