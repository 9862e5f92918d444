#pragma once

// Piecewise protocol schedules. Each segment holds the cavity detuning (a
// constant or a linear ramp), the sign of the magnetic-field gradient acting
// on the induced spin detunings, and a common shift applied to every spin.

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace crib {

struct Segment {
  double duration = 0.0;
  double cavity_start = 0.0;
  double cavity_end = 0.0;
  int gradient_sign = -1;
  double spin_shift = 0.0;
  std::string label;

  static Segment hold(double duration, double cavity, int gradient_sign, double spin_shift,
                      std::string label);
  static Segment ramp(double duration, double cavity_from, double cavity_to, int gradient_sign,
                      double spin_shift, std::string label);

  bool is_ramp() const { return cavity_start != cavity_end; }
  /// Cavity detuning at local time t in [0, duration].
  double cavity_at(double t) const;

  bool operator==(const Segment&) const = default;
};

struct ScheduleMetadata {
  double spin_pulse_time = 0.0;    // T_S
  double cavity_pulse_time = 0.0;  // T_C
  double rephasing_time = 0.0;     // tau_R
  std::string variant = "custom";  // staggered | adiabatic | reduced-sweep | custom
  bool reversed = false;

  bool operator==(const ScheduleMetadata&) const = default;
};

struct ProtocolSchedule {
  std::vector<Segment> segments;
  ScheduleMetadata metadata;

  double total_duration() const;
  /// max - min of the cavity detuning over all segments (0 when empty).
  double cavity_travel() const;

  bool operator==(const ProtocolSchedule&) const = default;
};

struct StaggeredConfig {
  double collective_coupling = 6.0;      // kappa sqrt(N)
  double qubit_coupling = 1.0;           // G
  double spin_center_detuning = 176.0;   // spin line relative to the qubit
  double initial_cavity_detuning = 20.0; // cavity park above the spin line
  double rephasing_time = 0.15;
  double trim_spin = 1.0;
  double trim_cavity = 1.0;
  double park_duration = 1.0;  // length of the closing park segment
  double gap = 0.0;            // optional park between the two pi-pulses
  double ramp_duration = 0.0;  // 0 = instantaneous retuning
};

double spin_pulse_time(double collective_coupling);  // pi / (2 kappa sqrt(N))
double cavity_pulse_time(double qubit_coupling);     // pi / (2 G)

/// Spin pi-pulse (cavity on the spin line), cavity-qubit pi-pulse (cavity on
/// the qubit), then park at the initial cavity position. Gradient -1 throughout.
ProtocolSchedule build_staggered(const StaggeredConfig& config);

/// Segments in reverse order with mirrored ramps and negated gradient signs.
ProtocolSchedule reverse_schedule(const ProtocolSchedule& schedule);

struct Diagnostic {
  enum class Severity { Info, Warning };
  Severity severity = Severity::Warning;
  std::string code;
  std::string message;
};

struct ValidationOptions {
  double travel_budget = std::numeric_limits<double>::infinity();  // G units
  double spin_center_detuning = 0.0;
  double collective_coupling = 0.0;
  double proximity_factor = 3.0;
};

/// Structural problems (negative durations, bad gradient signs) are reported
/// as diagnostics as well; nothing here throws.
std::vector<Diagnostic> validate(const ProtocolSchedule& schedule, const ValidationOptions& options);

nlohmann::json to_json(const ProtocolSchedule& schedule);
/// Accepts `cavity_detuning` as a number or as {"start", "end"}.
ProtocolSchedule schedule_from_json(const nlohmann::json& doc);

}  // namespace crib
