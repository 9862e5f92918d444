#include "crib/protocol/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crib/core/errors.hpp"

namespace crib {

Segment Segment::hold(double duration, double cavity, int gradient_sign, double spin_shift,
                      std::string label) {
  return {duration, cavity, cavity, gradient_sign, spin_shift, std::move(label)};
}

Segment Segment::ramp(double duration, double cavity_from, double cavity_to, int gradient_sign,
                      double spin_shift, std::string label) {
  return {duration, cavity_from, cavity_to, gradient_sign, spin_shift, std::move(label)};
}

double Segment::cavity_at(double t) const {
  if (!is_ramp() || duration <= 0.0) return cavity_start;
  const double x = std::clamp(t / duration, 0.0, 1.0);
  return cavity_start + (cavity_end - cavity_start) * x;
}

double ProtocolSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double ProtocolSchedule::cavity_travel() const {
  if (segments.empty()) return 0.0;
  double lo = segments.front().cavity_start, hi = lo;
  for (const auto& s : segments) {
    lo = std::min({lo, s.cavity_start, s.cavity_end});
    hi = std::max({hi, s.cavity_start, s.cavity_end});
  }
  return hi - lo;
}

double spin_pulse_time(double collective_coupling) {
  return std::numbers::pi / (2.0 * collective_coupling);
}

double cavity_pulse_time(double qubit_coupling) { return std::numbers::pi / (2.0 * qubit_coupling); }

ProtocolSchedule build_staggered(const StaggeredConfig& c) {
  if (!(c.collective_coupling > 0.0)) throw ConfigError("build_staggered: kappa*sqrt(N) must be > 0");
  if (!(c.qubit_coupling > 0.0)) throw ConfigError("build_staggered: G must be > 0");
  if (!(c.trim_spin >= 0.0) || !(c.trim_cavity >= 0.0)) {
    throw ConfigError("build_staggered: trims must be >= 0");
  }
  if (c.park_duration < 0.0 || c.gap < 0.0 || c.ramp_duration < 0.0) {
    throw ConfigError("build_staggered: durations must be >= 0");
  }

  ProtocolSchedule s;
  s.metadata.spin_pulse_time = c.trim_spin * spin_pulse_time(c.collective_coupling);
  s.metadata.cavity_pulse_time = c.trim_cavity * cavity_pulse_time(c.qubit_coupling);
  s.metadata.rephasing_time = c.rephasing_time;
  s.metadata.variant = "staggered";

  const double spin_line = c.spin_center_detuning;
  const double park = c.spin_center_detuning + c.initial_cavity_detuning;
  auto retune = [&](double from, double to, const char* label) {
    if (c.ramp_duration > 0.0) s.segments.push_back(Segment::ramp(c.ramp_duration, from, to, -1, 0.0, label));
  };

  retune(park, spin_line, "ramp-in");
  s.segments.push_back(Segment::hold(s.metadata.spin_pulse_time, spin_line, -1, 0.0, "A"));
  if (c.gap > 0.0) {
    retune(spin_line, park, "ramp-gap-out");
    s.segments.push_back(Segment::hold(c.gap, park, -1, 0.0, "gap"));
    retune(park, 0.0, "ramp-gap-in");
  } else {
    retune(spin_line, 0.0, "ramp-AB");
  }
  s.segments.push_back(Segment::hold(s.metadata.cavity_pulse_time, 0.0, -1, 0.0, "B"));
  retune(0.0, park, "ramp-out");
  s.segments.push_back(Segment::hold(c.park_duration, park, -1, 0.0, "C"));
  return s;
}

ProtocolSchedule reverse_schedule(const ProtocolSchedule& schedule) {
  ProtocolSchedule out;
  out.metadata = schedule.metadata;
  out.metadata.reversed = !schedule.metadata.reversed;
  out.segments.reserve(schedule.segments.size());
  for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
    Segment s = *it;
    std::swap(s.cavity_start, s.cavity_end);
    s.gradient_sign = -s.gradient_sign;
    out.segments.push_back(std::move(s));
  }
  return out;
}

std::vector<Diagnostic> validate(const ProtocolSchedule& schedule, const ValidationOptions& o) {
  std::vector<Diagnostic> out;
  auto warn = [&](std::string code, std::string message) {
    out.push_back({Diagnostic::Severity::Warning, std::move(code), std::move(message)});
  };
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const auto& s = schedule.segments[i];
    if (!(s.duration >= 0.0)) warn("negative-duration", "segment " + std::to_string(i) + " has a negative duration");
    if (s.gradient_sign != 1 && s.gradient_sign != -1) {
      warn("gradient-sign", "segment " + std::to_string(i) + " gradient sign must be +1 or -1");
    }
  }
  if (schedule.total_duration() <= 0.0) warn("empty", "schedule has zero total duration");

  const double travel = schedule.cavity_travel();
  if (travel > o.travel_budget) {
    std::ostringstream msg;
    msg << "cavity travel " << travel << " G exceeds the tuning budget " << o.travel_budget
        << " G (large tuning ranges, of order 1 GHz, are hard to realize)";
    warn("travel-budget", msg.str());
  }
  if (o.collective_coupling > 0.0 &&
      std::abs(o.spin_center_detuning) < o.proximity_factor * o.collective_coupling) {
    std::ostringstream msg;
    msg << "spin-qubit detuning " << o.spin_center_detuning << " G is below " << o.proximity_factor
        << " x kappa*sqrt(N) = " << o.proximity_factor * o.collective_coupling
        << " G; spins and qubit are not far detuned";
    warn("spin-qubit-proximity", msg.str());
  }
  return out;
}

nlohmann::json to_json(const ProtocolSchedule& schedule) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : schedule.segments) {
    segs.push_back({{"label", s.label},
                    {"duration", s.duration},
                    {"cavity_detuning", {{"start", s.cavity_start}, {"end", s.cavity_end}}},
                    {"gradient_sign", s.gradient_sign},
                    {"common_spin_shift", s.spin_shift}});
  }
  const auto& m = schedule.metadata;
  return {{"schema", "crib-schedule"},
          {"version", 1},
          {"metadata",
           {{"T_S", m.spin_pulse_time},
            {"T_C", m.cavity_pulse_time},
            {"tau_R", m.rephasing_time},
            {"variant", m.variant},
            {"reversed", m.reversed}}},
          {"segments", segs}};
}

ProtocolSchedule schedule_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("version", 1) != 1) throw ConfigError("schedule: unsupported version");
    ProtocolSchedule s;
    if (doc.contains("metadata")) {
      const auto& m = doc.at("metadata");
      s.metadata.spin_pulse_time = m.value("T_S", 0.0);
      s.metadata.cavity_pulse_time = m.value("T_C", 0.0);
      s.metadata.rephasing_time = m.value("tau_R", 0.0);
      s.metadata.variant = m.value("variant", std::string("custom"));
      s.metadata.reversed = m.value("reversed", false);
    }
    for (const auto& j : doc.at("segments")) {
      Segment seg;
      seg.label = j.value("label", std::string());
      seg.duration = j.at("duration").get<double>();
      const auto& cav = j.at("cavity_detuning");
      if (cav.is_number()) {
        seg.cavity_start = seg.cavity_end = cav.get<double>();
      } else {
        seg.cavity_start = cav.at("start").get<double>();
        seg.cavity_end = cav.value("end", seg.cavity_start);
      }
      seg.gradient_sign = j.value("gradient_sign", -1);
      seg.spin_shift = j.value("common_spin_shift", 0.0);
      if (seg.duration < 0.0) throw ConfigError("schedule: negative segment duration");
      if (seg.gradient_sign != 1 && seg.gradient_sign != -1) {
        throw ConfigError("schedule: gradient_sign must be +1 or -1");
      }
      s.segments.push_back(std::move(seg));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

}  // namespace crib
