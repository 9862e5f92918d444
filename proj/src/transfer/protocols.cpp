#include "crib/transfer/protocols.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "crib/core/csv.hpp"
#include "crib/core/errors.hpp"
#include "crib/core/state.hpp"

namespace crib {

namespace {

// An uncoupled ensemble has no spin pulse length; use the cavity pulse length
// so the schedule stays finite and the run shows that nothing transfers.
double nominal_coupling(const TransferSettings& s) {
  return s.collective_coupling > 0.0 ? s.collective_coupling : s.qubit_coupling;
}

}  // namespace

ProtocolSchedule staggered_schedule(const TransferSettings& settings) {
  auto config = staggered_config(settings);
  config.collective_coupling = nominal_coupling(settings);
  return build_staggered(config);
}

ProtocolResult run_schedule(TransferParams params, const SingleExcitationState& initial,
                            const EvolveOptions& options) {
  ProtocolResult r;
  const double total = params.schedule.total_duration();
  r.trajectory = evolve(params, initial, total, options);
  r.efficiency = std::norm(r.trajectory.final_state.qubit());
  r.cavity_travel = params.schedule.cavity_travel();
  r.params = std::move(params);
  return r;
}

std::vector<Diagnostic> diagnose(const TransferSettings& settings, const ProtocolSchedule& schedule,
                                 double travel_budget) {
  ValidationOptions v;
  v.travel_budget = travel_budget;
  v.spin_center_detuning = settings.spin_center_detuning;
  v.collective_coupling = settings.collective_coupling;
  return validate(schedule, v);
}

ProtocolResult run_staggered(const TransferSettings& settings) {
  auto params = make_params(settings, staggered_schedule(settings));
  const auto initial = prepare_initial_state(params.ensemble, settings.rephasing_time);
  auto diagnostics = diagnose(settings, params.schedule, std::numeric_limits<double>::infinity());
  auto r = run_schedule(std::move(params), initial, settings.integration);
  r.diagnostics = std::move(diagnostics);
  return r;
}

ProtocolResult run_adiabatic(const TransferSettings& settings, const AdiabaticOptions& o) {
  if (!(o.sweep_duration > 0.0)) throw ConfigError("sweep_duration must be > 0");
  if (o.spin_margin < 0.0 || o.qubit_margin < 0.0) throw ConfigError("sweep margins must be >= 0");
  const double from = settings.spin_center_detuning + o.spin_margin;
  const double to = -o.qubit_margin;

  ProtocolSchedule s;
  s.metadata.spin_pulse_time = spin_pulse_time(settings.collective_coupling);
  s.metadata.cavity_pulse_time = cavity_pulse_time(settings.qubit_coupling);
  s.metadata.variant = "adiabatic";
  s.segments.push_back(Segment::ramp(o.sweep_duration, from, to, -1, 0.0, "sweep"));

  double tau_r = settings.rephasing_time;
  if (o.rephase_at_crossing && from != to) {
    tau_r = o.sweep_duration * (from - settings.spin_center_detuning) / (from - to);
  }
  s.metadata.rephasing_time = tau_r;

  auto params = make_params(settings, s);
  params.rephasing_time = tau_r;
  const auto initial = prepare_initial_state(params.ensemble, tau_r);
  auto diagnostics = diagnose(settings, s, std::numeric_limits<double>::infinity());
  auto r = run_schedule(std::move(params), initial, settings.integration);
  r.diagnostics = std::move(diagnostics);
  return r;
}

ProtocolResult run_reduced_sweep_variant(const TransferSettings& settings, double spin_park_detuning) {
  const double spin_line = settings.initial_cavity_detuning;
  const double t_c = settings.trim_cavity * cavity_pulse_time(settings.qubit_coupling);
  const double t_s = settings.trim_spin * spin_pulse_time(nominal_coupling(settings));

  ProtocolSchedule s;
  s.metadata.spin_pulse_time = t_s;
  s.metadata.cavity_pulse_time = t_c;
  s.metadata.rephasing_time = settings.rephasing_time;
  s.metadata.variant = "reduced-sweep";
  s.segments.push_back(Segment::hold(t_s, spin_line, -1, 0.0, "A"));
  if (settings.gap > 0.0) {
    s.segments.push_back(Segment::hold(settings.gap, spin_line, -1, spin_park_detuning, "gap"));
  }
  s.segments.push_back(Segment::hold(t_c, 0.0, -1, spin_park_detuning, "B"));
  s.segments.push_back(Segment::hold(settings.park_duration, spin_line, -1, spin_park_detuning, "C"));

  TransferSettings local = settings;
  local.spin_center_detuning = spin_line;
  auto params = make_params(local, s);
  const auto initial = prepare_initial_state(params.ensemble, settings.rephasing_time);
  auto diagnostics = diagnose(local, s, std::numeric_limits<double>::infinity());
  auto r = run_schedule(std::move(params), initial, settings.integration);
  r.diagnostics = std::move(diagnostics);
  return r;
}

ProtocolResult run_reverse(const TransferSettings& settings, const ProtocolSchedule& forward) {
  auto params = make_params(settings, reverse_schedule(forward));
  const auto target = prepare_initial_state(params.ensemble, settings.rephasing_time);
  auto initial = SingleExcitationState::qubit_excited(params.ensemble.size());
  auto diagnostics = diagnose(settings, params.schedule, std::numeric_limits<double>::infinity());
  auto r = run_schedule(std::move(params), initial, settings.integration);
  r.efficiency = spin_overlap(target.spins(), r.trajectory.final_state);
  r.diagnostics = std::move(diagnostics);
  return r;
}

ProtocolResult run_reverse(const TransferSettings& settings) {
  return run_reverse(settings, staggered_schedule(settings));
}

ProtocolResult reduced_three_mode(const TransferSettings& settings) {
  TransferParams params;
  params.ensemble.intrinsic = {0.0};
  params.ensemble.induced = {0.0};
  params.ensemble.collective_coupling = settings.collective_coupling;
  params.spin_center_detuning = settings.spin_center_detuning;
  params.qubit_coupling = settings.qubit_coupling;
  params.rephasing_time = settings.rephasing_time;
  params.frame_offset = settings.frame_offset;
  params.schedule = staggered_schedule(settings);
  return run_schedule(std::move(params), SingleExcitationState::dicke(1), settings.integration);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& tr) {
  out << "t,spin_pop,cavity_pop,qubit_pop,sym_overlap\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out << format_double(tr.times[i]) << ',' << format_double(tr.spin_population[i]) << ','
        << format_double(tr.cavity_population[i]) << ',' << format_double(tr.qubit_population[i]) << ','
        << format_double(tr.symmetric_overlap[i]) << '\n';
  }
}

}  // namespace crib
