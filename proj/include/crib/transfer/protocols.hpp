#pragma once

#include <iosfwd>
#include <vector>

#include "crib/protocol/schedule.hpp"
#include "crib/transfer/dynamics.hpp"

namespace crib {

struct ProtocolResult {
  double efficiency = 0.0;
  TrajectoryRecord trajectory;
  TransferParams params;
  std::vector<Diagnostic> diagnostics;
  double cavity_travel = 0.0;
};

/// build_staggered for these settings. A zero spin coupling falls back to the
/// cavity pulse length for the spin stage.
ProtocolSchedule staggered_schedule(const TransferSettings& settings);

/// Runs an arbitrary schedule from the given state up to its total duration.
ProtocolResult run_schedule(TransferParams params, const SingleExcitationState& initial,
                            const EvolveOptions& options);

/// Spin pi-pulse, cavity-qubit pi-pulse, park. Efficiency = final |q|^2.
ProtocolResult run_staggered(const TransferSettings& settings);

struct AdiabaticOptions {
  double sweep_duration = 20.0;
  double spin_margin = 42.0;   // start this far above the spin line
  double qubit_margin = 12.0;  // end this far below the qubit
  /// Time the rephasing to the moment the cavity crosses the spin line
  /// instead of using settings.rephasing_time.
  bool rephase_at_crossing = true;
};

/// One linear cavity sweep from above the spin line to below the qubit.
ProtocolResult run_adiabatic(const TransferSettings& settings, const AdiabaticOptions& options);

/// The spin line sits at the initial cavity detuning above the qubit, so the
/// cavity only travels between the qubit and the spins. During the
/// cavity-qubit pulse (and afterwards) every spin is shifted by
/// `spin_park_detuning` to keep it out of resonance.
ProtocolResult run_reduced_sweep_variant(const TransferSettings& settings, double spin_park_detuning);

/// Time-reversed staggered schedule (gradient +1) starting from the excited
/// qubit. Efficiency is the overlap with the state the forward run starts
/// from, i.e. the recovered spin wave that rephases after the same tau_R.
ProtocolResult run_reverse(const TransferSettings& settings);
/// Same for an arbitrary forward schedule.
ProtocolResult run_reverse(const TransferSettings& settings, const ProtocolSchedule& forward);

/// Symmetric spin mode with coupling kappa sqrt(N), cavity and qubit, under the
/// staggered schedule. Exact for a degenerate ensemble.
ProtocolResult reduced_three_mode(const TransferSettings& settings);

/// Validation hints for a schedule run with these settings.
std::vector<Diagnostic> diagnose(const TransferSettings& settings, const ProtocolSchedule& schedule,
                                 double travel_budget);

/// Header `t,spin_pop,cavity_pop,qubit_pop,sym_overlap`, one row per sample.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& trajectory);

}  // namespace crib
