#pragma once

// Single-excitation Schroedinger dynamics of N spins, a tunable cavity and a
// qubit, in the frame rotating at the qubit frequency:
//
//   i d(xi_j)/dt = [D_s + s(t) w_j + u_j + shift(t)] xi_j + kappa c
//   i dc/dt      = D_c(t) c + kappa sum_j xi_j + G q
//   i dq/dt      = G c
//
// with w_j the induced (gradient) detunings, u_j the intrinsic ones, D_s the
// spin line position and D_c(t), s(t), shift(t) read from the schedule.
// `frame_offset` adds one constant to every mode; it only changes a global
// phase and exists to test gauge invariance.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "crib/core/detuning.hpp"
#include "crib/core/types.hpp"
#include "crib/protocol/schedule.hpp"
#include "crib/transfer/dop853.hpp"

namespace crib {

struct TransferParams {
  SpinEnsemble ensemble;
  double spin_center_detuning = 176.0;
  double qubit_coupling = 1.0;
  double rephasing_time = 0.15;
  double frame_offset = 0.0;
  ProtocolSchedule schedule;
};

struct EvolveOptions {
  double tolerance = 1e-10;    // relative; must lie in [1e-12, 1e-6]
  std::size_t n_samples = 401; // raised to 401 if smaller
  bool keep_states = false;    // store the full state at every sample
};

/// Everything needed to set up a transfer run, in G units.
struct TransferSettings {
  std::size_t n_spins = 128;
  double intrinsic_half_width = 2.0;  // delta_IB
  double induced_half_width = 10.0;   // delta_inh
  double collective_coupling = 6.0;   // kappa sqrt(N)
  DetuningProfile intrinsic_profile = DetuningProfile::UniformGrid;
  std::uint64_t seed = 0;

  double spin_center_detuning = 176.0;
  double initial_cavity_detuning = 20.0;
  double qubit_coupling = 1.0;
  double rephasing_time = 0.15;
  double trim_spin = 1.0;
  double trim_cavity = 1.0;
  double park_duration = 1.0;
  double gap = 0.0;
  double ramp_duration = 0.0;
  double frame_offset = 0.0;

  EvolveOptions integration;
};

/// Induced detunings on a uniform grid by position; intrinsic detunings from
/// the chosen profile, reordered so the two sets are uncorrelated.
SpinEnsemble make_ensemble(const TransferSettings& settings);
StaggeredConfig staggered_config(const TransferSettings& settings);
TransferParams make_params(const TransferSettings& settings, ProtocolSchedule schedule);

/// Right-hand side at absolute time t. At a segment boundary the later
/// segment applies; past the end the last segment is held.
void derivative(const TransferParams& params, double t, std::span<const Complex> y,
                std::span<Complex> dydt);

/// xi_j = exp(-i w_j tau_R) / sqrt(N): with gradient sign -1 the induced
/// phases cancel exactly at t = tau_R.
SingleExcitationState prepare_initial_state(const SpinEnsemble& ensemble, double rephasing_time);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> spin_population;
  std::vector<double> cavity_population;
  std::vector<double> qubit_population;
  std::vector<double> symmetric_overlap;
  std::vector<Complex> symmetric_amplitude;
  std::vector<Complex> cavity_amplitude;
  std::vector<Complex> qubit_amplitude;
  std::vector<SingleExcitationState> states;  // only with keep_states
  SingleExcitationState final_state;
  IntegratorStats stats;
  double max_norm_drift = 0.0;
};

/// Integrates from t = 0 to t_final with segment boundaries as breakpoints.
/// Throws ConfigError on a bad tolerance and NumericalError when the norm
/// drifts by more than 100 x tolerance or the step size underflows.
TrajectoryRecord evolve(const TransferParams& params, const SingleExcitationState& initial,
                        double t_final, const EvolveOptions& options = {});

struct EtaEstimate {
  double sinc2 = 1.0;     // sin^2(x)/x^2 with x = delta_IB T_S
  double gaussian = 1.0;  // exp(-x^2/3)
};

/// Dephasing loss of the spin pi-pulse for a flat intrinsic line.
EtaEstimate eta_t_estimate(double intrinsic_half_width, double spin_pulse_time);

}  // namespace crib
