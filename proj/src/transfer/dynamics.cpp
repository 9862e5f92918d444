#include "crib/transfer/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crib/core/errors.hpp"
#include "crib/core/state.hpp"

namespace crib {

namespace {

// Per-segment constants, so the inner loop is a plain multiply-add.
struct SegmentRhs {
  const TransferParams* params = nullptr;
  const Segment* segment = nullptr;
  double start = 0.0;
  std::vector<double> spin_detuning;

  SegmentRhs(const TransferParams& p, const Segment* seg, double t0) : params(&p), segment(seg), start(t0) {
    const auto& e = p.ensemble;
    const int sign = seg ? seg->gradient_sign : -1;
    const double shift = seg ? seg->spin_shift : 0.0;
    spin_detuning.resize(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
      spin_detuning[j] =
          p.spin_center_detuning + sign * e.induced[j] + e.intrinsic[j] + shift + p.frame_offset;
    }
  }

  void operator()(double t, std::span<const Complex> y, std::span<Complex> dy) const {
    const std::size_t n = spin_detuning.size();
    const double kappa = params->ensemble.single_spin_coupling();
    const double g = params->qubit_coupling;
    const double cavity_detuning =
        (segment ? segment->cavity_at(t - start) : 0.0) + params->frame_offset;
    const Complex minus_i{0.0, -1.0};
    const Complex c = y[n];
    const Complex q = y[n + 1];
    Complex sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += y[j];
      dy[j] = minus_i * (spin_detuning[j] * y[j] + kappa * c);
    }
    dy[n] = minus_i * (cavity_detuning * c + kappa * sum + g * q);
    dy[n + 1] = minus_i * (params->frame_offset * q + g * c);
  }
};

void check_shape(const TransferParams& params, std::size_t size) {
  const auto& e = params.ensemble;
  if (e.intrinsic.size() != e.induced.size()) {
    throw ConfigError("ensemble: intrinsic and induced detuning counts differ");
  }
  if (size != e.size() + 2) throw ConfigError("state size does not match the ensemble");
}

}  // namespace

SpinEnsemble make_ensemble(const TransferSettings& s) {
  if (s.n_spins == 0) throw ConfigError("n_spins must be >= 1");
  if (!(s.collective_coupling >= 0.0)) throw ConfigError("kappa_sqrtN must be >= 0");
  SpinEnsemble e;
  e.induced = build_detuning_grid(s.induced_half_width, s.n_spins, DetuningProfile::UniformGrid);
  e.intrinsic = decorrelate(build_detuning_grid(s.intrinsic_half_width, s.n_spins, s.intrinsic_profile, s.seed));
  e.collective_coupling = s.collective_coupling;
  return e;
}

StaggeredConfig staggered_config(const TransferSettings& s) {
  StaggeredConfig c;
  c.collective_coupling = s.collective_coupling;
  c.qubit_coupling = s.qubit_coupling;
  c.spin_center_detuning = s.spin_center_detuning;
  c.initial_cavity_detuning = s.initial_cavity_detuning;
  c.rephasing_time = s.rephasing_time;
  c.trim_spin = s.trim_spin;
  c.trim_cavity = s.trim_cavity;
  c.park_duration = s.park_duration;
  c.gap = s.gap;
  c.ramp_duration = s.ramp_duration;
  return c;
}

TransferParams make_params(const TransferSettings& s, ProtocolSchedule schedule) {
  TransferParams p;
  p.ensemble = make_ensemble(s);
  p.spin_center_detuning = s.spin_center_detuning;
  p.qubit_coupling = s.qubit_coupling;
  p.rephasing_time = s.rephasing_time;
  p.frame_offset = s.frame_offset;
  p.schedule = std::move(schedule);
  return p;
}

void derivative(const TransferParams& params, double t, std::span<const Complex> y,
                std::span<Complex> dydt) {
  check_shape(params, y.size());
  if (dydt.size() != y.size()) throw ConfigError("derivative: output size mismatch");
  const auto& segs = params.schedule.segments;
  const Segment* seg = segs.empty() ? nullptr : &segs.back();
  double start = params.schedule.total_duration() - (seg ? seg->duration : 0.0);
  double acc = 0.0;
  for (const auto& s : segs) {
    if (t < acc + s.duration) {
      seg = &s;
      start = acc;
      break;
    }
    acc += s.duration;
  }
  SegmentRhs(params, seg, start)(t, y, dydt);
}

SingleExcitationState prepare_initial_state(const SpinEnsemble& ensemble, double rephasing_time) {
  if (!(rephasing_time >= 0.0)) throw ConfigError("tau_R must be >= 0");
  const std::size_t n = ensemble.size();
  if (n == 0) throw ConfigError("ensemble must contain at least one spin");
  SingleExcitationState state(n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    state.spins()[j] = std::polar(a, -ensemble.induced[j] * rephasing_time);
  }
  return state;
}

TrajectoryRecord evolve(const TransferParams& params, const SingleExcitationState& initial,
                        double t_final, const EvolveOptions& options) {
  if (!(options.tolerance >= 1e-12 && options.tolerance <= 1e-6)) {
    throw ConfigError("tolerance must lie in [1e-12, 1e-6]");
  }
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be finite and >= 0");
  check_shape(params, initial.flat().size());

  TrajectoryRecord rec;
  const std::size_t n_samples = t_final > 0.0 ? std::max<std::size_t>(options.n_samples, 401) : 1;
  std::vector<double> samples(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    samples[i] = n_samples == 1 ? 0.0 : t_final * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  samples.back() = t_final;

  const double norm0 = state_norm(initial);
  const double drift_limit = 100.0 * options.tolerance;
  auto record = [&](double t, std::span<const Complex> y) {
    SingleExcitationState s = SingleExcitationState::from_flat({y.begin(), y.end()});
    const double cav = std::norm(s.cavity());
    const double qb = std::norm(s.qubit());
    const double total = state_norm(s);
    const double drift = std::abs(total - norm0);
    rec.max_norm_drift = std::max(rec.max_norm_drift, drift);
    if (!(drift <= drift_limit)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "norm drift " << drift << " exceeds 100 x tolerance at t = " << t;
      throw NumericalError(msg.str());
    }
    rec.times.push_back(t);
    rec.spin_population.push_back(total - cav - qb);
    rec.cavity_population.push_back(cav);
    rec.qubit_population.push_back(qb);
    rec.symmetric_amplitude.push_back(symmetric_amplitude(s));
    rec.symmetric_overlap.push_back(std::norm(rec.symmetric_amplitude.back()));
    rec.cavity_amplitude.push_back(s.cavity());
    rec.qubit_amplitude.push_back(s.qubit());
    if (options.keep_states) rec.states.push_back(std::move(s));
  };

  ComplexVector y = initial.flat();
  record(0.0, y);

  IntegratorOptions io;
  // Local error targets sit two decades below the requested tolerance so that
  // the global norm drift of a 100/G sweep stays near 10 x tolerance. The floor
  // keeps rtol above the roundoff level at the tightest allowed tolerance.
  io.rtol = std::max(options.tolerance * 0.01, 5e-14);
  io.atol = std::max(options.tolerance * 1e-3, 1e-16);

  const auto& segs = params.schedule.segments;
  double t = 0.0;
  for (std::size_t i = 0; i < segs.size() && t < t_final; ++i) {
    const bool last = i + 1 == segs.size();
    const double end = last ? t_final : std::min(t + segs[i].duration, t_final);
    if (end <= t) continue;
    SegmentRhs rhs(params, &segs[i], t);
    integrate_dop853(std::cref(rhs), t, end, y, samples, record, io, rec.stats);
    t = end;
  }
  if (t < t_final) {
    SegmentRhs rhs(params, nullptr, t);
    integrate_dop853(std::cref(rhs), t, t_final, y, samples, record, io, rec.stats);
  }
  rec.final_state = SingleExcitationState::from_flat(std::move(y));
  return rec;
}

EtaEstimate eta_t_estimate(double intrinsic_half_width, double spin_pulse_time) {
  if (!(intrinsic_half_width >= 0.0)) throw ConfigError("delta_IB must be >= 0");
  if (!(spin_pulse_time > 0.0)) throw ConfigError("T_S must be > 0");
  const double x = intrinsic_half_width * spin_pulse_time;
  EtaEstimate e;
  if (x > 0.0) {
    const double sinc = std::sin(x) / x;
    e.sinc2 = sinc * sinc;
  }
  e.gaussian = std::exp(-x * x / 3.0);
  return e;
}

}  // namespace crib
