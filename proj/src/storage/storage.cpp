#include "crib/storage/storage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crib/core/csv.hpp"
#include "crib/core/errors.hpp"
#include "crib/core/special_functions.hpp"

namespace crib {

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr double kQuadratureTolerance = 1e-10;

void check_depth(double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("optical_depth must be finite and >= 0");
}

}  // namespace

Complex StorageProblem::input_field(double tau) const {
  return envelope.time_domain(tau) * std::exp(Complex{0.0, -spectral_offset * tau});
}

Complex StorageProblem::input_spectrum(double xi) const { return envelope.spectrum(xi - spectral_offset); }

Complex StorageProblem::centered_input_spectrum(double xi) const {
  return envelope.centered_spectrum(xi - spectral_offset);
}

std::vector<double> coherence_grid(std::size_t n_z) {
  std::vector<double> xi(n_z);
  for (std::size_t k = 0; k < n_z; ++k) {
    xi[k] = -0.5 + static_cast<double>(k) / static_cast<double>(n_z - 1);
  }
  xi.back() = 0.5;
  return xi;
}

double default_final_time(const StorageProblem& problem) { return 10.0 * problem.envelope.pulse_duration(); }

CoherenceField solve_propagation(const StorageProblem& problem, std::size_t n_z, std::size_t n_t,
                                 std::optional<double> t_final) {
  check_depth(problem.optical_depth);
  if (n_z < 16 || n_t < 16) throw ConfigError("solve_propagation: n_z and n_t must be >= 16");
  const double pulse = problem.envelope.pulse_duration();
  const double t_end = t_final.value_or(default_final_time(problem));
  if (!(t_end >= 3.0 * pulse)) {
    std::ostringstream msg;
    msg << "solve_propagation: t_final = " << t_end << " is shorter than three pulse durations ("
        << 3.0 * pulse << ")";
    throw ConfigError(msg.str());
  }

  const double d = problem.optical_depth;
  const auto xi = coherence_grid(n_z);
  const double h = xi[1] - xi[0];
  const double dt = t_end / static_cast<double>(n_t);
  const Complex i{0.0, 1.0};
  // The medium only absorbs, so |E(xi, .)| has at most the input's L2 norm and
  // |P| <= integral |E| dtau <= sqrt(tau) |E_in|_2. Anything far above that is instability.
  const double bound = 10.0 * (1.0 + std::sqrt(t_end * problem.envelope.spectral_norm()));

  CoherenceField out;
  out.xi = xi;
  out.time = t_end;
  out.output_times.reserve(n_t + 1);
  out.output_field.reserve(n_t + 1);

  std::vector<Complex> field(n_z);
  // E(xi, tau) from E(-1/2, tau) and the trapezoidal integral of i d P.
  auto march = [&](double tau, const std::vector<Complex>& p) {
    Complex e = problem.input_field(tau);
    field[0] = e;
    for (std::size_t k = 1; k < n_z; ++k) {
      e += i * d * 0.5 * h * (p[k] + p[k - 1]);
      field[k] = e;
    }
  };
  auto rhs = [&](double tau, const std::vector<Complex>& p, std::vector<Complex>& dp) {
    march(tau, p);
    for (std::size_t k = 0; k < n_z; ++k) dp[k] = -i * xi[k] * p[k] + i * field[k];
  };

  std::vector<Complex> p(n_z, 0.0), k1(n_z), k2(n_z), k3(n_z), k4(n_z), tmp(n_z);
  march(0.0, p);
  out.output_times.push_back(0.0);
  out.output_field.push_back(field.back());
  for (std::size_t step = 0; step < n_t; ++step) {
    const double tau = dt * static_cast<double>(step);
    rhs(tau, p, k1);
    for (std::size_t k = 0; k < n_z; ++k) tmp[k] = p[k] + 0.5 * dt * k1[k];
    rhs(tau + 0.5 * dt, tmp, k2);
    for (std::size_t k = 0; k < n_z; ++k) tmp[k] = p[k] + 0.5 * dt * k2[k];
    rhs(tau + 0.5 * dt, tmp, k3);
    for (std::size_t k = 0; k < n_z; ++k) tmp[k] = p[k] + dt * k3[k];
    rhs(tau + dt, tmp, k4);
    double peak = 0.0;
    for (std::size_t k = 0; k < n_z; ++k) {
      p[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      peak = std::max(peak, std::abs(p[k]));
    }
    const double t_next = dt * static_cast<double>(step + 1);
    if (!std::isfinite(peak)) {
      std::ostringstream msg;
      msg << "solve_propagation: non-finite coherence at time step " << step + 1 << " (tau = " << t_next << ")";
      throw NumericalError(msg.str());
    }
    if (peak > bound) {
      std::ostringstream msg;
      msg << "solve_propagation: coherence blew up at time step " << step + 1 << " (tau = " << t_next
          << "); use a finer grid (larger n_t)";
      throw NumericalError(msg.str());
    }
    march(t_next, p);
    out.output_times.push_back(t_next);
    out.output_field.push_back(field.back());
  }
  out.values.resize(n_z);
  for (std::size_t k = 0; k < n_z; ++k) out.values[k] = problem.coupling * p[k];
  return out;
}

CoherenceField analytic_coherence(const StorageProblem& problem, double t, std::size_t n_z) {
  check_depth(problem.optical_depth);
  if (n_z < 2) throw ConfigError("analytic_coherence: n_z must be >= 2");
  const double s = t - problem.envelope.center();
  if (!(s > 0.0)) throw ConfigError("analytic_coherence: t must lie after the pulse centre");
  const double d = problem.optical_depth;
  const Complex i{0.0, 1.0};
  const Complex inv_d_gamma = -i / gamma(Complex{1.0, -d});
  const Complex prefactor = -problem.coupling * std::exp(-std::numbers::pi * d / 2.0) *
                            std::exp(-i * d * std::log(s / 2.0)) * inv_d_gamma *
                            std::sqrt(2.0 * std::numbers::pi);
  CoherenceField out;
  out.xi = coherence_grid(n_z);
  out.time = t;
  out.early_time = s < problem.envelope.pulse_duration();
  out.values.resize(n_z);
  for (std::size_t k = 0; k < n_z; ++k) {
    const double x = out.xi[k];
    out.values[k] = prefactor * std::exp(-i * x * t) * problem.input_spectrum(x);
  }
  return out;
}

double relative_l2_distance(const CoherenceField& a, const CoherenceField& b) {
  if (a.values.size() != b.values.size()) throw ConfigError("relative_l2_distance: grid mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    num += std::norm(a.values[k] - b.values[k]);
    den += std::norm(b.values[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double storage_prefactor(double optical_depth) {
  check_depth(optical_depth);
  return -std::expm1(-2.0 * std::numbers::pi * optical_depth);
}

double storage_efficiency(const StorageProblem& problem) {
  const double prefactor = storage_prefactor(problem.optical_depth);
  const double norm = problem.envelope.spectral_norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "storage_efficiency: envelope is not normalized (spectral norm = " << norm << ")";
    throw ConfigError(msg.str());
  }
  if (prefactor == 0.0) return 0.0;

  std::vector<double> cuts{-0.5};
  for (double b : problem.envelope.spectral_breakpoints()) {
    const double x = b + problem.spectral_offset;
    if (x > -0.5 && x < 0.5) cuts.push_back(x);
  }
  cuts.push_back(0.5);
  std::sort(cuts.begin(), cuts.end());

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  double re = 0.0, im = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k] <= cuts[k - 1]) continue;
    double err_re = 0.0, err_im = 0.0;
    re += Quadrature::integrate([&](double x) { return problem.centered_input_spectrum(x).real(); },
                                cuts[k - 1], cuts[k], 15, 1e-13, &err_re);
    im += Quadrature::integrate([&](double x) { return problem.centered_input_spectrum(x).imag(); },
                                cuts[k - 1], cuts[k], 15, 1e-13, &err_im);
    if (err_re > kQuadratureTolerance || err_im > kQuadratureTolerance) {
      throw NumericalError("storage_efficiency: quadrature did not reach the 1e-10 tolerance");
    }
  }
  return prefactor * (re * re + im * im);
}

ScalarOptimum optimize_envelope_width(const StorageProblem& problem, double lo, double hi,
                                      const MaximizeOptions& options) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("optimize_envelope_width: need 0 < lo <= hi");
  StorageProblem trial = problem;
  auto objective = [&](double w) {
    trial.envelope = problem.envelope.with_bandwidth(w);
    return storage_efficiency(trial);
  };
  return maximize_scalar(objective, lo, hi, options);
}

void write_coherence_csv(std::ostream& out, const CoherenceField& field) {
  out << "xi,re,im\n";
  for (std::size_t k = 0; k < field.xi.size(); ++k) {
    out << format_double(field.xi[k]) << ',' << format_double(field.values[k].real()) << ','
        << format_double(field.values[k].imag()) << '\n';
  }
}

}  // namespace crib
