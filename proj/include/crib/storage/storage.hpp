#pragma once

// Storage stage in dimensionless units: xi = z/L in [-1/2, 1/2] and
// tau = alpha L t. With P_n the coherence divided by the coupling,
//
//   dP_n/dtau = -i xi P_n + i E,     dE/dxi = i d P_n,
//
// where d is the optical depth and E(-1/2, tau) is the input envelope.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "crib/core/scalar_optimize.hpp"
#include "crib/core/types.hpp"
#include "crib/storage/envelope.hpp"

namespace crib {

struct StorageProblem {
  Envelope envelope = Envelope::gaussian(0.5);
  double optical_depth = 1.0;
  double coupling = 1.0;
  /// Shifts the input carrier away from the window centre.
  double spectral_offset = 0.0;

  Complex input_field(double tau) const;
  /// Spectrum of the input, including the offset and the pulse-centre phase.
  Complex input_spectrum(double xi) const;
  /// Same without the pulse-centre phase.
  Complex centered_input_spectrum(double xi) const;
};

struct CoherenceField {
  std::vector<double> xi;
  std::vector<Complex> values;
  double time = 0.0;
  /// Set when the analytic form is evaluated less than one pulse duration
  /// after the pulse centre, where it is not valid.
  bool early_time = false;
  /// Field leaving the medium (xi = 1/2), one entry per time step.
  std::vector<double> output_times;
  std::vector<Complex> output_field;
};

/// xi grid with n points spanning exactly [-1/2, 1/2].
std::vector<double> coherence_grid(std::size_t n_z);

/// Ten pulse durations.
double default_final_time(const StorageProblem& problem);

/// Trapezoidal marching of E in xi, classical RK4 for P in tau, from tau = 0
/// with P = 0. Throws ConfigError for n_z or n_t < 16 or t_final below three
/// pulse durations; NumericalError on non-finite or runaway values.
CoherenceField solve_propagation(const StorageProblem& problem, std::size_t n_z = 512,
                                 std::size_t n_t = 4096, std::optional<double> t_final = std::nullopt);

/// Long-time closed form
///   P = -g exp(-pi d/2) exp(-i d ln(s/2)) / (d Gamma(-i d)) exp(-i xi t) sqrt(2 pi) Ebar(xi)
/// with s = t minus the pulse centre. 1/(d Gamma(-i d)) is evaluated as
/// -i/Gamma(1 - i d), which is regular at d = 0.
CoherenceField analytic_coherence(const StorageProblem& problem, double t, std::size_t n_z = 512);

/// |a - b|_2 / |b|_2 on a shared grid.
double relative_l2_distance(const CoherenceField& a, const CoherenceField& b);

/// 1 - exp(-2 pi d)
double storage_prefactor(double optical_depth);

/// (1 - exp(-2 pi d)) |integral_{-1/2}^{1/2} Ebar(xi) dxi|^2 by adaptive
/// Gauss-Kronrod quadrature. The envelope must have unit norm (to 1e-6);
/// otherwise ConfigError reports the computed norm.
double storage_efficiency(const StorageProblem& problem);

/// Maximizes storage_efficiency over the envelope bandwidth in [lo, hi].
ScalarOptimum optimize_envelope_width(const StorageProblem& problem, double lo, double hi,
                                      const MaximizeOptions& options = {});

/// Header `xi,re,im`.
void write_coherence_csv(std::ostream& out, const CoherenceField& field);

}  // namespace crib
