#pragma once

// Input photon envelopes at the entrance of the medium. Time is dimensionless
// (tau = alpha L t) and frequency is measured in units of the induced
// bandwidth alpha L, so the absorption window is [-1/2, 1/2].
//
// Fourier convention: Ebar(nu) = (2 pi)^(-1/2) * integral E(tau) exp(i nu tau) dtau.
// With unit spectral norm the time-domain norm is 1 as well.

#include <istream>
#include <optional>
#include <string_view>
#include <vector>

#include "crib/core/types.hpp"

namespace crib {

enum class EnvelopeKind { Gaussian, FlatSpectrum, Table };

std::string_view to_string(EnvelopeKind kind);
std::optional<EnvelopeKind> parse_envelope_kind(std::string_view name);

class Envelope {
 public:
  /// Gaussian spectrum of full width `bandwidth` = 4 sigma (sigma being the
  /// spectral amplitude's standard deviation), centred on `carrier`. The
  /// pulse centre defaults to two intensity FWHM after tau = 0.
  static Envelope gaussian(double bandwidth, double carrier = 0.0,
                           std::optional<double> center = std::nullopt);
  /// Ebar = 1/sqrt(width) on [carrier - width/2, carrier + width/2].
  static Envelope flat_spectrum(double width, double carrier = 0.0,
                                std::optional<double> center = std::nullopt);
  /// Samples of E(tau), linearly interpolated and zero outside the table.
  static Envelope table(std::vector<double> times, std::vector<Complex> values);
  /// Reads `time,re,im` rows (header required).
  static Envelope read_csv(std::istream& in);

  EnvelopeKind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  double carrier() const { return carrier_; }
  double center() const { return center_; }
  bool has_explicit_center() const { return explicit_center_; }
  const std::vector<double>& table_times() const { return times_; }
  const std::vector<Complex>& table_values() const { return values_; }

  /// Same family with a new bandwidth; a default centre follows the new width.
  Envelope with_bandwidth(double bandwidth) const;
  /// Rescaled to unit norm.
  Envelope normalized() const;

  Complex time_domain(double tau) const;
  Complex spectrum(double nu) const;
  /// Spectrum with the linear phase of the pulse centre removed.
  Complex centered_spectrum(double nu) const;

  /// Intensity FWHM of |E(tau)|^2.
  double pulse_duration() const;
  /// integral |Ebar|^2 dnu over the real line.
  double spectral_norm() const;
  /// integral |E(tau)| dtau, used to bound the coherence during integration.
  double time_l1_norm() const;
  /// Frequencies where the spectrum has kinks or jumps.
  std::vector<double> spectral_breakpoints() const;

 private:
  EnvelopeKind kind_ = EnvelopeKind::Gaussian;
  double bandwidth_ = 0.5;
  double carrier_ = 0.0;
  double center_ = 0.0;
  bool explicit_center_ = false;
  double scale_ = 1.0;
  std::vector<double> times_;
  std::vector<Complex> values_;
};

}  // namespace crib
