#include "crib/storage/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crib/core/csv.hpp"
#include "crib/core/errors.hpp"

namespace crib {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// sinc(x)^2 = 1/2 at x = 1.3915573782515103.
constexpr double kSincHalfPower = 1.3915573782515103;

double gaussian_sigma(double bandwidth) { return bandwidth / 4.0; }

double gaussian_fwhm(double bandwidth) {
  return 2.0 * std::sqrt(std::log(2.0) / 2.0) / gaussian_sigma(bandwidth);
}

double flat_fwhm(double width) { return 4.0 * kSincHalfPower / width; }

// integral_0^1 u^k exp(i theta u) du for k = 0, 1.
std::pair<Complex, Complex> phase_moments(double theta) {
  const Complex i{0.0, 1.0};
  if (std::abs(theta) < 1e-3) {
    const double t2 = theta * theta;
    const Complex m0 = 1.0 + i * theta / 2.0 - t2 / 6.0 - i * theta * t2 / 24.0;
    const Complex m1 = 0.5 + i * theta / 3.0 - t2 / 8.0 - i * theta * t2 / 30.0;
    return {m0, m1};
  }
  const Complex e = std::exp(i * theta);
  const Complex m0 = (e - 1.0) / (i * theta);
  const Complex m1 = e / (i * theta) + (e - 1.0) / (theta * theta);
  return {m0, m1};
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite and > 0");
}

}  // namespace

std::string_view to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::Gaussian: return "gaussian";
    case EnvelopeKind::FlatSpectrum: return "flat-spectrum";
    case EnvelopeKind::Table: return "table";
  }
  return "gaussian";
}

std::optional<EnvelopeKind> parse_envelope_kind(std::string_view name) {
  if (name == "gaussian") return EnvelopeKind::Gaussian;
  if (name == "flat-spectrum" || name == "flat") return EnvelopeKind::FlatSpectrum;
  if (name == "table") return EnvelopeKind::Table;
  return std::nullopt;
}

Envelope Envelope::gaussian(double bandwidth, double carrier, std::optional<double> center) {
  check_positive(bandwidth, "gaussian bandwidth");
  Envelope e;
  e.kind_ = EnvelopeKind::Gaussian;
  e.bandwidth_ = bandwidth;
  e.carrier_ = carrier;
  e.explicit_center_ = center.has_value();
  e.center_ = center.value_or(2.0 * gaussian_fwhm(bandwidth));
  return e;
}

Envelope Envelope::flat_spectrum(double width, double carrier, std::optional<double> center) {
  check_positive(width, "flat-spectrum width");
  Envelope e;
  e.kind_ = EnvelopeKind::FlatSpectrum;
  e.bandwidth_ = width;
  e.carrier_ = carrier;
  e.explicit_center_ = center.has_value();
  e.center_ = center.value_or(2.0 * flat_fwhm(width));
  return e;
}

Envelope Envelope::table(std::vector<double> times, std::vector<Complex> values) {
  if (times.size() != values.size()) throw ConfigError("envelope table: time/value count mismatch");
  if (times.size() < 2) throw ConfigError("envelope table: need at least two samples");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ConfigError("envelope table: times must be strictly increasing (row " + std::to_string(i + 1) + ")");
    }
  }
  Envelope e;
  e.kind_ = EnvelopeKind::Table;
  e.times_ = std::move(times);
  e.values_ = std::move(values);
  double weight = 0.0, moment = 0.0;
  for (std::size_t i = 1; i < e.times_.size(); ++i) {
    const double h = e.times_[i] - e.times_[i - 1];
    const double w = 0.5 * h * (std::norm(e.values_[i]) + std::norm(e.values_[i - 1]));
    weight += w;
    moment += w * 0.5 * (e.times_[i] + e.times_[i - 1]);
  }
  e.center_ = weight > 0.0 ? moment / weight : e.times_.front();
  e.explicit_center_ = true;
  e.bandwidth_ = 0.0;
  return e;
}

Envelope Envelope::read_csv(std::istream& in) {
  const CsvTable t = read_numeric_csv(in);
  if (t.header != std::vector<std::string>{"time", "re", "im"}) {
    throw ConfigError("envelope table: expected header time,re,im");
  }
  std::vector<double> times;
  std::vector<Complex> values;
  for (const auto& row : t.rows) {
    times.push_back(row[0]);
    values.emplace_back(row[1], row[2]);
  }
  return table(std::move(times), std::move(values));
}

Envelope Envelope::with_bandwidth(double bandwidth) const {
  std::optional<double> c;
  if (explicit_center_) c = center_;
  switch (kind_) {
    case EnvelopeKind::Gaussian: return gaussian(bandwidth, carrier_, c);
    case EnvelopeKind::FlatSpectrum: return flat_spectrum(bandwidth, carrier_, c);
    case EnvelopeKind::Table: break;
  }
  throw ConfigError("a table envelope has no adjustable bandwidth");
}

Envelope Envelope::normalized() const {
  const double n = spectral_norm();
  if (!(n > 0.0)) throw ConfigError("cannot normalize an envelope with zero norm");
  Envelope e = *this;
  e.scale_ = scale_ / std::sqrt(n);
  return e;
}

Complex Envelope::time_domain(double tau) const {
  const Complex i{0.0, 1.0};
  const double s = tau - center_;
  switch (kind_) {
    case EnvelopeKind::Gaussian: {
      const double sigma = gaussian_sigma(bandwidth_);
      const double a = std::pow(kTwoPi * sigma * sigma, -0.25);
      const double mag = a * 2.0 * sigma * std::sqrt(std::numbers::pi) / std::sqrt(kTwoPi);
      return scale_ * mag * std::exp(-sigma * sigma * s * s) * std::exp(-i * carrier_ * s);
    }
    case EnvelopeKind::FlatSpectrum: {
      const double x = 0.5 * bandwidth_ * s;
      const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      return scale_ * std::sqrt(bandwidth_ / kTwoPi) * sinc * std::exp(-i * carrier_ * s);
    }
    case EnvelopeKind::Table: {
      if (tau < times_.front() || tau > times_.back()) return 0.0;
      auto it = std::upper_bound(times_.begin(), times_.end(), tau);
      if (it == times_.end()) return scale_ * values_.back();
      const std::size_t k = static_cast<std::size_t>(it - times_.begin());
      const double u = (tau - times_[k - 1]) / (times_[k] - times_[k - 1]);
      return scale_ * (values_[k - 1] + u * (values_[k] - values_[k - 1]));
    }
  }
  return 0.0;
}

Complex Envelope::centered_spectrum(double nu) const {
  switch (kind_) {
    case EnvelopeKind::Gaussian: {
      const double sigma = gaussian_sigma(bandwidth_);
      const double a = std::pow(kTwoPi * sigma * sigma, -0.25);
      const double x = nu - carrier_;
      return scale_ * a * std::exp(-x * x / (4.0 * sigma * sigma));
    }
    case EnvelopeKind::FlatSpectrum:
      return std::abs(nu - carrier_) <= 0.5 * bandwidth_ ? scale_ / std::sqrt(bandwidth_) : 0.0;
    case EnvelopeKind::Table:
      return spectrum(nu) * std::exp(Complex{0.0, -nu * center_});
  }
  return 0.0;
}

Complex Envelope::spectrum(double nu) const {
  if (kind_ != EnvelopeKind::Table) return centered_spectrum(nu) * std::exp(Complex{0.0, nu * center_});
  // Exact transform of the piecewise-linear interpolant.
  Complex acc = 0.0;
  for (std::size_t k = 1; k < times_.size(); ++k) {
    const double h = times_[k] - times_[k - 1];
    const auto [m0, m1] = phase_moments(nu * h);
    const Complex e0 = values_[k - 1];
    const Complex de = values_[k] - values_[k - 1];
    acc += h * std::exp(Complex{0.0, nu * times_[k - 1]}) * (e0 * m0 + de * m1);
  }
  return scale_ * acc / std::sqrt(kTwoPi);
}

double Envelope::pulse_duration() const {
  switch (kind_) {
    case EnvelopeKind::Gaussian: return gaussian_fwhm(bandwidth_);
    case EnvelopeKind::FlatSpectrum: return flat_fwhm(bandwidth_);
    case EnvelopeKind::Table: break;
  }
  double peak = 0.0;
  for (const auto& v : values_) peak = std::max(peak, std::norm(v));
  if (peak == 0.0) return 0.0;
  const double half = 0.5 * peak;
  auto crossing = [&](std::size_t a, std::size_t b) {
    const double ya = std::norm(values_[a]), yb = std::norm(values_[b]);
    if (ya == yb) return times_[a];
    return times_[a] + (half - ya) * (times_[b] - times_[a]) / (yb - ya);
  };
  std::size_t first = 0;
  while (std::norm(values_[first]) < half) ++first;
  std::size_t last = values_.size() - 1;
  while (std::norm(values_[last]) < half) --last;
  const double t0 = first == 0 ? times_.front() : crossing(first - 1, first);
  const double t1 = last + 1 == values_.size() ? times_.back() : crossing(last, last + 1);
  return t1 - t0;
}

double Envelope::spectral_norm() const {
  switch (kind_) {
    case EnvelopeKind::Gaussian:
    case EnvelopeKind::FlatSpectrum:
      return scale_ * scale_;
    case EnvelopeKind::Table: break;
  }
  double total = 0.0;
  for (std::size_t k = 1; k < times_.size(); ++k) {
    const double h = times_[k] - times_[k - 1];
    const Complex a = values_[k - 1], b = values_[k];
    total += h / 3.0 * (std::norm(a) + (a * std::conj(b)).real() + std::norm(b));
  }
  return scale_ * scale_ * total;
}

double Envelope::time_l1_norm() const {
  switch (kind_) {
    case EnvelopeKind::Gaussian: {
      const double sigma = gaussian_sigma(bandwidth_);
      const double a = std::pow(kTwoPi * sigma * sigma, -0.25);
      return scale_ * a * std::sqrt(kTwoPi);
    }
    case EnvelopeKind::FlatSpectrum:
      // The sinc tail is not absolutely integrable; bound a generous window.
      return scale_ * std::sqrt(bandwidth_ / kTwoPi) * 4.0 / bandwidth_ * (1.0 + std::log(1e4));
    case EnvelopeKind::Table: break;
  }
  double total = 0.0;
  for (std::size_t k = 1; k < times_.size(); ++k) {
    total += 0.5 * (times_[k] - times_[k - 1]) * (std::abs(values_[k]) + std::abs(values_[k - 1]));
  }
  return scale_ * total;
}

std::vector<double> Envelope::spectral_breakpoints() const {
  if (kind_ == EnvelopeKind::FlatSpectrum) {
    return {carrier_ - 0.5 * bandwidth_, carrier_ + 0.5 * bandwidth_};
  }
  return {};
}

}  // namespace crib
