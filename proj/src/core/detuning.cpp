#include "crib/core/detuning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "crib/core/errors.hpp"

namespace crib {

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// the conversion to [0, 1) is done here to keep draws portable.
double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(DetuningProfile profile) {
  switch (profile) {
    case DetuningProfile::UniformGrid:
      return "uniform-grid";
    case DetuningProfile::UniformRandom:
      return "uniform-random";
    case DetuningProfile::Lorentzian:
      return "lorentzian";
  }
  return "unknown";
}

std::optional<DetuningProfile> parse_detuning_profile(std::string_view name) {
  if (name == "uniform-grid") return DetuningProfile::UniformGrid;
  if (name == "uniform-random") return DetuningProfile::UniformRandom;
  if (name == "lorentzian") return DetuningProfile::Lorentzian;
  return std::nullopt;
}

std::vector<double> build_detuning_grid(double half_width, std::size_t n, DetuningProfile profile,
                                        std::uint64_t seed) {
  if (n == 0) throw ConfigError("build_detuning_grid: n must be at least 1");
  if (!(half_width >= 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("build_detuning_grid: half_width must be finite and >= 0");
  }
  std::vector<double> out(n, 0.0);
  if (half_width == 0.0) return out;

  if (profile == DetuningProfile::UniformGrid) {
    if (n == 1) return out;
    const double step = 2.0 * half_width / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = -half_width + step * static_cast<double>(j);
    }
    // exact antisymmetry, independent of rounding in the step
    for (std::size_t j = 0; j < n / 2; ++j) out[n - 1 - j] = -out[j];
    if (n % 2 == 1) out[n / 2] = 0.0;
    return out;
  }

  std::mt19937_64 engine(seed);
  const std::size_t half = n / 2;
  std::vector<double> draws(half);
  for (auto& x : draws) {
    const double u = unit_uniform(engine);
    if (profile == DetuningProfile::UniformRandom) {
      x = half_width * u;
    } else {
      x = std::min(half_width * std::tan(0.5 * std::numbers::pi * u), kLorentzianClip * half_width);
    }
  }
  std::sort(draws.begin(), draws.end());
  // mirrored: [-d_half..-d_1, (0), d_1..d_half]
  for (std::size_t j = 0; j < half; ++j) {
    out[half - 1 - j] = -draws[j];
    out[n - half + j] = draws[j];
  }
  return out;
}

std::size_t golden_stride(std::size_t n) {
  if (n <= 2) return 1;
  auto s = static_cast<std::size_t>(std::llround(static_cast<double>(n) / std::numbers::phi));
  s = std::max<std::size_t>(s, 1);
  while (std::gcd(s, n) != 1) ++s;
  return s;
}

std::vector<double> decorrelate(const std::vector<double>& values) {
  const std::size_t n = values.size();
  const std::size_t stride = golden_stride(n);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = values[(j * stride) % n];
  return out;
}

}  // namespace crib
