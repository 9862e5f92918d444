#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace crib {

enum class DetuningProfile { UniformGrid, UniformRandom, Lorentzian };

std::string_view to_string(DetuningProfile profile);
std::optional<DetuningProfile> parse_detuning_profile(std::string_view name);

/// Symmetric set of n detunings with the given half-width.
///
/// UniformGrid places n equally spaced points on [-half_width, +half_width].
/// The random profiles draw n/2 values and mirror them (plus a zero for odd n),
/// so the output is symmetric for every seed. For Lorentzian, half_width is
/// the HWHM and draws are clipped to +-kLorentzianClip * half_width.
std::vector<double> build_detuning_grid(double half_width, std::size_t n, DetuningProfile profile,
                                        std::uint64_t seed = 0);

inline constexpr double kLorentzianClip = 50.0;

/// Stride used to pair intrinsic detunings with induced (positional) ones:
/// the integer closest to n / golden ratio that is coprime with n.
std::size_t golden_stride(std::size_t n);

/// Reorders values so that out[j] = values[(j * stride) % n], breaking any
/// correlation with a second grid that is sorted by position.
std::vector<double> decorrelate(const std::vector<double>& values);

}  // namespace crib
