#pragma once

#include <span>

#include "crib/core/types.hpp"

namespace crib {

/// Sum of |amplitude|^2 over spins, cavity and qubit.
double state_norm(const SingleExcitationState& state);

/// |sum_j xi_j / sqrt(N)|^2: population of the cavity-coupled Dicke mode.
double symmetric_overlap(const SingleExcitationState& state);

/// sum_j xi_j / sqrt(N)
Complex symmetric_amplitude(const SingleExcitationState& state);

/// |<pattern|spins>|^2 for a spin-only pattern of the same length.
double spin_overlap(std::span<const Complex> pattern, const SingleExcitationState& state);

}  // namespace crib
