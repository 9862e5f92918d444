#pragma once

#include "crib/core/types.hpp"

namespace crib {

/// Principal-branch-free complex log-gamma (Lanczos, g = 7, 9 terms), with
/// the reflection formula for Re(z) < 1/2. exp(log_gamma(z)) is Gamma(z);
/// the imaginary part is only defined modulo 2*pi.
Complex log_gamma(Complex z);

Complex gamma(Complex z);

}  // namespace crib
