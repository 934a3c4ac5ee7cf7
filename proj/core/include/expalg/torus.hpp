#pragma once

// Exponential and anchored logarithm for algebraic-torus factors.

#include <span>
#include <vector>

#include "expalg/complex_core.hpp"

namespace expalg {

/// Period of exp on each torus coordinate: 2*pi*i.
inline constexpr Complex kTorusPeriod{0.0, kTwoPi};

/// Coordinate-wise e^z. Throws Overflow when some Re(z_i) leaves the range
/// where e^z is a finite nonzero double.
CVec torus_exp(const CVec& z);
Complex torus_exp(Complex z);

/// log|w| + i arg(w) + 2*pi*i*k with k chosen so the result is nearest to
/// `anchor`. Throws std::invalid_argument for w = 0.
Complex torus_log_near(Complex w, Complex anchor);

/// One observation for the growth bound |z|^-q < |alpha_i(z)| < |z|^q.
struct GrowthSample {
  double z_norm;      ///< |z|, must exceed 1
  double alpha_abs;   ///< |alpha_i(z)|
};

/// Smallest integer exponents q_i (and their maximum) consistent with the
/// samples, one entry per torus coordinate.
struct GrowthExponent {
  std::vector<int> q;
  int q_max = 0;
};

GrowthExponent fit_growth_exponent(std::span<const std::vector<GrowthSample>> per_coordinate);

}  // namespace expalg
