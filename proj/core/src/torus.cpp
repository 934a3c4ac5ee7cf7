#include "expalg/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "expalg/errors.hpp"

namespace expalg {

namespace {
// e^x is a finite normal double for x in this range.
const double kExpMax = std::log(std::numeric_limits<double>::max());
const double kExpMin = std::log(std::numeric_limits<double>::min());
}  // namespace

Complex torus_exp(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Overflow("torus_exp: non-finite argument");
  if (z.real() >= kExpMax || z.real() <= kExpMin) {
    throw Overflow("torus_exp: Re(z) = " + std::to_string(z.real()) + " outside the double exponent range");
  }
  return std::exp(z);
}

CVec torus_exp(const CVec& z) {
  CVec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = torus_exp(z[i]);
  return out;
}

Complex torus_log_near(Complex w, Complex anchor) {
  if (w == Complex{}) throw std::invalid_argument("torus_log_near: w must be nonzero");
  const Complex principal = std::log(w);
  const double k = std::round((anchor.imag() - principal.imag()) / kTwoPi);
  return principal + Complex(0.0, kTwoPi * k);
}

GrowthExponent fit_growth_exponent(std::span<const std::vector<GrowthSample>> per_coordinate) {
  GrowthExponent out;
  for (const auto& samples : per_coordinate) {
    double ratio = 0.0;
    for (const auto& s : samples) {
      if (!(s.z_norm > 1.0) || !(s.alpha_abs > 0.0)) {
        throw std::invalid_argument("fit_growth_exponent: need |z| > 1 and alpha != 0");
      }
      ratio = std::max(ratio, std::abs(std::log(s.alpha_abs)) / std::log(s.z_norm));
    }
    // Strict inequality: q must exceed the observed ratio. The log ratio can
    // round just below an integer, so confirm on the samples themselves.
    int q = std::max(1, static_cast<int>(std::floor(ratio)) + 1);
    auto strict = [&](int e) {
      return std::all_of(samples.begin(), samples.end(), [&](const GrowthSample& s) {
        return s.alpha_abs < std::pow(s.z_norm, e) && s.alpha_abs > std::pow(s.z_norm, -e);
      });
    };
    while (!strict(q)) ++q;
    out.q.push_back(q);
    out.q_max = std::max(out.q_max, q);
  }
  return out;
}

}  // namespace expalg
