#include "expalg/sector_domain.hpp"

#include <algorithm>
#include <cmath>

#include "expalg/errors.hpp"

namespace expalg {

SectorDomain::SectorDomain(CVec c, std::size_t chart, double epsilon, double theta, double eta)
    : c_(std::move(c)), chart_(chart), epsilon_(epsilon), theta_(theta), eta_(eta) {
  if (c_.empty()) throw ValidationError("direction point must have at least one coordinate");
  if (chart_ >= c_.size()) throw ValidationError("chart index out of range");
  if (!c_.all_finite()) throw ValidationError("direction point must be finite");
  const Complex lead = c_[chart_];
  if (std::abs(lead) == 0.0) throw ValidationError("direction point has c_l = 0 on the chart coordinate");
  for (auto& ci : c_) ci /= lead;
  c_[chart_] = 1.0;
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw ValidationError("epsilon must be positive");
  if (!(theta_ < eta_) || eta_ > theta_ + kTwoPi) {
    throw ValidationError("arg window needs theta < eta <= theta + 2 pi");
  }
}

double effective_epsilon(const GroupSignature& sig, const CVec& c, double epsilon) {
  if (c.size() != sig.dimension()) throw ValidationError("direction point has the wrong dimension");
  double eps = epsilon;
  for (std::size_t k = 0; k < sig.dimension(); ++k) {
    if (!sig.is_torus(k)) continue;
    const double m = std::abs(c[k]);
    if (m == 0.0) {
      throw ValidationError("degenerate direction: c_" + std::to_string(k + 1) +
                            " = 0 on a torus factor (no lattice points along this direction)");
    }
    eps = std::min(eps, 0.5 * std::min(m, 1.0 / m));
  }
  return eps;
}

SectorDomain SectorDomain::for_signature(const GroupSignature& sig, CVec c, std::size_t chart, double epsilon,
                                         double theta, double eta) {
  if (chart >= c.size() || std::abs(c[chart]) == 0.0) {
    throw ValidationError("direction point has c_l = 0 on the chart coordinate");
  }
  const Complex lead = c[chart];
  for (auto& ci : c) ci /= lead;
  const double eps = effective_epsilon(sig, c, epsilon);
  return {std::move(c), chart, eps, theta, eta};
}

std::optional<double> SectorDomain::chart_arg(Complex w) const {
  if (w == Complex{}) return std::nullopt;
  double a = std::arg(w);
  a += kTwoPi * std::ceil((theta_ - a) / kTwoPi);
  if (a <= theta_) a += kTwoPi;
  if (a < eta_) return a;
  return std::nullopt;
}

bool SectorDomain::contains(const CVec& z) const {
  if (z.size() != c_.size() || !z.all_finite()) return false;
  const Complex zl = z[chart_];
  if (!(std::abs(zl) > inner_radius())) return false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i == chart_) continue;
    if (!(std::abs(z[i] / zl - c_[i]) < epsilon_)) return false;
  }
  return chart_arg(zl).has_value();
}

CVec SectorDomain::on_ray(double r, double phi) const {
  const Complex zl = std::polar(r, phi);
  CVec z(c_.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = c_[i] * zl;
  return z;
}

SectorDomain SectorDomain::rotated(int turns) const {
  return {c_, chart_, epsilon_, theta_ + kTwoPi * turns, eta_ + kTwoPi * turns};
}

}  // namespace expalg
