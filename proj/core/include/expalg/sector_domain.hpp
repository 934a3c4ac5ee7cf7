#pragma once

// Sector domains near a direction point [0:c_1:...:c_n] at infinity: a
// polydisc in the ratios z_i / z_l with an argument window on the chart
// coordinate z_l.

#include <cstddef>
#include <optional>

#include "expalg/complex_core.hpp"
#include "expalg/problem_spec.hpp"

namespace expalg {

/// Default width reduction of the arg window below a full turn.
inline constexpr double kDefaultWindowMargin = 0.2;

class SectorDomain {
 public:
  /// `c` is normalised so that c[chart] = 1. Throws ValidationError for an
  /// empty window, nonpositive epsilon or c[chart] = 0.
  SectorDomain(CVec c, std::size_t chart, double epsilon, double theta, double eta);

  /// Domain for a group signature: epsilon is reduced to
  /// min(epsilon, 1/2 * min |c_i|, 1/2 * min 1/|c_i|) over torus factors, and a
  /// torus factor with c_i = 0 is rejected.
  static SectorDomain for_signature(const GroupSignature& sig, CVec c, std::size_t chart, double epsilon,
                                    double theta, double eta);

  const CVec& direction() const noexcept { return c_; }
  std::size_t chart() const noexcept { return chart_; }
  std::size_t dimension() const noexcept { return c_.size(); }
  double epsilon() const noexcept { return epsilon_; }
  double theta() const noexcept { return theta_; }
  double eta() const noexcept { return eta_; }
  double inner_radius() const noexcept { return 1.0 / epsilon_; }

  bool contains(const CVec& z) const;

  /// The branch of arg(w) lying in (theta, eta), if any.
  std::optional<double> chart_arg(Complex w) const;

  /// The point with z_l = r e^{i phi} and z_i = c_i z_l.
  CVec on_ray(double r, double phi) const;

  /// Same domain with epsilon replaced.
  SectorDomain with_epsilon(double epsilon) const { return {c_, chart_, epsilon, theta_, eta_}; }
  /// Same domain with the window rotated by `turns` full turns.
  SectorDomain rotated(int turns) const;

 private:
  CVec c_;
  std::size_t chart_;
  double epsilon_;
  double theta_;
  double eta_;
};

/// The epsilon actually used for a signature and direction point.
double effective_epsilon(const GroupSignature& sig, const CVec& c, double epsilon);

}  // namespace expalg
