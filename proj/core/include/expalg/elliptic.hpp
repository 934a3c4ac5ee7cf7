#pragma once

// Period lattices, Weierstrass p and p', and the exponential / logarithm of a
// complex elliptic curve  y^2 = 4x^3 - g2 x - g3.

#include <cstdint>
#include <utility>
#include <vector>

#include "expalg/complex_core.hpp"

namespace expalg {

/// Period lattice Z*omega1 + Z*omega2 with Im(omega2/omega1) > 0.
class Lattice {
 public:
  /// Throws std::invalid_argument on a degenerate or wrongly oriented basis.
  Lattice(Complex omega1, Complex omega2);

  Complex omega1() const noexcept { return omega1_; }
  Complex omega2() const noexcept { return omega2_; }

  struct Coords {
    double s;
    double t;
  };

  /// Real coordinates of z in the (omega1, omega2) basis.
  Coords basis_coords(Complex z) const noexcept;
  Complex point(double s, double t) const noexcept { return s * omega1_ + t * omega2_; }

  /// Lagrange-Gauss reduced basis of the same lattice: |b1| <= |b2| and
  /// |Re(b2 / b1)| <= 1/2.
  std::pair<Complex, Complex> reduced_basis() const noexcept { return {reduced1_, reduced2_}; }

  /// Nearest lattice point to z.
  Complex nearest_point(Complex z) const noexcept;

  /// Shortest nonzero lattice vector length.
  double min_gap() const noexcept { return std::abs(reduced1_); }

  /// Area of a fundamental cell.
  double covolume() const noexcept;

  bool operator==(const Lattice& other) const noexcept {
    return omega1_ == other.omega1_ && omega2_ == other.omega2_;
  }

 private:
  Complex omega1_;
  Complex omega2_;
  Complex reduced1_;
  Complex reduced2_;
};

/// z = representative + lattice_part with lattice_part = m*omega1 + n*omega2
/// and representative in the half-open cell  -1/2 < s, t <= 1/2.
struct LatticeReduction {
  Complex representative;
  Complex lattice_part;
  std::int64_t m;
  std::int64_t n;
};

LatticeReduction reduce_mod_lattice(Complex z, const Lattice& lat);

/// The half-open cell {s*omega1 + t*omega2 : -1/2 < s, t <= 1/2}.
struct FundamentalDomain {
  Lattice lattice;

  bool contains(Complex z) const noexcept;
  /// Corners, counter-clockwise from (-1/2, -1/2).
  std::vector<Complex> corners() const;
};

struct Invariants {
  Complex g2;
  Complex g3;
};

/// g2 = 60 * sum' lambda^-4 and g3 = 140 * sum' lambda^-6.
Invariants eisenstein_invariants(const Lattice& lat);

/// A point of the projective curve: the identity O = [0:0:1] or an affine
/// point (x, y).
class EPoint {
 public:
  static EPoint identity() noexcept { return EPoint(); }
  static EPoint affine(Complex x, Complex y) noexcept { return EPoint(x, y); }

  bool is_identity() const noexcept { return identity_; }
  Complex x() const noexcept { return x_; }
  Complex y() const noexcept { return y_; }

  bool operator==(const EPoint&) const = default;

 private:
  EPoint() = default;
  EPoint(Complex x, Complex y) : identity_(false), x_(x), y_(y) {}

  bool identity_ = true;
  Complex x_{};
  Complex y_{};
};

/// Chordal (Fubini-Study) distance between [1:x:y] representatives in P^2.
/// Bounded by 1 and continuous through the identity.
double point_distance(const EPoint& a, const EPoint& b) noexcept;

/// Curve with its lattice, invariants and the data needed to evaluate p.
class EllipticCurve {
 public:
  explicit EllipticCurve(const Lattice& lattice);

  const Lattice& lattice() const noexcept { return lattice_; }
  Complex g2() const noexcept { return g2_; }
  Complex g3() const noexcept { return g3_; }
  Complex discriminant() const noexcept { return g2_ * g2_ * g2_ - 27.0 * g3_ * g3_; }

  /// (p(z), p'(z)). Throws PoleAtLatticePoint when dist(z, lattice) < 1e-8 |omega1|.
  std::pair<Complex, Complex> wp_and_prime(Complex z) const;

  /// |y^2 - (4x^3 - g2 x - g3)| / (1 + |x|^3); zero for the identity.
  double curve_residual(const EPoint& p) const noexcept;

 private:
  Lattice lattice_;
  Complex g2_;
  Complex g3_;
  std::vector<Complex> near_points_;     // nonzero lattice points with |lambda| <= R
  std::vector<Complex> near_inv_sq_;     // lambda^-2 for the same points
  std::vector<Complex> tail_coeffs_;     // (2n-1) * sum_{|lambda|>R} lambda^-2n, n = 2, 3, ...
};

Complex wp(Complex z, const EllipticCurve& curve);
Complex wp_prime(Complex z, const EllipticCurve& curve);

/// z -> [1 : p(z) : p'(z)], with O for lattice points.
EPoint exp_E(Complex z, const EllipticCurve& curve);

/// Logarithm with values in the half-open fundamental cell. Newton on p is
/// seeded near the identity and from a 24x24 grid over the cell.
/// Throws NonConvergence with the best residual when no seed converges.
Complex log_E(const EPoint& p, const EllipticCurve& curve);

/// Logarithm on the lattice translate nearest `hint`. Newton is started from
/// the hint and falls back to log_E.
Complex log_E_near(const EPoint& p, const EllipticCurve& curve, Complex hint);

}  // namespace expalg
