#include "expalg/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "expalg/errors.hpp"

namespace expalg {

namespace {

constexpr int kSeriesTerms = 18;     // Laurent tail terms n = 2 .. kSeriesTerms + 1
constexpr double kNearRadius = 6.0;  // near points: |lambda| <= kNearRadius * |b2|
constexpr int kLogGrid = 24;
constexpr double kLogAccept = 1e-10;
constexpr double kPoleFraction = 1e-8;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// sigma_k(n) = sum of d^k over divisors d of n.
double divisor_power_sum(int n, int k) {
  double s = 0.0;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0) s += std::pow(static_cast<double>(d), k);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(Complex omega1, Complex omega2) : omega1_(omega1), omega2_(omega2) {
  if (!finite(omega1) || !finite(omega2)) throw std::invalid_argument("Lattice: non-finite period");
  if (std::abs(omega1) == 0.0) throw std::invalid_argument("Lattice: omega1 must be nonzero");
  const Complex tau = omega2 / omega1;
  if (!(tau.imag() > 1e-12 * std::abs(tau))) {
    throw std::invalid_argument("Lattice: Im(omega2/omega1) must be positive");
  }

  Complex b1 = omega1;
  Complex b2 = omega2;
  for (int guard = 0; guard < 200; ++guard) {
    if (std::abs(b2) < std::abs(b1)) std::swap(b1, b2);
    const double m = std::round((b2 / b1).real());
    if (m == 0.0) break;
    b2 -= m * b1;
  }
  if ((b2 / b1).imag() < 0.0) b2 = -b2;
  reduced1_ = b1;
  reduced2_ = b2;
}

Lattice::Coords Lattice::basis_coords(Complex z) const noexcept {
  const double area = (std::conj(omega1_) * omega2_).imag();
  const double t = (std::conj(omega1_) * z).imag() / area;
  const double s = -(std::conj(omega2_) * z).imag() / area;
  return {s, t};
}

double Lattice::covolume() const noexcept { return std::abs((std::conj(omega1_) * omega2_).imag()); }

Complex Lattice::nearest_point(Complex z) const noexcept {
  const double area = (std::conj(reduced1_) * reduced2_).imag();
  const double t = std::round((std::conj(reduced1_) * z).imag() / area);
  const double s = std::round(-(std::conj(reduced2_) * z).imag() / area);
  Complex best = s * reduced1_ + t * reduced2_;
  double best_d = std::abs(z - best);
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const Complex cand = (s + di) * reduced1_ + (t + dj) * reduced2_;
      const double d = std::abs(z - cand);
      if (d < best_d) {
        best = cand;
        best_d = d;
      }
    }
  }
  return best;
}

LatticeReduction reduce_mod_lattice(Complex z, const Lattice& lat) {
  const auto c = lat.basis_coords(z);
  const double m = std::ceil(c.s - 0.5);
  const double n = std::ceil(c.t - 0.5);
  const Complex part = lat.point(m, n);
  return {z - part, part, static_cast<std::int64_t>(m), static_cast<std::int64_t>(n)};
}

bool FundamentalDomain::contains(Complex z) const noexcept {
  const auto c = lattice.basis_coords(z);
  return c.s > -0.5 && c.s <= 0.5 && c.t > -0.5 && c.t <= 0.5;
}

std::vector<Complex> FundamentalDomain::corners() const {
  return {lattice.point(-0.5, -0.5), lattice.point(0.5, -0.5), lattice.point(0.5, 0.5),
          lattice.point(-0.5, 0.5)};
}

// ---------------------------------------------------------------------------
// Invariants via the q-expansions of E4 and E6 on the reduced basis.

Invariants eisenstein_invariants(const Lattice& lat) {
  const auto [b1, b2] = lat.reduced_basis();
  const Complex tau = b2 / b1;
  const Complex q = std::exp(Complex(0.0, kTwoPi) * tau);
  Complex e4 = 1.0;
  Complex e6 = 1.0;
  Complex qn = 1.0;
  for (int n = 1; n < 200; ++n) {
    qn *= q;
    const Complex t4 = 240.0 * divisor_power_sum(n, 3) * qn;
    const Complex t6 = 504.0 * divisor_power_sum(n, 5) * qn;
    e4 += t4;
    e6 -= t6;
    if (std::abs(t6) < 1e-18) break;
  }
  const double pi2 = kPi * kPi;
  const double pi4 = pi2 * pi2;
  const double pi6 = pi4 * pi2;
  const Complex b1_2 = b1 * b1;
  const Complex g4 = (pi4 / 45.0) * e4 / (b1_2 * b1_2);
  const Complex g6 = (2.0 * pi6 / 945.0) * e6 / (b1_2 * b1_2 * b1_2);
  return {60.0 * g4, 140.0 * g6};
}

// ---------------------------------------------------------------------------
// EPoint metric

double point_distance(const EPoint& a, const EPoint& b) noexcept {
  auto homog = [](const EPoint& p) {
    std::array<Complex, 3> v = p.is_identity() ? std::array<Complex, 3>{0.0, 0.0, 1.0}
                                               : std::array<Complex, 3>{1.0, p.x(), p.y()};
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    double n2 = 0.0;
    for (auto& c : v) {
      c /= m;
      n2 += std::norm(c);
    }
    const double n = std::sqrt(n2);
    for (auto& c : v) c /= n;
    return v;
  };
  const auto u = homog(a);
  const auto v = homog(b);
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) w += std::norm(u[i] * v[j] - u[j] * v[i]);
  }
  return std::sqrt(w);
}

// ---------------------------------------------------------------------------
// EllipticCurve

EllipticCurve::EllipticCurve(const Lattice& lattice) : lattice_(lattice) {
  const auto inv = eisenstein_invariants(lattice_);
  g2_ = inv.g2;
  g3_ = inv.g3;

  const auto [b1, b2] = lattice_.reduced_basis();
  const double radius = kNearRadius * std::abs(b2);
  const double area = lattice_.covolume();
  const int smax = static_cast<int>(std::ceil(radius * std::abs(b2) / area)) + 1;
  const int tmax = static_cast<int>(std::ceil(radius * std::abs(b1) / area)) + 1;
  for (int s = -smax; s <= smax; ++s) {
    for (int t = -tmax; t <= tmax; ++t) {
      if (s == 0 && t == 0) continue;
      const Complex lam = static_cast<double>(s) * b1 + static_cast<double>(t) * b2;
      if (std::abs(lam) <= radius) {
        near_points_.push_back(lam);
        near_inv_sq_.push_back(1.0 / (lam * lam));
      }
    }
  }

  // Laurent coefficients c_n of p(z) = z^-2 + sum_{n>=2} c_n z^{2n-2}, where
  // c_n = (2n-1) G_{2n}. The tail sum over |lambda| > R is the same series
  // with G_{2n} replaced by G_{2n} minus its near-point part.
  const int nmax = kSeriesTerms + 1;
  std::vector<Complex> c(static_cast<std::size_t>(nmax + 1));
  c[2] = g2_ / 20.0;
  c[3] = g3_ / 28.0;
  for (int n = 4; n <= nmax; ++n) {
    Complex acc{};
    for (int m = 2; m <= n - 2; ++m) acc += c[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(n - m)];
    c[static_cast<std::size_t>(n)] = 3.0 / ((2.0 * n + 1.0) * (n - 3.0)) * acc;
  }
  tail_coeffs_.assign(static_cast<std::size_t>(nmax - 1), Complex{});
  for (int n = 2; n <= nmax; ++n) {
    Complex near_sum{};
    for (const auto& inv2 : near_inv_sq_) {
      Complex pw = 1.0;
      for (int k = 0; k < n; ++k) pw *= inv2;
      near_sum += pw;
    }
    tail_coeffs_[static_cast<std::size_t>(n - 2)] =
        c[static_cast<std::size_t>(n)] - (2.0 * n - 1.0) * near_sum;
  }
}

std::pair<Complex, Complex> EllipticCurve::wp_and_prime(Complex z) const {
  if (!finite(z)) throw std::invalid_argument("wp: non-finite argument");
  const Complex u = z - lattice_.nearest_point(z);
  if (std::abs(u) < kPoleFraction * std::abs(lattice_.omega1())) {
    throw PoleAtLatticePoint("wp: argument within 1e-8 |omega1| of a lattice point");
  }
  const Complex u2 = u * u;
  Complex p = 1.0 / u2;
  Complex dp = -2.0 / (u2 * u);
  for (std::size_t i = 0; i < near_points_.size(); ++i) {
    const Complex inv = 1.0 / (u - near_points_[i]);
    const Complex inv2 = inv * inv;
    p += inv2 - near_inv_sq_[i];
    dp -= 2.0 * inv2 * inv;
  }
  // Tail: sum_n a_n u^{2n-2} and its derivative, by Horner in u^2.
  Complex tp{};
  Complex tdp{};
  for (std::size_t k = tail_coeffs_.size(); k-- > 0;) {
    const double n = static_cast<double>(k + 2);
    tp = tp * u2 + tail_coeffs_[k];
    tdp = tdp * u2 + (2.0 * n - 2.0) * tail_coeffs_[k];
  }
  p += tp * u2;
  dp += tdp * u;
  return {p, dp};
}

double EllipticCurve::curve_residual(const EPoint& pt) const noexcept {
  if (pt.is_identity()) return 0.0;
  const Complex x = pt.x();
  const Complex y = pt.y();
  const double ax = std::abs(x);
  return std::abs(y * y - (4.0 * x * x * x - g2_ * x - g3_)) / (1.0 + ax * ax * ax);
}

Complex wp(Complex z, const EllipticCurve& curve) { return curve.wp_and_prime(z).first; }

Complex wp_prime(Complex z, const EllipticCurve& curve) { return curve.wp_and_prime(z).second; }

EPoint exp_E(Complex z, const EllipticCurve& curve) {
  const auto& lat = curve.lattice();
  if (std::abs(z - lat.nearest_point(z)) < kPoleFraction * std::abs(lat.omega1())) return EPoint::identity();
  const auto [x, y] = curve.wp_and_prime(z);
  return EPoint::affine(x, y);
}

// ---------------------------------------------------------------------------
// Logarithm

namespace {

struct LogCandidate {
  Complex z;
  double residual;
};

std::optional<LogCandidate> newton_log(const EPoint& pt, const EllipticCurve& curve, Complex seed) {
  const Complex x = pt.x();
  const Complex y = pt.y();
  const double unit = curve.lattice().min_gap();
  Complex z = seed;
  try {
    for (int k = 0; k < 40; ++k) {
      const auto [p, dp] = curve.wp_and_prime(z);
      if (dp == Complex{}) break;
      Complex step = (p - x) / dp;
      if (!finite(step)) return std::nullopt;
      if (std::abs(step) > 0.25 * unit) step *= 0.25 * unit / std::abs(step);
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(std::abs(z), 1e-3 * unit)) break;
    }
    auto [p, dp] = curve.wp_and_prime(z);
    if (std::abs(-dp - y) < std::abs(dp - y)) {
      z = -z;
      dp = -dp;
    }
    // Polish on p' = y, which stays well conditioned at the 2-torsion points
    // where the p-Newton above degrades.
    double best = point_distance(EPoint::affine(p, dp), pt);
    for (int k = 0; k < 3 && best > 0.0; ++k) {
      const Complex d2 = 6.0 * p * p - 0.5 * curve.g2();
      if (d2 == Complex{}) break;
      const Complex cand = z - (dp - y) / d2;
      const auto [cp, cdp] = curve.wp_and_prime(cand);
      const double res = point_distance(EPoint::affine(cp, cdp), pt);
      if (!(res < best)) break;
      z = cand;
      p = cp;
      dp = cdp;
      best = res;
    }
    return LogCandidate{z, best};
  } catch (const PoleAtLatticePoint&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

Complex log_E(const EPoint& pt, const EllipticCurve& curve) {
  if (pt.is_identity()) return 0.0;
  const auto& lat = curve.lattice();
  double best = std::numeric_limits<double>::infinity();

  auto accept = [&](Complex seed) -> std::optional<Complex> {
    const auto cand = newton_log(pt, curve, seed);
    if (!cand) return std::nullopt;
    best = std::min(best, cand->residual);
    if (cand->residual < kLogAccept) return reduce_mod_lattice(cand->z, lat).representative;
    return std::nullopt;
  };

  // Near the identity p ~ z^-2 and p' ~ -2 z^-3, so z ~ -2x/y.
  if (pt.y() != Complex{}) {
    if (auto z = accept(-2.0 * pt.x() / pt.y())) return *z;
  }
  for (int i = 0; i < kLogGrid; ++i) {
    for (int j = 0; j < kLogGrid; ++j) {
      const double s = -0.5 + (i + 0.5) / kLogGrid;
      const double t = -0.5 + (j + 0.5) / kLogGrid;
      if (auto z = accept(lat.point(s, t))) return *z;
    }
  }
  throw NonConvergence("log_E: no grid seed converged", best);
}

Complex log_E_near(const EPoint& pt, const EllipticCurve& curve, Complex hint) {
  const auto& lat = curve.lattice();
  if (pt.is_identity()) return lat.nearest_point(hint);
  Complex z;
  const auto cand = newton_log(pt, curve, hint);
  if (cand && cand->residual < kLogAccept) {
    z = cand->z;
  } else {
    z = log_E(pt, curve);
  }
  return z + lat.nearest_point(hint - z);
}

}  // namespace expalg
