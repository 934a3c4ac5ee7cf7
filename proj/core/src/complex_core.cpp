#include "expalg/complex_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "expalg/errors.hpp"

namespace expalg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kAberthCap = 500;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double residual_bound(const Poly& p, Complex r, double tol) {
  const double scale = std::pow(std::max(1.0, std::abs(r)), p.degree());
  return tol * std::max(1.0, p.coeff_norm() * scale);
}

// Stable closed form for a quadratic a2 z^2 + a1 z + a0.
std::vector<Complex> quadratic_roots(Complex a2, Complex a1, Complex a0) {
  const Complex disc = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
  // Pick the sign that avoids cancellation.
  const Complex q = (std::real(std::conj(a1) * disc) >= 0.0) ? -0.5 * (a1 + disc) : -0.5 * (a1 - disc);
  if (q == Complex{}) return {Complex{}, Complex{}};
  return {q / a2, a0 / q};
}

Complex newton_polish(const Poly& p, Complex r, int steps) {
  double best = std::abs(p(r));
  for (int k = 0; k < steps && best > 0.0; ++k) {
    const Complex d = p.derivative_at(r);
    if (d == Complex{}) break;
    const Complex candidate = r - p(r) / d;
    const double res = std::abs(p(candidate));
    if (!(res < best)) break;
    r = candidate;
    best = res;
  }
  return r;
}

// Replace clusters of numerically coincident roots by their centroid when the
// centroid is at least as good a root as the members. A root of multiplicity
// m is only resolved to about tol^(1/m), so the search radius is tol^(1/3).
void merge_clusters(const Poly& p, std::vector<Complex>& roots, double tol) {
  const double loose = std::max(defaults::kClusterFactor * tol, std::cbrt(tol));
  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  const auto clusters = cluster_roots(roots, loose * scale);
  if (clusters.size() == roots.size()) return;

  std::vector<bool> used(roots.size(), false);
  std::vector<Complex> merged;
  merged.reserve(roots.size());
  for (const auto& cl : clusters) {
    if (cl.multiplicity == 1) continue;
    // Members are the roots closest to the centroid.
    std::vector<std::size_t> idx(roots.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::erase_if(idx, [&](std::size_t i) { return used[i]; });
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(roots[a] - cl.value) < std::abs(roots[b] - cl.value);
    });
    idx.resize(static_cast<std::size_t>(cl.multiplicity));
    double worst_member = 0.0;
    for (auto i : idx) worst_member = std::max(worst_member, std::abs(p(roots[i])));
    const double spread = std::abs(roots[idx.back()] - cl.value);
    const bool tight = spread <= defaults::kClusterFactor * tol * std::max(1.0, std::abs(cl.value));
    // An m-fold root is a simple root of the (m-1)-th derivative.
    Poly d = p;
    for (int k = 1; k < cl.multiplicity; ++k) d = d.derivative();
    Complex centre = newton_polish(d, cl.value, 3);
    if (!finite(centre) || std::abs(centre - cl.value) > spread + loose * scale) centre = cl.value;
    if (std::abs(p(centre)) > std::abs(p(cl.value))) centre = cl.value;
    if (tight || std::abs(p(centre)) <= worst_member) {
      for (auto i : idx) {
        used[i] = true;
        merged.push_back(centre);
      }
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!used[i]) merged.push_back(roots[i]);
  }
  roots = std::move(merged);
}

}  // namespace

// ---------------------------------------------------------------------------
// CVec / CMatrix

CVec& CVec::operator+=(const CVec& other) {
  if (other.size() != size()) throw std::invalid_argument("CVec size mismatch");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] += other[i];
  return *this;
}

CVec& CVec::operator-=(const CVec& other) {
  if (other.size() != size()) throw std::invalid_argument("CVec size mismatch");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] -= other[i];
  return *this;
}

CVec& CVec::operator*=(Complex scale) {
  for (auto& e : entries_) e *= scale;
  return *this;
}

double CVec::norm_inf() const noexcept {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e));
  return m;
}

double CVec::norm2() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e);
  return std::sqrt(s);
}

bool CVec::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), finite);
}

double CMatrix::norm_inf() const noexcept {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) row += std::abs((*this)(r, c));
    best = std::max(best, row);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == Complex{}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(Complex{});
}

Poly Poly::from_roots(std::span<const Complex> roots, Complex leading) {
  std::vector<Complex> c{leading};
  for (const auto& r : roots) {
    std::vector<Complex> next(c.size() + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return Poly(std::move(c));
}

double Poly::coeff_norm() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Complex Poly::operator()(Complex z) const noexcept {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex Poly::derivative_at(Complex z) const noexcept {
  Complex acc{};
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs_[k];
  return acc;
}

Poly Poly::derivative() const {
  if (coeffs_.size() <= 1) return Poly{};
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Poly(std::move(d));
}

// ---------------------------------------------------------------------------
// Root finding

std::vector<RootCluster> cluster_roots(std::span<const Complex> roots, double radius) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(roots[i] - roots[j]) < radius) parent[find(i)] = find(j);
    }
  }
  std::vector<RootCluster> out;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (slot[r] == n) {
      slot[r] = out.size();
      out.push_back({Complex{}, 0});
    }
    auto& cl = out[slot[r]];
    cl.value += roots[i];
    ++cl.multiplicity;
  }
  for (auto& cl : out) cl.value /= static_cast<double>(cl.multiplicity);
  return out;
}

double min_root_gap(std::span<const Complex> roots, std::size_t index) {
  double gap = kInf;
  for (std::size_t j = 0; j < roots.size(); ++j) {
    if (j != index) gap = std::min(gap, std::abs(roots[index] - roots[j]));
  }
  return gap;
}

std::vector<Complex> poly_roots(const Poly& p, double tol) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("poly_roots: degree must be at least 1");
  for (const auto& c : p.coeffs()) {
    if (!finite(c)) throw std::invalid_argument("poly_roots: non-finite coefficient");
  }

  // Exact zero roots are split off first.
  const auto& c = p.coeffs();
  std::size_t zeros = 0;
  while (zeros < c.size() && c[zeros] == Complex{}) ++zeros;
  std::vector<Complex> roots(zeros, Complex{});
  const Poly q(std::vector<Complex>(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end()));
  const int m = q.degree();

  if (m == 1) {
    roots.push_back(-q.coeffs()[0] / q.coeffs()[1]);
  } else if (m == 2) {
    for (auto r : quadratic_roots(q.coeffs()[2], q.coeffs()[1], q.coeffs()[0])) {
      roots.push_back(newton_polish(q, r, 3));
    }
  } else if (m > 2) {
    const Complex lead = q.leading();
    double cauchy = 0.0;
    for (int k = 0; k < m; ++k) cauchy = std::max(cauchy, std::abs(q.coeffs()[static_cast<std::size_t>(k)] / lead));
    cauchy += 1.0;
    // Geometric mean of the root moduli keeps the start circle on scale when
    // the Cauchy bound is loose.
    const double gm = std::pow(std::abs(q.coeffs()[0] / lead), 1.0 / m);
    const double radius = std::min(cauchy, std::max(gm, 1e-3 * cauchy));

    std::vector<Complex> z(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      z[static_cast<std::size_t>(k)] = std::polar(radius, kTwoPi * k / m + 0.4);
    }
    for (int iter = 0; iter < kAberthCap; ++iter) {
      double max_corr = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const Complex pv = q(z[i]);
        if (pv == Complex{}) continue;
        const Complex ratio = pv / q.derivative_at(z[i]);
        Complex s{};
        for (std::size_t j = 0; j < z.size(); ++j) {
          if (j != i) s += 1.0 / (z[i] - z[j]);
        }
        const Complex w = ratio / (1.0 - ratio * s);
        if (!finite(w)) continue;
        z[i] -= w;
        max_corr = std::max(max_corr, std::abs(w) / std::max(1.0, std::abs(z[i])));
      }
      if (max_corr < 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    for (auto& r : z) roots.push_back(newton_polish(q, r, 2));
  }

  merge_clusters(p, roots, tol);

  double worst = 0.0;
  bool ok = true;
  for (const auto& r : roots) {
    const double res = std::abs(p(r));
    if (!finite(r) || !(res <= residual_bound(p, r, tol))) ok = false;
    worst = std::max(worst, res);
  }
  if (!ok) throw NonConvergence("poly_roots: residual bound missed", worst);
  return roots;
}

// ---------------------------------------------------------------------------
// Continuation

std::optional<RootStep> correct_root(const Poly& p, Complex previous, Complex predicted,
                                     double previous_gap, double tol) {
  Complex r = predicted;
  bool converged = false;
  for (int k = 0; k < defaults::kCorrectorSteps; ++k) {
    const Complex d = p.derivative_at(r);
    if (d == Complex{}) return std::nullopt;
    const Complex step = p(r) / d;
    if (!finite(step)) return std::nullopt;
    r -= step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(r))) {
      converged = true;
      break;
    }
  }
  if (!converged) return std::nullopt;

  const double motion = std::abs(r - previous);
  if (!(motion < defaults::kGapFactor * previous_gap)) return std::nullopt;
  if (p.degree() <= 1) return RootStep{r, kInf};

  std::vector<Complex> all;
  try {
    all = poly_roots(p, tol);
  } catch (const NonConvergence&) {
    return std::nullopt;
  }
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (std::abs(all[i] - r) < std::abs(all[nearest] - r)) nearest = i;
  }
  const double gap = min_root_gap(all, nearest);
  if (!(std::abs(all[nearest] - r) < 0.25 * gap)) return std::nullopt;
  if (!(motion < defaults::kGapFactor * gap)) return std::nullopt;
  return RootStep{r, gap};
}

Complex continue_root(const PolyFamily& family, const PathSegment& seg, Complex r0, double tol) {
  if (!(seg.max_step > 0.0)) throw std::invalid_argument("continue_root: max_step must be positive");
  const Poly p0 = family(seg.start);
  const Complex start_root = newton_polish(p0, r0, 3);
  if (!(std::abs(p0(start_root)) <= residual_bound(p0, start_root, std::max(tol, 1e2 * tol)))) {
    throw std::invalid_argument("continue_root: r0 is not a root at the segment start");
  }
  const double length = std::abs(seg.end - seg.start);
  if (length == 0.0) return start_root;

  double gap = kInf;
  if (p0.degree() > 1) {
    const auto roots = poly_roots(p0, tol);
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < roots.size(); ++i) {
      if (std::abs(roots[i] - start_root) < std::abs(roots[nearest] - start_root)) nearest = i;
    }
    gap = min_root_gap(roots, nearest);
  }

  const double h_max = std::min(1.0, seg.max_step / length);
  double h = h_max;
  double t = 0.0;
  Complex r = start_root;
  Complex r_prev = r;
  double dt_prev = 0.0;
  while (t < 1.0) {
    const double tn = std::min(1.0, t + h);
    const Complex param = seg.start + (seg.end - seg.start) * tn;
    const Complex predicted = dt_prev > 0.0 ? r + (r - r_prev) * ((tn - t) / dt_prev) : r;
    const auto step = correct_root(family(param), r, predicted, gap, tol);
    if (!step) {
      h *= 0.5;
      if (h < 1e-13) throw BranchPointOnPath("continue_root: step underflow near t = " + std::to_string(t));
      continue;
    }
    r_prev = r;
    dt_prev = tn - t;
    r = step->root;
    gap = step->gap;
    t = tn;
    h = std::min(2.0 * h, h_max);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Fixed point and Jacobian

FixedPointResult fixed_point_solve(const VecMap& map, const CVec& z0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("fixed_point_solve: tol must be positive");
  FixedPointResult out;
  CVec z = z0;
  double first_step = 0.0;
  double prev_step = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    CVec next = map(z);
    if (!next.all_finite()) throw NonConvergence("fixed_point_solve: non-finite iterate", kInf);
    const double step = (next - z).norm_inf();
    const double scale = std::max(1.0, next.norm_inf());
    if (k == 1) first_step = step;
    if (prev_step > 0.0 && step > 1e3 * std::numeric_limits<double>::epsilon() * scale) {
      out.contraction_ratio = std::max(out.contraction_ratio, step / prev_step);
    }
    if ((next - z0).norm_inf() > 10.0 * std::max(first_step, tol)) {
      throw NonConvergence("fixed_point_solve: iterates diverge from the start point", step);
    }
    prev_step = step;
    z = std::move(next);
    if (step < tol) {
      out.point = std::move(z);
      out.iterations = k;
      return out;
    }
  }
  throw NonConvergence("fixed_point_solve: iteration cap reached", prev_step);
}

CMatrix finite_diff_jacobian(const VecMap& map, const CVec& z, double h) {
  const CVec f0 = map(z);
  CMatrix jac(f0.size(), z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    CVec plus = z;
    CVec minus = z;
    plus[j] += h;
    minus[j] -= h;
    const CVec diff = map(plus) - map(minus);
    for (std::size_t i = 0; i < f0.size(); ++i) jac(i, j) = diff[i] / (2.0 * h);
  }
  return jac;
}

}  // namespace expalg
