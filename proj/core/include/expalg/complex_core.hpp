#pragma once

// Complex vectors and polynomials, all-roots solving, root tracking along
// paths, and the generic fixed-point / finite-difference machinery shared by
// the rest of the library.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace expalg {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Defaults shared by the numerical kernels.
namespace defaults {
inline constexpr double kResidualTol = 1e-12;
inline constexpr double kGapFactor = 0.5;
inline constexpr int kNewtonCap = 50;
inline constexpr int kCorrectorSteps = 5;
inline constexpr double kClusterFactor = 1e2;
}  // namespace defaults

/// A point of C^n.
class CVec {
 public:
  CVec() = default;
  explicit CVec(std::size_t n, Complex fill = {}) : entries_(n, fill) {}
  CVec(std::initializer_list<Complex> init) : entries_(init) {}
  explicit CVec(std::vector<Complex> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator[](std::size_t i) { return entries_[i]; }
  const Complex& operator[](std::size_t i) const { return entries_[i]; }

  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::span<const Complex> span() const noexcept { return entries_; }
  const std::vector<Complex>& entries() const noexcept { return entries_; }

  CVec& operator+=(const CVec& other);
  CVec& operator-=(const CVec& other);
  CVec& operator*=(Complex scale);

  friend CVec operator+(CVec a, const CVec& b) { return a += b; }
  friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
  friend CVec operator*(CVec a, Complex s) { return a *= s; }
  friend CVec operator*(Complex s, CVec a) { return a *= s; }

  bool operator==(const CVec&) const = default;

  double norm_inf() const noexcept;
  double norm2() const noexcept;
  bool all_finite() const noexcept;

 private:
  std::vector<Complex> entries_;
};

/// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// Induced infinity norm (maximum absolute row sum).
  double norm_inf() const noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

/// Univariate polynomial with coefficients in ascending degree.
class Poly {
 public:
  Poly() : coeffs_{Complex{}} {}
  explicit Poly(std::vector<Complex> coeffs);

  static Poly from_roots(std::span<const Complex> roots, Complex leading = 1.0);

  /// Degree after trimming exactly-zero leading coefficients; the zero
  /// polynomial has degree 0.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  Complex leading() const noexcept { return coeffs_.back(); }
  double coeff_norm() const noexcept;

  Complex operator()(Complex z) const noexcept;
  Complex derivative_at(Complex z) const noexcept;
  Poly derivative() const;

 private:
  std::vector<Complex> coeffs_;
};

struct PathSegment {
  Complex start;
  Complex end;
  double max_step;
};

/// Roots with multiplicity, as returned by cluster_roots.
struct RootCluster {
  Complex value;
  int multiplicity;
};

/// All deg(p) roots of p by Aberth-Ehrlich simultaneous iteration, started
/// on a circle of the Cauchy-bound radius. Roots that form a numerical
/// cluster are replaced by the cluster centroid (repeated with multiplicity).
/// Throws NonConvergence if some root misses the scaled residual bound
/// |p(r)| <= tol * max(1, |p| * max(1,|r|)^deg).
std::vector<Complex> poly_roots(const Poly& p, double tol = defaults::kResidualTol);

/// Single-linkage grouping of roots closer than `radius`.
std::vector<RootCluster> cluster_roots(std::span<const Complex> roots, double radius);

/// Distance from roots[index] to the nearest other root (infinity if alone).
double min_root_gap(std::span<const Complex> roots, std::size_t index);

/// Result of one corrector step of root tracking.
struct RootStep {
  Complex root;
  double gap;  ///< distance from `root` to the nearest other root of the new polynomial
};

/// Newton corrector for one tracking step: starting from `predicted`, at most
/// defaults::kCorrectorSteps Newton steps on `p`. Fails (nullopt) when the
/// corrector does not converge, the corrected root is not the unique nearest
/// root of `p`, or it moved by more than half of either the previous or the
/// new minimal gap.
std::optional<RootStep> correct_root(const Poly& p, Complex previous, Complex predicted,
                                     double previous_gap, double tol = defaults::kResidualTol);

/// Family of polynomials parametrised by a complex parameter.
using PolyFamily = std::function<Poly(Complex)>;

/// Track the root r0 of family(seg.start) along the straight segment to
/// seg.end by predictor-corrector continuation with step halving.
/// Throws BranchPointOnPath when the step underflows.
Complex continue_root(const PolyFamily& family, const PathSegment& seg, Complex r0,
                      double tol = defaults::kResidualTol);

using VecMap = std::function<CVec(const CVec&)>;

struct FixedPointResult {
  CVec point;
  int iterations = 0;
  double contraction_ratio = 0.0;  ///< largest observed |z_{k+1}-z_k| / |z_k-z_{k-1}|
};

/// Iterate z <- map(z) until the step is below tol (infinity norm).
/// Throws NonConvergence when max_iter is exceeded or the iterates drift more
/// than 10x the first step away from z0.
FixedPointResult fixed_point_solve(const VecMap& map, const CVec& z0, double tol, int max_iter);

/// Central-difference Jacobian of an analytic map; entry error is O(h^2).
CMatrix finite_diff_jacobian(const VecMap& map, const CVec& z, double h);

}  // namespace expalg
