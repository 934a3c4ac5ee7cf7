#pragma once

// The solution map S(lambda): fixed-point inversion of F(z) = z - G(z) at
// period-lattice points, lattice enumeration over sector domains, sweeps,
// asymptotic diagnostics and the argument-principle zero count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expalg/branch.hpp"
#include "expalg/complex_core.hpp"
#include "expalg/problem_spec.hpp"
#include "expalg/sector_domain.hpp"

namespace expalg {

/// Period lattice of exp on the product group: the curve lattice on an
/// elliptic factor, 2 pi i Z on a torus factor.
class LatticeProduct {
 public:
  explicit LatticeProduct(const GroupSignature& sig);

  std::size_t dimension() const noexcept { return basis_.size(); }
  double min_gap() const noexcept { return min_gap_; }

  /// Lattice points of factor k in the open disc |p - center| < radius.
  std::vector<Complex> points_in_disc(std::size_t k, Complex center, double radius) const;

  /// Whether every coordinate of z is within tol (relative to max(1,|z_k|))
  /// of a lattice point.
  bool contains(const CVec& z, double tol = 1e-9) const;

 private:
  struct Basis {
    Complex b1;
    Complex b2;  // zero for a rank-one factor
  };
  std::vector<Basis> basis_;
  double min_gap_ = 0.0;
};

struct RadiusRange {
  double min = 0.0;
  double max = 0.0;
  bool empty() const noexcept { return !(min < max); }
};

/// Lattice points lambda in the domain with min < |lambda_l| < max, ordered by
/// (|lambda|, lambda lexicographic).
std::vector<CVec> enumerate_lattice(const SectorDomain& domain, const LatticeProduct& lattice,
                                    const RadiusRange& range);

/// Ordering used for lattice points and records.
bool lattice_less(const CVec& a, const CVec& b);

struct SolveOptions {
  double tol = 1e-14;            ///< fixed-point step tolerance, relative to max(1, |lambda|)
  int max_iter = 100;
  double residual_tol = 1e-10;   ///< required group distance exp(s) vs alpha(s)
  double f_tol = 1e-9;           ///< required |F(s) - lambda|
  ContinuationOptions continuation{};
};

struct SolutionRecord {
  CVec lambda;
  CVec s;
  int branch_id = 0;
  double residual = 0.0;    ///< group distance between exp(s) and alpha(s)
  double f_residual = 0.0;  ///< |F(s) - lambda|
  int iterations = 0;
  double contraction_ratio = 0.0;
  std::optional<CVec> gamma_estimate;  ///< G(lambda) on the record's branch

  bool operator==(const SolutionRecord&) const = default;
};

inline CVec G_eval(const BranchState& state) { return state.g; }
inline CVec F_eval(const BranchState& state) { return state.z - state.g; }

/// Iterate z <- lambda + G(z) from z = lambda, continuing `branch` (a state
/// anywhere in the domain) to every iterate.
/// Throws LeftDomain, NonConvergence or BranchPointOnPath.
SolutionRecord solve_at_lattice_point(const ProblemSpec& spec, const SectorDomain& domain,
                                      const BranchState& branch, const CVec& lambda,
                                      const SolveOptions& options = {});

struct SkippedPoint {
  CVec lambda;
  int branch_id = 0;
  std::string reason;

  bool operator==(const SkippedPoint&) const = default;
};

struct DecayEntry {
  double lambda_norm = 0.0;
  double deviation = 0.0;

  bool operator==(const DecayEntry&) const = default;
};

struct BranchAsymptotics {
  int branch_id = 0;
  CVec gamma;                      ///< elliptic coordinates only; torus coordinates are 0
  std::vector<DecayEntry> decay;   ///< sorted by |lambda|
  bool trend_ok = false;           ///< last deviation < first deviation

  bool operator==(const BranchAsymptotics&) const = default;
};

struct AsymptoticReport {
  std::vector<BranchAsymptotics> branches;
  std::optional<double> log_growth_constant;  ///< torus coordinates present

  bool operator==(const AsymptoticReport&) const = default;
};

/// gamma: mean of s - lambda over the 5 largest solved points of each branch
/// (elliptic coordinates). Deviation: |s - lambda - gamma| on elliptic
/// coordinates and |s - lambda - G(lambda)| on torus coordinates.
AsymptoticReport build_asymptotics(const GroupSignature& sig, std::span<const SolutionRecord> records);

/// Smallest C with |s - lambda| <= C log|lambda| on torus coordinates.
double fit_log_growth(const GroupSignature& sig, std::span<const SolutionRecord> records);

struct SweepResult {
  std::vector<SolutionRecord> records;
  std::vector<SkippedPoint> skipped;
  std::size_t enumerated = 0;  ///< lattice points times branches attempted
};

/// Solve at every lattice point for every base branch on `jobs` threads.
/// Records are ordered by (|lambda|, lambda, branch_id) independent of jobs.
SweepResult sweep(const ProblemSpec& spec, const SectorDomain& domain, std::span<const BranchState> bases,
                  std::span<const CVec> lambdas, const SolveOptions& options = {}, unsigned jobs = 1);

/// A generic base point near the middle of the region |z_l| in range:
/// on the ray through the window centre, nudged off degenerate fibers.
CVec base_point(const ProblemSpec& spec, const SectorDomain& domain, const RadiusRange& range);

struct Box {
  double re_min;
  double re_max;
  double im_min;
  double im_max;
};

/// Winding number of h around the box boundary by adaptive argument
/// accumulation. Throws ZeroOnBoundary when |h| < 1e-8 on the boundary.
int count_zeros_window(const std::function<Complex(Complex)>& h, const Box& box);

/// Largest infinity norm of the finite-difference Jacobian of G over
/// `samples` pseudo-random points of the domain with |z_l| in range, for
/// every branch in `bases`.
double measure_contraction(const ProblemSpec& spec, const SectorDomain& domain, std::span<const BranchState> bases,
                           const RadiusRange& range, int samples, std::uint64_t seed = 20240229);

}  // namespace expalg
