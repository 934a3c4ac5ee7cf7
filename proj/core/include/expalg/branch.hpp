#pragma once

// Branches of the algebraic map over a sector domain: a point z, the fiber
// value alpha(z) on a fixed branch, and a continuous logarithm g = G(z).

#include <functional>
#include <vector>

#include "expalg/complex_core.hpp"
#include "expalg/problem_spec.hpp"
#include "expalg/sector_domain.hpp"

namespace expalg {

struct BranchState {
  CVec z;
  FiberPoint fiber;
  CVec g;
  int branch_id = 0;
};

/// A path in C^n parametrised by t in [0, 1].
using Path = std::function<CVec(double)>;

struct ContinuationOptions {
  /// Largest accepted step in z (infinity norm); 0 means max(0.5, 0.1 |z|).
  double max_step = 0.0;
};

/// One state per fiber point over z0, with branch ids following the
/// lexicographic order of the fiber. Torus coordinates of g start on the
/// principal logarithm, elliptic ones in the fundamental cell.
/// Throws LeftDomain when z0 is outside the domain, DegenerateFiber when the
/// fiber over z0 is degenerate.
std::vector<BranchState> branch_base(const ProblemSpec& spec, const SectorDomain& domain, const CVec& z0);

/// Predictor-corrector continuation of a branch along `path`, which must
/// start at state.z. With a domain every accepted point is checked for
/// membership (LeftDomain otherwise); without one (diagnostic mode) the path
/// may go anywhere off the branch locus. Throws BranchPointOnPath when the
/// step underflows.
BranchState continue_along_path(const ProblemSpec& spec, const BranchState& state, const Path& path,
                                const SectorDomain* domain, const ContinuationOptions& options = {});

/// Continuation along the straight segment to `target`.
BranchState branch_continue(const ProblemSpec& spec, const BranchState& state, const CVec& target,
                            const SectorDomain& domain, const ContinuationOptions& options = {});

/// Path from a to b inside the domain: log z_l interpolated with arg kept in
/// the window, ratios z_i / z_l interpolated linearly. Throws LeftDomain if
/// an endpoint is outside.
Path sector_path(const SectorDomain& domain, const CVec& a, const CVec& b);

/// Continuation along sector_path(state.z, target).
BranchState branch_travel(const ProblemSpec& spec, const BranchState& state, const CVec& target,
                          const SectorDomain& domain, const ContinuationOptions& options = {});

/// max of the fiber-equation residual and the group distance between exp(g)
/// and alpha.
double branch_residual(const ProblemSpec& spec, const BranchState& state);

struct Monodromy {
  int index = 0;                ///< turns until every unknown recurs
  std::vector<int> per_unknown; ///< turns until each unknown first recurs
};

/// Follow z0 * e^{2 pi i t} around the direction point turn by turn until
/// the fiber point recurs to 1e-8 (at most the nominal degree of turns).
/// Requires eta - theta >= pi. Throws NonConvergence when nothing recurs.
Monodromy monodromy(const ProblemSpec& spec, const SectorDomain& domain, const BranchState& state);

inline int monodromy_index(const ProblemSpec& spec, const SectorDomain& domain, const BranchState& state) {
  return monodromy(spec, domain, state).index;
}

}  // namespace expalg
