#include "expalg/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expalg/errors.hpp"
#include "expalg/torus.hpp"

namespace expalg {

namespace {

constexpr double kMinStep = 1e-13;
constexpr double kRecurTol = 1e-8;

double default_max_step(const CVec& z) { return std::max(0.5, 0.1 * z.norm_inf()); }

// Distance from `root` to the nearest other root of p.
double gap_in(const Poly& p, Complex root) {
  if (p.degree() <= 1) return std::numeric_limits<double>::infinity();
  const auto roots = poly_roots(p);
  std::vector<double> d;
  d.reserve(roots.size());
  for (const auto& r : roots) d.push_back(std::abs(r - root));
  std::sort(d.begin(), d.end());
  return d[1];
}

bool leading_ok(const Poly& p, int degree) {
  return p.degree() == degree && std::abs(p.leading()) > 1e-12 * p.coeff_norm();
}

CVec next_log(const ProblemSpec& spec, const GroupPoint& alpha, const CVec& g) {
  return log_group_near(spec.signature(), alpha, g);
}

}  // namespace

std::vector<BranchState> branch_base(const ProblemSpec& spec, const SectorDomain& domain, const CVec& z0) {
  if (!domain.contains(z0)) throw LeftDomain("base point is outside the sector domain");
  const auto fiber = fiber_roots(spec, z0);
  const auto& sig = spec.signature();
  std::vector<BranchState> out;
  out.reserve(fiber.size());
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const auto alpha = spec.alpha(fiber[i]);
    CVec g(sig.dimension());
    for (std::size_t k = 0; k < sig.dimension(); ++k) {
      if (sig.is_torus(k)) {
        g[k] = torus_log_near(std::get<Complex>(alpha[k]), Complex{});
      } else {
        g[k] = log_E(std::get<EPoint>(alpha[k]), sig.curve(k));
      }
    }
    out.push_back({z0, fiber[i], g, static_cast<int>(i)});
  }
  return out;
}

BranchState continue_along_path(const ProblemSpec& spec, const BranchState& state, const Path& path,
                                const SectorDomain* domain, const ContinuationOptions& options) {
  const auto& stages = spec.stages();
  const auto& sig = spec.signature();
  const std::size_t n = spec.dimension();

  std::vector<Complex> vals = spec.values(state.z, state.fiber);
  std::vector<double> gaps(stages.size());
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const Poly p = stages[s].equation.univariate(stages[s].unknown, vals);
    gaps[s] = gap_in(p, vals[stages[s].unknown]);
  }

  CVec z = state.z;
  CVec g = state.g;
  std::vector<Complex> prev_vals;
  double prev_dt = 0.0;
  double t = 0.0;
  double dt = 1.0;

  while (t < 1.0) {
    if (dt < kMinStep) {
      throw BranchPointOnPath("continuation step underflow near t = " + std::to_string(t) +
                              " (branch locus close to the path)");
    }
    const double t1 = std::min(1.0, t + dt);
    const double h = t1 - t;
    const CVec z1 = path(t1);
    const double max_step = options.max_step > 0.0 ? options.max_step : default_max_step(z);
    // the midpoint guards against closed or strongly curved paths
    if ((z1 - z).norm_inf() > max_step || (path(t + 0.5 * h) - z).norm_inf() > max_step) {
      dt *= 0.5;
      continue;
    }
    if (domain != nullptr && !domain->contains(z1)) throw LeftDomain("continuation path left the sector domain");

    std::vector<Complex> next = vals;
    std::copy(z1.begin(), z1.end(), next.begin());
    std::vector<double> next_gaps(stages.size());
    bool ok = true;
    for (std::size_t s = 0; s < stages.size() && ok; ++s) {
      const auto u = stages[s].unknown;
      const Poly p = stages[s].equation.univariate(u, next);
      if (!leading_ok(p, stages[s].degree)) {
        ok = false;
        break;
      }
      Complex predicted = vals[u];
      if (!prev_vals.empty()) predicted += (vals[u] - prev_vals[u]) * (h / prev_dt);
      const auto step = correct_root(p, vals[u], predicted, gaps[s]);
      if (!step) {
        ok = false;
        break;
      }
      next[u] = step->root;
      next_gaps[s] = step->gap;
    }
    CVec g1;
    if (ok) {
      FiberPoint f{std::vector<Complex>(next.begin() + static_cast<std::ptrdiff_t>(n), next.end())};
      try {
        g1 = next_log(spec, spec.alpha(f), g);
        for (std::size_t k = 0; k < n && ok; ++k) {
          if (std::abs(g1[k] - g[k]) >= 0.5 * sig.lattice_gap(k)) ok = false;
        }
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      dt *= 0.5;
      continue;
    }
    prev_vals = std::move(vals);
    prev_dt = h;
    vals = std::move(next);
    gaps = std::move(next_gaps);
    z = z1;
    g = std::move(g1);
    t = t1;
    dt = std::min(2.0 * dt, 1.0);
  }

  BranchState out;
  out.z = z;
  out.fiber = FiberPoint{std::vector<Complex>(vals.begin() + static_cast<std::ptrdiff_t>(n), vals.end())};
  out.g = g;
  out.branch_id = state.branch_id;
  return out;
}

BranchState branch_continue(const ProblemSpec& spec, const BranchState& state, const CVec& target,
                            const SectorDomain& domain, const ContinuationOptions& options) {
  if (target == state.z) return state;
  const CVec a = state.z;
  const CVec d = target - a;
  Path path = [a, d, target](double t) { return t >= 1.0 ? target : a + d * Complex(t); };
  return continue_along_path(spec, state, path, &domain, options);
}

Path sector_path(const SectorDomain& domain, const CVec& a, const CVec& b) {
  if (!domain.contains(a) || !domain.contains(b)) throw LeftDomain("path endpoint outside the sector domain");
  const std::size_t l = domain.chart();
  const Complex la{std::log(std::abs(a[l])), *domain.chart_arg(a[l])};
  const Complex lb{std::log(std::abs(b[l])), *domain.chart_arg(b[l])};
  std::vector<Complex> ra(a.size()), rb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ra[i] = a[i] / a[l];
    rb[i] = b[i] / b[l];
  }
  return [a, b, la, lb, ra, rb, l](double t) {
    if (t <= 0.0) return a;
    if (t >= 1.0) return b;
    const Complex zl = std::exp((1.0 - t) * la + t * lb);
    CVec z(a.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = i == l ? zl : ((1.0 - t) * ra[i] + t * rb[i]) * zl;
    return z;
  };
}

BranchState branch_travel(const ProblemSpec& spec, const BranchState& state, const CVec& target,
                          const SectorDomain& domain, const ContinuationOptions& options) {
  if (target == state.z) return state;
  return continue_along_path(spec, state, sector_path(domain, state.z, target), &domain, options);
}

double branch_residual(const ProblemSpec& spec, const BranchState& state) {
  const double fiber = spec.fiber_residual(state.z, state.fiber);
  const double log = group_distance(exp_group(spec.signature(), state.g), spec.alpha(state.fiber));
  return std::max(fiber, log);
}

Monodromy monodromy(const ProblemSpec& spec, const SectorDomain& domain, const BranchState& state) {
  if (domain.eta() - domain.theta() < kPi) {
    throw ValidationError("monodromy needs an arg window of width at least pi");
  }
  const std::size_t m = state.fiber.unknowns.size();
  const int max_turns = std::max(1, spec.nominal_degree());
  const CVec z0 = state.z;
  Path loop = [z0](double t) {
    if (t <= 0.0 || t >= 1.0) return z0;
    return z0 * std::exp(Complex(0.0, kTwoPi * t));
  };

  Monodromy out;
  out.per_unknown.assign(m, 0);
  auto recurs = [](Complex a, Complex b) { return std::abs(a - b) <= kRecurTol * std::max(1.0, std::abs(b)); };

  BranchState cur = state;
  for (int turn = 1; turn <= max_turns; ++turn) {
    cur = continue_along_path(spec, cur, loop, nullptr);
    bool all = true;
    for (std::size_t i = 0; i < m; ++i) {
      const bool back = recurs(cur.fiber.unknowns[i], state.fiber.unknowns[i]);
      if (back && out.per_unknown[i] == 0) out.per_unknown[i] = turn;
      all = all && back;
    }
    if (all) {
      out.index = turn;
      for (auto& e : out.per_unknown) {
        if (e == 0) e = turn;
      }
      return out;
    }
  }
  throw NonConvergence("branch did not recur within " + std::to_string(max_turns) + " turns", 0.0);
}

}  // namespace expalg
