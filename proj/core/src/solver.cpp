#include "expalg/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "expalg/errors.hpp"
#include "expalg/torus.hpp"

namespace expalg {

// ---------------------------------------------------------------------------
// Lattices

LatticeProduct::LatticeProduct(const GroupSignature& sig) {
  min_gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sig.dimension(); ++k) {
    if (sig.is_torus(k)) {
      basis_.push_back({kTorusPeriod, Complex{}});
    } else {
      const auto [b1, b2] = sig.curve(k).lattice().reduced_basis();
      basis_.push_back({b1, b2});
    }
    min_gap_ = std::min(min_gap_, sig.lattice_gap(k));
  }
}

std::vector<Complex> LatticeProduct::points_in_disc(std::size_t k, Complex center, double radius) const {
  std::vector<Complex> out;
  if (!(radius > 0.0)) return out;
  const auto& b = basis_.at(k);
  if (b.b2 == Complex{}) {
    // rank one: multiples of b1 = 2 pi i
    const double step = std::abs(b.b1);
    const Complex dir = b.b1 / step;
    const double c = (center * std::conj(dir)).real();
    const auto lo = static_cast<long long>(std::ceil((c - radius) / step));
    const auto hi = static_cast<long long>(std::floor((c + radius) / step));
    for (long long m = lo; m <= hi; ++m) {
      const Complex p = static_cast<double>(m) * b.b1;
      if (std::abs(p - center) < radius) out.push_back(p);
    }
    return out;
  }
  const double area = std::abs((std::conj(b.b1) * b.b2).imag());
  // coordinates of the centre in the (b1, b2) basis
  const double s0 = (std::conj(b.b2) * center).imag() / (std::conj(b.b2) * b.b1).imag();
  const double t0 = (std::conj(b.b1) * center).imag() / (std::conj(b.b1) * b.b2).imag();
  const double ds = radius * std::abs(b.b2) / area;
  const double dt = radius * std::abs(b.b1) / area;
  const auto s_lo = static_cast<long long>(std::floor(s0 - ds));
  const auto s_hi = static_cast<long long>(std::ceil(s0 + ds));
  const auto t_lo = static_cast<long long>(std::floor(t0 - dt));
  const auto t_hi = static_cast<long long>(std::ceil(t0 + dt));
  for (long long m = s_lo; m <= s_hi; ++m) {
    for (long long n = t_lo; n <= t_hi; ++n) {
      const Complex p = static_cast<double>(m) * b.b1 + static_cast<double>(n) * b.b2;
      if (std::abs(p - center) < radius) out.push_back(p);
    }
  }
  return out;
}

bool LatticeProduct::contains(const CVec& z, double tol) const {
  if (z.size() != basis_.size()) return false;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double slack = tol * std::max(1.0, std::abs(z[k]));
    const auto near = points_in_disc(k, z[k], std::max(slack, 1e-300) * 1.0000001);
    bool hit = false;
    for (const auto& p : near) hit = hit || std::abs(p - z[k]) <= slack;
    if (!hit) return false;
  }
  return true;
}

bool lattice_less(const CVec& a, const CVec& b) {
  const double na = a.norm2();
  const double nb = b.norm2();
  if (na != nb) return na < nb;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return a.size() < b.size();
}

std::vector<CVec> enumerate_lattice(const SectorDomain& domain, const LatticeProduct& lattice,
                                    const RadiusRange& range) {
  std::vector<CVec> out;
  if (range.empty()) return out;
  if (lattice.dimension() != domain.dimension()) throw ValidationError("lattice and domain dimensions differ");
  const std::size_t l = domain.chart();
  const double rmin = std::max(range.min, domain.inner_radius());
  if (!(rmin < range.max)) return out;

  std::vector<Complex> chart_points;
  for (const auto& p : lattice.points_in_disc(l, Complex{}, range.max)) {
    const double r = std::abs(p);
    if (r > rmin && r < range.max && domain.chart_arg(p)) chart_points.push_back(p);
  }

  for (const auto& p : chart_points) {
    std::vector<std::vector<Complex>> choices(domain.dimension());
    bool empty = false;
    for (std::size_t i = 0; i < domain.dimension(); ++i) {
      if (i == l) {
        choices[i] = {p};
      } else {
        choices[i] = lattice.points_in_disc(i, domain.direction()[i] * p, domain.epsilon() * std::abs(p));
      }
      empty = empty || choices[i].empty();
    }
    if (empty) continue;
    std::vector<std::size_t> idx(domain.dimension(), 0);
    while (true) {
      CVec z(domain.dimension());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = choices[i][idx[i]];
      if (domain.contains(z)) out.push_back(std::move(z));
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
      if (i == idx.size()) break;
    }
  }
  std::sort(out.begin(), out.end(), lattice_less);
  return out;
}

// ---------------------------------------------------------------------------
// Solving

SolutionRecord solve_at_lattice_point(const ProblemSpec& spec, const SectorDomain& domain,
                                      const BranchState& branch, const CVec& lambda, const SolveOptions& options) {
  if (!domain.contains(lambda)) throw LeftDomain("lattice point is outside the sector domain");
  BranchState state = branch_travel(spec, branch, lambda, domain, options.continuation);
  const CVec gamma = state.g;

  auto map = [&](const CVec& z) {
    state = branch_travel(spec, state, z, domain, options.continuation);
    return lambda + state.g;
  };
  const double tol = options.tol * std::max(1.0, lambda.norm_inf());
  const auto fp = fixed_point_solve(map, lambda, tol, options.max_iter);
  state = branch_travel(spec, state, fp.point, domain, options.continuation);

  SolutionRecord rec;
  rec.lambda = lambda;
  rec.s = fp.point;
  rec.branch_id = branch.branch_id;
  rec.iterations = fp.iterations;
  rec.contraction_ratio = fp.contraction_ratio;
  rec.gamma_estimate = gamma;
  rec.residual = group_distance(exp_group(spec.signature(), rec.s), spec.alpha(state.fiber));
  rec.f_residual = (rec.s - state.g - lambda).norm_inf();
  if (!(rec.f_residual < options.f_tol)) {
    throw NonConvergence("|F(s) - lambda| = " + std::to_string(rec.f_residual) + " above tolerance", rec.f_residual);
  }
  if (!(rec.residual < options.residual_tol)) {
    throw NonConvergence("group residual " + std::to_string(rec.residual) + " above tolerance", rec.residual);
  }
  return rec;
}

namespace {

std::string skip_reason(const std::exception& e) {
  if (dynamic_cast<const LeftDomain*>(&e) != nullptr) return std::string("left domain: ") + e.what();
  if (dynamic_cast<const NonConvergence*>(&e) != nullptr) return std::string("no convergence: ") + e.what();
  if (dynamic_cast<const BranchPointOnPath*>(&e) != nullptr) return std::string("branch point: ") + e.what();
  if (dynamic_cast<const DegenerateFiber*>(&e) != nullptr) return std::string("degenerate fiber: ") + e.what();
  return std::string("error: ") + e.what();
}

}  // namespace

SweepResult sweep(const ProblemSpec& spec, const SectorDomain& domain, std::span<const BranchState> bases,
                  std::span<const CVec> lambdas, const SolveOptions& options, unsigned jobs) {
  std::vector<CVec> points(lambdas.begin(), lambdas.end());
  std::sort(points.begin(), points.end(), lattice_less);
  std::vector<const BranchState*> branches;
  for (const auto& b : bases) branches.push_back(&b);
  std::sort(branches.begin(), branches.end(),
            [](const BranchState* a, const BranchState* b) { return a->branch_id < b->branch_id; });

  const std::size_t total = points.size() * branches.size();
  std::vector<std::optional<SolutionRecord>> solved(total);
  std::vector<std::optional<SkippedPoint>> failed(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto& lambda = points[task / branches.size()];
      const auto& base = *branches[task % branches.size()];
      try {
        solved[task] = solve_at_lattice_point(spec, domain, base, lambda, options);
      } catch (const Error& e) {
        failed[task] = SkippedPoint{lambda, base.branch_id, skip_reason(e)};
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  out.enumerated = total;
  for (std::size_t task = 0; task < total; ++task) {
    if (solved[task]) out.records.push_back(std::move(*solved[task]));
    if (failed[task]) out.skipped.push_back(std::move(*failed[task]));
  }
  return out;
}

CVec base_point(const ProblemSpec& spec, const SectorDomain& domain, const RadiusRange& range) {
  const double lo = std::max(range.min, 1.05 * domain.inner_radius());
  const double hi = std::max(range.max, 1.1 * lo);
  const double r = 0.5 * (lo + hi);
  const double mid = 0.5 * (domain.theta() + domain.eta());
  const double width = domain.eta() - domain.theta();
  for (int attempt = 0; attempt < 40; ++attempt) {
    const double shift = (attempt % 2 == 0 ? 1.0 : -1.0) * 0.0125 * width * ((attempt + 1) / 2);
    const CVec z = domain.on_ray(r, mid + shift);
    if (!domain.contains(z)) continue;
    try {
      fiber_roots(spec, z);
      return z;
    } catch (const DegenerateFiber&) {
    }
  }
  throw DegenerateFiber("no generic base point found in the sector domain");
}

// ---------------------------------------------------------------------------
// Asymptotics

AsymptoticReport build_asymptotics(const GroupSignature& sig, std::span<const SolutionRecord> records) {
  std::map<int, std::vector<const SolutionRecord*>> by_branch;
  for (const auto& r : records) by_branch[r.branch_id].push_back(&r);

  AsymptoticReport report;
  const std::size_t n = sig.dimension();
  for (auto& [id, recs] : by_branch) {
    std::sort(recs.begin(), recs.end(),
              [](const SolutionRecord* a, const SolutionRecord* b) { return lattice_less(a->lambda, b->lambda); });
    BranchAsymptotics ba;
    ba.branch_id = id;
    ba.gamma = CVec(n);
    const std::size_t take = std::min<std::size_t>(5, recs.size());
    for (std::size_t j = recs.size() - take; j < recs.size(); ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (sig.is_elliptic(k)) ba.gamma[k] += (recs[j]->s[k] - recs[j]->lambda[k]) / static_cast<double>(take);
      }
    }
    for (const auto* r : recs) {
      double dev = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        Complex pred = ba.gamma[k];
        if (sig.is_torus(k)) pred = r->gamma_estimate ? (*r->gamma_estimate)[k] : Complex{};
        dev = std::max(dev, std::abs(r->s[k] - r->lambda[k] - pred));
      }
      ba.decay.push_back({r->lambda.norm2(), dev});
    }
    ba.trend_ok = ba.decay.size() >= 2 && ba.decay.back().deviation < ba.decay.front().deviation;
    report.branches.push_back(std::move(ba));
  }
  if (sig.has_torus() && !records.empty()) report.log_growth_constant = fit_log_growth(sig, records);
  return report;
}

double fit_log_growth(const GroupSignature& sig, std::span<const SolutionRecord> records) {
  double c = 0.0;
  for (const auto& r : records) {
    const double norm = r.lambda.norm2();
    if (norm <= std::exp(1.0)) continue;
    for (std::size_t k = 0; k < sig.dimension(); ++k) {
      if (sig.is_torus(k)) c = std::max(c, std::abs(r.s[k] - r.lambda[k]) / std::log(norm));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Zero counting

int count_zeros_window(const std::function<Complex(Complex)>& h, const Box& box) {
  if (!(box.re_min < box.re_max) || !(box.im_min < box.im_max)) throw std::invalid_argument("empty box");
  const Complex corners[5] = {{box.re_min, box.im_min},
                              {box.re_max, box.im_min},
                              {box.re_max, box.im_max},
                              {box.re_min, box.im_max},
                              {box.re_min, box.im_min}};
  constexpr double kBoundaryZero = 1e-8;
  constexpr double kMaxTurn = kPi / 4.0;
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const Complex a = corners[e];
    const Complex b = corners[e + 1];
    const double base = std::min(1.0 / 64.0, 0.05 / std::abs(b - a));
    Complex h0 = h(a);
    if (std::abs(h0) < kBoundaryZero) throw ZeroOnBoundary("h vanishes at a box corner");
    double t = 0.0;
    double dt = base;
    while (t < 1.0) {
      const double t1 = std::min(1.0, t + dt);
      const Complex h1 = h(a + (b - a) * t1);
      if (std::abs(h1) < kBoundaryZero) throw ZeroOnBoundary("h vanishes on the box boundary");
      const double turn = std::arg(h1 / h0);
      if (std::abs(turn) > kMaxTurn) {
        dt *= 0.5;
        if (dt < 1e-14) throw ZeroOnBoundary("argument jumps on the box boundary");
        continue;
      }
      total += turn;
      t = t1;
      h0 = h1;
      dt = std::min(2.0 * dt, base);
    }
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

// ---------------------------------------------------------------------------
// Contraction

double measure_contraction(const ProblemSpec& spec, const SectorDomain& domain, std::span<const BranchState> bases,
                           const RadiusRange& range, int samples, std::uint64_t seed) {
  const double lo = std::max(range.min, 1.02 * domain.inner_radius());
  if (!(lo < range.max)) throw ValidationError("contraction sampling range is empty");
  std::mt19937_64 rng(seed);
  const double margin = 0.05 * (domain.eta() - domain.theta());
  std::uniform_real_distribution<double> phi(domain.theta() + margin, domain.eta() - margin);
  std::uniform_real_distribution<double> logr(std::log(lo), std::log(range.max));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);

  std::vector<CVec> points;
  for (int i = 0; i < samples; ++i) {
    CVec z = domain.on_ray(std::exp(logr(rng)), phi(rng));
    const Complex zl = z[domain.chart()];
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (j == domain.chart()) continue;
      const Complex offset = std::polar(0.5 * domain.epsilon() * std::sqrt(unit(rng)), angle(rng));
      z[j] = (domain.direction()[j] + offset) * zl;
    }
    points.push_back(std::move(z));
  }

  double worst = 0.0;
  int measured = 0;
  for (const auto& z : points) {
    for (const auto& base : bases) {
      try {
        const BranchState at = branch_travel(spec, base, z, domain);
        auto g = [&](const CVec& w) { return branch_travel(spec, at, w, domain).g; };
        const double h = 1e-5 * std::max(1.0, z.norm_inf());
        worst = std::max(worst, finite_diff_jacobian(g, z, h).norm_inf());
        ++measured;
      } catch (const Error&) {
        // sample too close to the branch locus; skip it
      }
    }
  }
  if (measured == 0) throw NonConvergence("contraction could not be measured at any sample", 0.0);
  return worst;
}

}  // namespace expalg
