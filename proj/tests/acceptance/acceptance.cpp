// Acceptance suite: one PASS/FAIL line per criterion. Run all criteria, or a
// single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "cli.hpp"
#include "expalg/branch.hpp"
#include "expalg/elliptic.hpp"
#include "expalg/errors.hpp"
#include "expalg/report.hpp"
#include "expalg/solver.hpp"
#include "expalg/spec_file.hpp"

using namespace expalg;

namespace {

// Tolerances and limits.
constexpr double kG3Tol = 1e-12;
constexpr double kG2Tol = 1e-8;
constexpr int kG2OracleN = 500;
constexpr double kOdeTol = 1e-9;
constexpr double kPeriodTol = 1e-10;
constexpr double kTorusResidual = 1e-10;
constexpr double kTorusOracle = 1e-9;
constexpr int kZeroCount = 39;
constexpr double kContraction = 0.5;
constexpr int kContractionSamples = 200;
constexpr int kMinFullPoints = 10;
constexpr double kMaxSkipFraction = 0.2;

constexpr double kLimit1 = 5.0;
constexpr double kLimit2 = 2.0;
constexpr double kLimit3 = 5.0;
constexpr double kLimit5 = 60.0;

struct Outcome {
  bool pass;
  std::string detail;
};

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string spec_path(const std::string& name) { return std::string(EXPALG_SPECS_DIR) + "/" + name; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "expalg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Torus identity e^z = z solved directly through the library.
struct TorusRun {
  SpecFile spec;
  SectorDomain domain;
  SweepResult result;
};

TorusRun solve_torus(const RadiusRange& range) {
  SpecFile spec = load_spec(spec_path("torus_identity.spec"));
  const auto& s = spec.solver;
  SectorDomain d = SectorDomain::for_signature(spec.problem.signature(), s.direction, s.chart, s.epsilon, *s.theta,
                                               *s.eta);
  const auto bases = branch_base(spec.problem, d, base_point(spec.problem, d, range));
  const auto lambdas = enumerate_lattice(d, LatticeProduct(spec.problem.signature()), range);
  auto result = sweep(spec.problem, d, bases, lambdas);
  return {std::move(spec), std::move(d), std::move(result)};
}

long torus_k(const SolutionRecord& r) { return std::lround(r.lambda[0].imag() / kTwoPi); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = clock_type::now();
  const EllipticCurve curve(Lattice(1.0, Complex(0, 1)));
  const double g3 = std::abs(curve.g3());
  const double g2_err = std::abs(curve.g2() - oracle::square_lattice_g2(kG2OracleN));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double ode = 0.0, period = 0.0;
  int n = 0;
  while (n < 1000) {
    const Complex z(u(rng), u(rng));
    if (std::abs(z) < 0.05) continue;
    ++n;
    const auto [p, dp] = curve.wp_and_prime(z);
    const Complex rhs = 4.0 * p * p * p - curve.g2() * p - curve.g3();
    ode = std::max(ode, std::abs(dp * dp - rhs) / (1.0 + std::pow(std::abs(p), 3)));
    const double scale = std::max(1.0, std::abs(p));
    period = std::max(period, std::abs(wp(z + 1.0, curve) - p) / scale);
    period = std::max(period, std::abs(wp(z + Complex(0, 1), curve) - p) / scale);
  }
  const double secs = since(t0);
  const bool pass = g3 < kG3Tol && g2_err < kG2Tol && ode < kOdeTol && period < kPeriodTol && secs < kLimit1;
  return {pass, "|g3| " + num(g3) + ", |g2 - oracle| " + num(g2_err) + ", ODE " + num(ode) + ", periodicity " +
                    num(period) + ", " + num(secs) + " s"};
}

Outcome criterion2() {
  const auto t0 = clock_type::now();
  const auto r = run({"solve", "--spec", spec_path("torus_identity.spec")});
  const double secs = since(t0);
  if (r.code != 0) return {false, "solve exited with " + std::to_string(r.code) + ": " + r.err};
  const auto rep = from_json(r.out);
  double worst_res = 0.0, worst_oracle = 0.0;
  std::map<long, int> seen;
  for (const auto& rec : rep.records) {
    const long k = torus_k(rec);
    if (std::abs(k) < 3 || std::abs(k) > 40) continue;
    ++seen[k];
    const Complex s = rec.s[0];
    worst_res = std::max(worst_res, std::abs(std::exp(s) - s) / std::abs(s));
    const Complex ref = oracle::newton_exp_identity(rec.lambda[0] + std::log(rec.lambda[0]));
    worst_oracle = std::max(worst_oracle, std::abs(s - ref));
  }
  bool complete = true;
  for (long k = 3; k <= 40; ++k) complete = complete && seen[k] == 1 && seen[-k] == 1;
  const bool pass = complete && worst_res < kTorusResidual && worst_oracle < kTorusOracle && secs < kLimit2;
  return {pass, std::to_string(seen.size()) + " lattice points, |e^s - s|/|s| " + num(worst_res) +
                    ", |s - newton| " + num(worst_oracle) + ", " + num(secs) + " s"};
}

Outcome criterion3() {
  const auto t0 = clock_type::now();
  const auto tr = solve_torus({5.0, 300.0});
  const Box box{0.0, std::log(100.0 * kPi), kTwoPi, 80.0 * kPi};
  const int zeros = count_zeros_window([](Complex z) { return std::exp(z) - z; }, box);
  int inside = 0;
  for (const auto& r : tr.result.records) {
    const Complex s = r.s[0];
    if (s.real() > box.re_min && s.real() < box.re_max && s.imag() > box.im_min && s.imag() < box.im_max) ++inside;
  }
  const double secs = since(t0);
  const bool pass = zeros == kZeroCount && inside == kZeroCount && secs < kLimit3;
  return {pass, "argument principle " + std::to_string(zeros) + ", records in box " + std::to_string(inside) + ", " +
                    num(secs) + " s"};
}

Outcome criterion4() {
  const auto tr = solve_torus({5.0, 2.0 * kPi * 60.5});
  const auto& sig = tr.spec.problem.signature();
  std::vector<SolutionRecord> fit, hold;
  const SolutionRecord *at10 = nullptr, *at40 = nullptr;
  for (const auto& r : tr.result.records) {
    const long k = torus_k(r);
    (std::abs(k) <= 40 ? fit : hold).push_back(r);
    if (k == 10) at10 = &r;
    if (k == 40) at40 = &r;
  }
  if (!at10 || !at40) return {false, "missing records at k = 10 or 40"};
  const double C = fit_log_growth(sig, fit);
  double worst = 0.0;
  std::size_t held = 0;
  for (const auto& r : hold) {
    if (std::abs(torus_k(r)) > 60) continue;
    ++held;
    worst = std::max(worst, std::abs(r.s[0] - r.lambda[0]) / std::log(std::abs(r.lambda[0])));
  }
  const auto decay = [](const SolutionRecord& r) { return std::abs(r.s[0] - r.lambda[0] - (*r.gamma_estimate)[0]); };
  const double d10 = decay(*at10), d40 = decay(*at40);
  const bool pass = held == 40 && worst <= C && d40 < d10;
  return {pass, "C = " + num(C) + " from |k| <= 40, held-out max ratio " + num(worst) + " over " +
                    std::to_string(held) + " points, decay " + num(d10) + " (k=10) > " + num(d40) + " (k=40)"};
}

Outcome criterion5() {
  const auto t0 = clock_type::now();
  const auto r = run({"solve", "--spec", spec_path("wp_example.spec")});
  const double secs = since(t0);
  if (r.code != 0) return {false, "solve exited with " + std::to_string(r.code) + ": " + r.err};
  const auto rep = from_json(r.out);
  const auto spec = load_spec(spec_path("wp_example.spec"));
  const auto& c = spec.problem.signature().curve(0);

  std::map<std::vector<double>, int> per_point;
  double worst_res = 0.0, worst_eq = 0.0;
  for (const auto& rec : rep.records) {
    const double a = std::abs(rec.lambda[0]), b = std::abs(rec.lambda[1]);
    if (a > 20.0 && a < 40.0 && b > 20.0 && b < 40.0) {
      ++per_point[{rec.lambda[0].real(), rec.lambda[0].imag(), rec.lambda[1].real(), rec.lambda[1].imag()}];
    }
    worst_res = std::max(worst_res, rec.residual);
    // the original equation: p'(p(s1)^2) = s1 with s2 = p(s1)^2 up to the lattice
    const Complex p1 = wp(rec.s[0], c);
    worst_eq = std::max(worst_eq, std::abs(wp_prime(p1 * p1, c) - rec.s[0]) / std::abs(rec.s[0]));
  }
  int full = 0;
  for (const auto& [k, n] : per_point) full += n == 12 ? 1 : 0;
  const double skip = static_cast<double>(rep.skipped.size()) / static_cast<double>(rep.enumerated);
  const bool pass = rep.degree == 12 && full >= kMinFullPoints && skip < kMaxSkipFraction && worst_res < 1e-10 &&
                    worst_eq < 1e-9 && secs < kLimit5;
  return {pass, "degree " + std::to_string(rep.degree) + ", " + std::to_string(full) +
                    " lattice points with all 12 solutions, skipped " + num(100.0 * skip) + "%, residual " +
                    num(worst_res) + ", equation " + num(worst_eq) + ", " + num(secs) + " s"};
}

double contraction_of(const std::string& name, double eps_scale) {
  const auto spec = load_spec(spec_path(name));
  const auto& s = spec.solver;
  const double theta = s.theta.value_or(-kPi);
  const double eta = s.eta.value_or(theta + kTwoPi - kDefaultWindowMargin);
  const auto d = SectorDomain::for_signature(spec.problem.signature(), s.direction, s.chart, s.epsilon * eps_scale,
                                             theta, eta);
  const RadiusRange range{2.0 * d.inner_radius(), 4.0 * d.inner_radius()};
  const auto bases = branch_base(spec.problem, d, base_point(spec.problem, d, range));
  return measure_contraction(spec.problem, d, bases, range, kContractionSamples);
}

Outcome criterion6() {
  bool pass = true;
  std::string detail;
  for (const std::string name : {"torus_identity.spec", "wp_example.spec"}) {
    const double base = contraction_of(name, 1.0);
    const double doubled = contraction_of(name, 0.5);
    pass = pass && base < kContraction && doubled < base;
    detail += (detail.empty() ? "" : "; ") + name + " " + num6(base) + " -> " + num6(doubled);
  }
  return {pass, detail + " (inner radius doubled)"};
}

Outcome criterion7() {
  const auto sq = run({"monodromy", "--spec", spec_path("sqrt_torus.spec")});
  const auto id = run({"monodromy", "--spec", spec_path("torus_identity.spec")});
  const bool sq_ok = sq.code == 0 && sq.out == "degree 2\nbranch 0: e = 2 (w1:2)\nbranch 1: e = 2 (w1:2)\n";
  const bool id_ok = id.code == 0 && id.out == "degree 1\nbranch 0: e = 1 (w1:1)\n";

  const auto spec = load_spec(spec_path("wp_example.spec"));
  const auto& p = spec.problem;
  const SectorDomain d(spec.solver.direction, spec.solver.chart, spec.solver.epsilon, *spec.solver.theta,
                       *spec.solver.theta + kPi);
  const auto bases = branch_base(p, d, d.on_ray(25.5, 0.8));
  int x1_ok = 0;
  for (const auto& b : bases) {
    const auto m = monodromy(p, d, b);
    x1_ok += m.per_unknown[0] == 2 ? 1 : 0;
  }
  const bool wp_ok = x1_ok == static_cast<int>(bases.size());
  return {sq_ok && id_ok && wp_ok, std::string("sqrt ") + (sq_ok ? "e = 2" : "wrong") + ", identity " +
                                       (id_ok ? "e = 1" : "wrong") + ", x1 stage e = 2 on " + std::to_string(x1_ok) +
                                       "/" + std::to_string(bases.size()) + " branches"};
}

Outcome criterion8() {
  const auto spec = load_spec(spec_path("wp_example.spec"));
  const auto& p = spec.problem;
  const SectorDomain d = SectorDomain::for_signature(p.signature(), spec.solver.direction, spec.solver.chart, 0.05,
                                                     0.6, 0.7);
  const LatticeProduct lat(p.signature());
  std::vector<CVec> lambdas = enumerate_lattice(d, lat, {21.0, 23.0});
  const std::size_t inner = lambdas.size();
  const auto outer = enumerate_lattice(d, lat, {100.0, 101.0});
  lambdas.insert(lambdas.end(), outer.begin(), outer.end());
  const auto bases = branch_base(p, d, base_point(p, d, {21.0, 23.0}));
  const auto res = sweep(p, d, bases, lambdas);
  const auto asym = build_asymptotics(p.signature(), res.records);
  int ok = 0;
  double worst_first = 0.0, worst_last = 0.0;
  for (const auto& b : asym.branches) {
    ok += b.trend_ok ? 1 : 0;
    if (!b.decay.empty()) {
      worst_first = std::max(worst_first, b.decay.front().deviation);
      worst_last = std::max(worst_last, b.decay.back().deviation);
    }
  }
  const bool pass = asym.branches.size() == 12 && ok == 12;
  return {pass, std::to_string(ok) + "/" + std::to_string(asym.branches.size()) + " branches decreasing over " +
                    std::to_string(inner) + " + " + std::to_string(outer.size()) +
                    " lattice points, max deviation " + num(worst_first) + " -> " + num(worst_last)};
}

Outcome criterion9() {
  const auto one = run({"solve", "--spec", spec_path("sqrt_torus.spec"), "--jobs", "1"});
  const auto eight = run({"solve", "--spec", spec_path("sqrt_torus.spec"), "--jobs", "8"});
  const auto t1 = run({"solve", "--spec", spec_path("torus_identity.spec"), "--jobs", "1"});
  const auto t8 = run({"solve", "--spec", spec_path("torus_identity.spec"), "--jobs", "8"});
  const bool pass = one.code == 0 && t1.code == 0 && one.out == eight.out && t1.out == t8.out;
  return {pass, std::to_string(one.out.size() + t1.out.size()) + " bytes of JSON compared, " +
                    (pass ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) which.push_back(std::atoi(argv[++i]));
  }
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (const int c : which) {
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: FAIL unknown criterion\n", c);
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s %s\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
