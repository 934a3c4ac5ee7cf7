#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "expalg/branch.hpp"
#include "expalg/errors.hpp"
#include "expalg/report.hpp"
#include "expalg/solver.hpp"
#include "expalg/spec_file.hpp"
#include "expalg/torus.hpp"

namespace expalg::cli {

namespace {

constexpr double kContractionBound = 0.5;
constexpr int kMaxEpsilonHalvings = 4;
constexpr int kContractionSamples = 200;
constexpr double kVerifyResidual = 1e-8;
constexpr double kVerifyDefect = 1e-9;
constexpr double kDistinct = 1e-6;
constexpr double kTrendSpan = 2.0;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(Complex c) {
  char buf[90];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
  return buf;
}

std::string fmt(const CVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

RadiusRange parse_radius(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("radius must be MIN:MAX", 1, 1);
  const Complex lo = parse_complex(text.substr(0, colon));
  const Complex hi = parse_complex(text.substr(colon + 1));
  if (lo.imag() != 0.0 || hi.imag() != 0.0) throw ParseError("radius bounds must be real", 1, 1);
  return {lo.real(), hi.real()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DomainArgs {
  std::optional<double> theta;
  std::optional<double> eta;
  std::optional<double> epsilon;
  std::optional<std::string> radius;
};

struct Geometry {
  SectorDomain domain;
  RadiusRange range;
};

Geometry make_geometry(const SpecFile& spec, const DomainArgs& args, std::optional<double> epsilon_override = {}) {
  const auto& s = spec.solver;
  const double theta = args.theta.value_or(s.theta.value_or(-kPi));
  const double eta = args.eta.value_or(s.eta.value_or(theta + kTwoPi - kDefaultWindowMargin));
  const double eps = epsilon_override.value_or(args.epsilon.value_or(s.epsilon));
  auto domain = SectorDomain::for_signature(spec.problem.signature(), s.direction, s.chart, eps, theta, eta);
  RadiusRange range;
  if (args.radius) {
    range = parse_radius(*args.radius);
  } else if (s.radius) {
    range = *s.radius;
  } else {
    range = {2.0 * domain.inner_radius(), 4.0 * domain.inner_radius()};
  }
  return {std::move(domain), range};
}

SectorDomain monodromy_domain(const SectorDomain& d) {
  const double width = std::max(d.eta() - d.theta(), kPi);
  return {d.direction(), d.chart(), d.epsilon(), d.theta(), d.theta() + width};
}

std::vector<MonodromyEntry> all_monodromy(const ProblemSpec& spec, const SectorDomain& domain,
                                          const std::vector<BranchState>& bases) {
  const SectorDomain wide = monodromy_domain(domain);
  std::vector<MonodromyEntry> out;
  for (const auto& b : bases) {
    MonodromyEntry e;
    e.branch_id = b.branch_id;
    try {
      const auto m = monodromy(spec, wide, b);
      e.index = m.index;
      e.per_unknown = m.per_unknown;
    } catch (const Error&) {
      e.index = 0;
    }
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string spec;
  DomainArgs domain;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  unsigned jobs = 1;
};

int run_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto seconds = [](clock::time_point from) { return std::chrono::duration<double>(clock::now() - from).count(); };

  std::optional<SpecFile> spec;
  try {
    spec.emplace(load_spec(a.spec));
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ValidationError& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kParseFailure;
  }
  const auto& problem = spec->problem;
  const auto& sig = problem.signature();

  SolveOptions opts;
  opts.tol = a.tol.value_or(spec->solver.tol);
  opts.max_iter = spec->solver.max_iter;
  opts.residual_tol = spec->solver.residual_tol;

  int degree = 0;
  std::optional<Geometry> geo;
  std::vector<BranchState> bases;
  double contraction = 0.0;
  const auto t_setup = clock::now();
  try {
    degree = detect_degree(problem);
    try {
      geo.emplace(make_geometry(*spec, a.domain));
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << "\n";
      return kParseFailure;
    }
    if (geo->range.empty()) {
      err << "empty radius range: no lattice points to solve at\n";
      return kNoSolutions;
    }
    double eps = geo->domain.epsilon();
    for (int halving = 0;; ++halving) {
      bases = branch_base(problem, geo->domain, base_point(problem, geo->domain, geo->range));
      contraction = measure_contraction(problem, geo->domain, bases, geo->range, kContractionSamples);
      if (contraction < kContractionBound) break;
      if (halving == kMaxEpsilonHalvings) {
        err << "contraction gate failed: |dG| = " << fmt(contraction) << " >= 1/2 after " << kMaxEpsilonHalvings
            << " halvings of epsilon\n";
        return kDegenerateGeometry;
      }
      eps *= 0.5;
      err << "note: |dG| = " << fmt(contraction) << ", shrinking epsilon to " << fmt(eps) << "\n";
      geo.emplace(make_geometry(*spec, a.domain, eps));
    }
  } catch (const ValidationError& e) {
    // bad windows and degenerate direction points
    err << "degenerate geometry: " << e.what() << "\n";
    return kDegenerateGeometry;
  } catch (const DegenerateFiber& e) {
    err << "degenerate geometry: " << e.what() << "\n";
    return kDegenerateGeometry;
  } catch (const Error& e) {
    err << "degenerate geometry: " << e.what() << "\n";
    return kDegenerateGeometry;
  }
  const double setup_s = seconds(t_setup);

  const auto t_mono = clock::now();
  RunReport rep;
  rep.spec_digest = spec->digest;
  rep.degree = degree;
  rep.unknowns.assign(problem.names().begin() + static_cast<std::ptrdiff_t>(problem.dimension()),
                      problem.names().end());
  rep.domain = {geo->domain.direction(), geo->domain.chart(), geo->domain.epsilon(), geo->domain.theta(),
                geo->domain.eta()};
  rep.radius = geo->range;
  rep.contraction = contraction;
  rep.monodromy = all_monodromy(problem, geo->domain, bases);
  const double mono_s = seconds(t_mono);

  const auto t_sweep = clock::now();
  const auto lambdas = enumerate_lattice(geo->domain, LatticeProduct(sig), geo->range);
  auto result = sweep(problem, geo->domain, bases, lambdas, opts, std::max(1u, a.jobs));
  const double sweep_s = seconds(t_sweep);
  rep.enumerated = result.enumerated;
  rep.records = std::move(result.records);
  rep.skipped = std::move(result.skipped);
  rep.asymptotics = build_asymptotics(sig, rep.records);

  const std::string text = a.format == "csv" ? to_csv(rep) : to_json(rep);
  if (a.out.empty() || a.out == "-") {
    out << text;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) {
      err << "cannot write " << a.out << "\n";
      return kInvariantFailure;
    }
    f << text;
  }

  err << "degree " << degree << ", " << lambdas.size() << " lattice points, " << rep.records.size() << " records, "
      << rep.skipped.size() << " skipped\n";
  char timing[160];
  std::snprintf(timing, sizeof timing, "timings: setup %.3f s, monodromy %.3f s, sweep %.3f s, total %.3f s\n",
                setup_s, mono_s, sweep_s, seconds(t_start));
  err << timing;

  if (rep.records.empty()) {
    err << "no convergent lattice points\n";
    return kNoSolutions;
  }
  int bad = 0;
  for (const auto& r : rep.records) {
    const bool ok = r.residual < opts.residual_tol && r.f_residual < opts.f_tol && geo->domain.contains(r.s);
    if (!ok) ++bad;
  }
  if (bad > 0) {
    err << bad << " records fail their invariants\n";
    return kInvariantFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

// For a single torus factor whose one equation is linear in w1 with a
// constant leading coefficient, w1 = p(z1) for a polynomial p.
std::optional<std::function<Complex(Complex)>> polynomial_alpha(const ProblemSpec& spec) {
  if (spec.dimension() != 1 || !spec.signature().is_torus(0) || spec.stages().size() != 1) return std::nullopt;
  const auto& st = spec.stages()[0];
  if (st.degree != 1) return std::nullopt;
  const MPoly eq = st.equation;
  const std::size_t w = st.unknown;
  const std::vector<Complex> v0{Complex(0.0), Complex{}};
  const std::vector<Complex> v1{Complex(1.7, -0.3), Complex{}};
  const Complex a0 = eq.univariate(w, v0).coeffs().size() > 1 ? eq.univariate(w, v0).coeffs()[1] : Complex{};
  const Complex a1 = eq.univariate(w, v1).coeffs().size() > 1 ? eq.univariate(w, v1).coeffs()[1] : Complex{};
  if (a0 == Complex{} || std::abs(a0 - a1) > 1e-14 * std::abs(a0)) return std::nullopt;
  return [eq, w](Complex z) {
    const std::vector<Complex> v{z, Complex{}};
    const Poly p = eq.univariate(w, v);
    return -p.coeffs()[0] / p.coeffs()[1];
  };
}

int run_verify(const std::string& spec_path, const std::string& report_path, std::ostream& out, std::ostream& err) {
  std::optional<SpecFile> spec;
  RunReport rep;
  std::string spec_text;
  try {
    spec_text = read_file(spec_path);
    spec.emplace(parse_spec(spec_text));
    rep = from_json(read_file(report_path));
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kParseFailure;
  }
  const auto& problem = spec->problem;
  const auto& sig = problem.signature();
  const LatticeProduct lattice(sig);
  std::vector<Check> checks;

  checks.push_back({"spec digest", rep.spec_digest == spec->digest, rep.spec_digest});

  // per-record residuals from freshly solved fibers
  std::size_t bad_residual = 0, bad_lattice = 0, bad_defect = 0;
  double worst_residual = 0.0, worst_defect = 0.0;
  std::string worst_residual_at, worst_defect_at;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const auto& r = rep.records[i];
    double best = std::numeric_limits<double>::infinity();
    std::optional<FiberPoint> best_fiber;
    try {
      const GroupPoint e = exp_group(sig, r.s);
      for (const auto& f : fiber_roots(problem, r.s)) {
        const double d = group_distance(e, problem.alpha(f));
        if (d < best) {
          best = d;
          best_fiber = f;
        }
      }
    } catch (const Error&) {
    }
    const std::string where = "record " + std::to_string(i) + " lambda " + fmt(r.lambda) + " branch " +
                              std::to_string(r.branch_id);
    if (!(best < kVerifyResidual)) ++bad_residual;
    if (!(best <= worst_residual)) {
      worst_residual = best;
      worst_residual_at = where;
    }
    if (!lattice.contains(r.lambda)) ++bad_lattice;
    double defect = std::numeric_limits<double>::infinity();
    if (best_fiber) {
      try {
        const CVec g = log_group_near(sig, problem.alpha(*best_fiber), r.s - r.lambda);
        defect = (r.s - g - r.lambda).norm_inf();
      } catch (const Error&) {
      }
    }
    if (!(defect < kVerifyDefect)) ++bad_defect;
    if (!(defect <= worst_defect)) {
      worst_defect = defect;
      worst_defect_at = where;
    }
  }
  checks.push_back({"record residuals", bad_residual == 0,
                    std::to_string(rep.records.size() - bad_residual) + "/" + std::to_string(rep.records.size()) +
                        " below " + fmt(kVerifyResidual) + "; worst " + fmt(worst_residual) +
                        (worst_residual_at.empty() ? "" : " at " + worst_residual_at)});
  checks.push_back({"lambda in lattice", bad_lattice == 0, std::to_string(bad_lattice) + " off-lattice points"});
  checks.push_back({"F(s) = lambda", bad_defect == 0,
                    "worst " + fmt(worst_defect) + (worst_defect_at.empty() ? "" : " at " + worst_defect_at)});

  // distinct solutions per lattice point
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.records.size() && rep.records[j].lambda == rep.records[i].lambda; ++j) {
      closest = std::min(closest, (rep.records[i].s - rep.records[j].s).norm_inf());
    }
  }
  checks.push_back({"distinct solutions", !(closest <= kDistinct), "closest pair " + fmt(closest)});

  // asymptotic trends recomputed from the records
  // The endpoint comparison only means something once |lambda| spans a real
  // range; below kTrendSpan it is reported but not judged.
  const auto asym = build_asymptotics(sig, rep.records);
  std::size_t trends = 0, trends_ok = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rep.records) {
    lo = std::min(lo, r.lambda.norm2());
    hi = std::max(hi, r.lambda.norm2());
  }
  for (const auto& b : asym.branches) {
    if (b.decay.size() < 2) continue;
    ++trends;
    trends_ok += b.trend_ok ? 1 : 0;
  }
  const std::string trend_detail = std::to_string(trends_ok) + "/" + std::to_string(trends) +
                                   " branches decreasing, |lambda| in [" + fmt(lo) + ", " + fmt(hi) + "]";
  if (hi >= kTrendSpan * lo) {
    checks.push_back({"decay trend", trends_ok == trends, trend_detail});
  } else {
    checks.push_back({"decay trend", true, "n/a (range too narrow): " + trend_detail});
  }
  if (asym.log_growth_constant) {
    const bool same = rep.asymptotics.log_growth_constant &&
                      std::abs(*rep.asymptotics.log_growth_constant - *asym.log_growth_constant) <=
                          1e-9 * std::max(1.0, *asym.log_growth_constant);
    checks.push_back({"log growth constant", same, "C = " + fmt(*asym.log_growth_constant)});
  }

  // argument principle for e^z = p(z)
  if (const auto p = polynomial_alpha(problem); p && !rep.records.empty()) {
    bool ok = true;
    std::string detail;
    for (const int sign : {1, -1}) {
      std::vector<const SolutionRecord*> side;
      for (const auto& r : rep.records) {
        if (r.s[0].imag() * sign > 0) side.push_back(&r);
      }
      if (side.empty()) continue;
      Box box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (const auto* r : side) {
        box.re_min = std::min(box.re_min, r->s[0].real() - 1.0);
        box.re_max = std::max(box.re_max, r->s[0].real() + 1.0);
        box.im_min = std::min(box.im_min, r->s[0].imag() - kPi);
        box.im_max = std::max(box.im_max, r->s[0].imag() + kPi);
      }
      const auto fn = *p;
      try {
        const int zeros = count_zeros_window([&](Complex z) { return std::exp(z) - fn(z); }, box);
        ok = ok && zeros == static_cast<int>(side.size());
        detail += (detail.empty() ? "" : "; ") + std::string(sign > 0 ? "upper" : "lower") + " " +
                  std::to_string(zeros) + " zeros vs " + std::to_string(side.size()) + " records";
      } catch (const ZeroOnBoundary& e) {
        ok = false;
        detail += std::string("zero on boundary: ") + e.what();
      }
    }
    checks.push_back({"zero count", ok, detail});
  }

  bool all = true;
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    all = all && c.pass;
    out << (c.pass ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ') << c.detail
        << "\n";
  }
  out << (all ? "verify: all checks passed\n" : "verify: FAILED\n");
  return all ? kOk : kInvariantFailure;
}

// ---------------------------------------------------------------------------
// invariants / monodromy

int run_invariants(const std::string& w1_text, const std::string& w2_text, bool as_json, std::ostream& out,
                   std::ostream& err) {
  Complex w1, w2;
  try {
    w1 = parse_complex(w1_text);
    w2 = parse_complex(w2_text);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailure;
  }
  try {
    const Lattice lat(w1, w2);
    const EllipticCurve curve(lat);
    const FundamentalDomain cell{lat};
    const auto corners = cell.corners();
    if (as_json) {
      out << "{\n  \"omega1\": [" << fmt(w1.real()) << ", " << fmt(w1.imag()) << "],\n  \"omega2\": ["
          << fmt(w2.real()) << ", " << fmt(w2.imag()) << "],\n  \"g2\": [" << fmt(curve.g2().real()) << ", "
          << fmt(curve.g2().imag()) << "],\n  \"g3\": [" << fmt(curve.g3().real()) << ", " << fmt(curve.g3().imag())
          << "],\n  \"discriminant\": [" << fmt(curve.discriminant().real()) << ", "
          << fmt(curve.discriminant().imag()) << "],\n  \"lattice_gap\": " << fmt(lat.min_gap())
          << ",\n  \"fundamental_domain\": [";
      for (std::size_t i = 0; i < corners.size(); ++i) {
        out << (i ? ", " : "") << "[" << fmt(corners[i].real()) << ", " << fmt(corners[i].imag()) << "]";
      }
      out << "]\n}\n";
    } else {
      out << "omega1        " << fmt(w1) << "\n"
          << "omega2        " << fmt(w2) << "\n"
          << "g2            " << fmt(curve.g2()) << "\n"
          << "g3            " << fmt(curve.g3()) << "\n"
          << "discriminant  " << fmt(curve.discriminant()) << "\n"
          << "lattice gap   " << fmt(lat.min_gap()) << "\n"
          << "cell          {s*omega1 + t*omega2 : -1/2 < s, t <= 1/2}, corners";
      for (const auto& c : corners) out << " " << fmt(c);
      out << "\n";
    }
  } catch (const std::invalid_argument& e) {
    err << "invalid lattice: " << e.what() << "\n";
    return kDegenerateGeometry;
  }
  return kOk;
}

int run_monodromy(const std::string& spec_path, const DomainArgs& dargs, std::ostream& out, std::ostream& err) {
  std::optional<SpecFile> spec;
  try {
    spec.emplace(load_spec(spec_path));
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const ValidationError& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kParseFailure;
  }
  const auto& problem = spec->problem;
  try {
    const auto geo = make_geometry(*spec, dargs);
    const auto bases = branch_base(problem, geo.domain, base_point(problem, geo.domain, geo.range));
    const auto entries = all_monodromy(problem, geo.domain, bases);
    const std::vector<std::string> names(problem.names().begin() + static_cast<std::ptrdiff_t>(problem.dimension()),
                                         problem.names().end());
    out << "degree " << bases.size() << "\n";
    for (const auto& e : entries) {
      out << "branch " << e.branch_id << ": e = " << e.index;
      if (!e.per_unknown.empty()) {
        out << " (";
        for (std::size_t i = 0; i < names.size(); ++i) out << (i ? " " : "") << names[i] << ":" << e.per_unknown[i];
        out << ")";
      }
      out << "\n";
    }
    const bool all = std::all_of(entries.begin(), entries.end(), [](const MonodromyEntry& e) { return e.index > 0; });
    return all ? kOk : kInvariantFailure;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const Error& e) {
    err << "degenerate geometry: " << e.what() << "\n";
    return kDegenerateGeometry;
  }
}

void add_domain_flags(CLI::App* app, DomainArgs& d) {
  app->add_option("--theta", d.theta, "Lower end of the arg window on the chart coordinate");
  app->add_option("--eta", d.eta, "Upper end of the arg window");
  app->add_option("--epsilon", d.epsilon, "Polydisc radius of the sector domain");
  app->add_option("--radius", d.radius, "Range MIN:MAX of |z_l| for lattice points");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solve exponential-algebraic systems exp(z) = alpha(z) over period-lattice points"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve at every lattice point of the configured sector domain");
  solve_cmd->add_option("--spec", solve.spec, "Problem spec file")->required();
  add_domain_flags(solve_cmd, solve.domain);
  solve_cmd->add_option("--tol", solve.tol, "Fixed-point tolerance relative to max(1, |lambda|)");
  solve_cmd->add_option("--out", solve.out, "Output file (default stdout)");
  solve_cmd->add_option("--format", solve.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  solve_cmd->add_option("--jobs", solve.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string verify_spec, verify_report;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check a JSON report from scratch");
  verify_cmd->add_option("--spec", verify_spec, "Problem spec file")->required();
  verify_cmd->add_option("--report", verify_report, "JSON report produced by solve")->required();

  std::string omega1, omega2;
  bool inv_json = false;
  auto* inv_cmd = app.add_subcommand("invariants", "Print g2, g3, cell and lattice gap of a period lattice");
  inv_cmd->add_option("--omega1", omega1, "First period, e.g. 1")->required();
  inv_cmd->add_option("--omega2", omega2, "Second period, e.g. i")->required();
  inv_cmd->add_flag("--json", inv_json, "JSON output");

  std::string mono_spec;
  DomainArgs mono_domain;
  auto* mono_cmd = app.add_subcommand("monodromy", "Ramification index of every branch around the direction point");
  mono_cmd->add_option("--spec", mono_spec, "Problem spec file")->required();
  add_domain_flags(mono_cmd, mono_domain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kParseFailure;
  }

  if (*solve_cmd) return run_solve(solve, out, err);
  if (*verify_cmd) return run_verify(verify_spec, verify_report, out, err);
  if (*inv_cmd) return run_invariants(omega1, omega2, inv_json, out, err);
  return run_monodromy(mono_spec, mono_domain, out, err);
}

}  // namespace expalg::cli
