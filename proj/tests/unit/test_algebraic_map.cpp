#include <doctest.h>

#include "../oracles.hpp"
#include "expalg/branch.hpp"
#include "expalg/errors.hpp"
#include "expalg/sector_domain.hpp"
#include "expalg/spec_file.hpp"
#include "expalg/torus.hpp"

using namespace expalg;

namespace {

SpecFile spec_of(const std::string& group, const std::string& equations) {
  return parse_spec("[group]\n" + group + "\n[equations]\n" + equations + "\n");
}

const SpecFile& sqrt_spec() {
  static const SpecFile s = spec_of("z1 = torus", "w1^2 = z1");
  return s;
}

const SpecFile& wp_spec() {
  static const SpecFile s = spec_of("z1 = elliptic 1 i\nz2 = elliptic 1 i", "z2 = x1^2\nz1 = y2");
  return s;
}

SectorDomain full_window(double eps = 0.2) {
  return SectorDomain(CVec{1.0}, 0, eps, -kPi, kPi - kDefaultWindowMargin);
}

}  // namespace

TEST_CASE("ProblemSpec: variable layout and stages") {
  const auto& p = wp_spec().problem;
  CHECK(p.names() == std::vector<std::string>{"z1", "z2", "x1", "y1", "x2", "y2"});
  CHECK(p.nominal_degree() == 12);
  REQUIRE(p.stages().size() == 4);
  // x1 from z2 = x1^2, then the curve gives y1, then y2 from z1 = y2 and the curve gives x2
  CHECK(p.stages()[0].unknown == p.x_var(0));
  CHECK(p.stages()[0].degree == 2);
  CHECK(p.stages()[1].curve_equation);
  CHECK(p.stages()[1].unknown == p.y_var(0));
  CHECK(p.stages()[2].unknown == p.y_var(1));
  CHECK(p.stages()[3].curve_equation);
  CHECK(p.stages()[3].degree == 3);
  CHECK(sqrt_spec().problem.nominal_degree() == 2);
  CHECK(spec_of("z1 = elliptic 1 i", "y1 = z1").problem.nominal_degree() == 3);
}

TEST_CASE("ProblemSpec: triangular validation") {
  CHECK_THROWS_AS(spec_of("z1 = torus", "w1 = z1\nw1^2 = z1"), ValidationError);
  CHECK_THROWS_AS(spec_of("z1 = torus", "z1 = 1"), ValidationError);
  CHECK_THROWS_AS(spec_of("z1 = torus\nz2 = torus", "w1 = z1"), ValidationError);
  CHECK_THROWS_AS(spec_of("z1 = torus\nz2 = torus", "w1 * w2 = z1\nw2 = z2"), ValidationError);
  CHECK_NOTHROW(spec_of("z1 = torus\nz2 = torus", "w1 = z1\nw2 = w1 + z2"));
}

TEST_CASE("fiber_roots: square roots and degenerate fibers") {
  const auto& p = sqrt_spec().problem;
  const auto f = fiber_roots(p, CVec{4.0});
  REQUIRE(f.size() == 2);
  CHECK(std::abs(f[0].unknowns[0] + 2.0) < 1e-14);
  CHECK(std::abs(f[1].unknowns[0] - 2.0) < 1e-14);
  CHECK(fiber_less(f[0], f[1]));
  CHECK_THROWS_AS(fiber_roots(p, CVec{0.0}), DegenerateFiber);
  CHECK(detect_degree(p) == 2);
}

TEST_CASE("fiber_roots: elliptic fibers lie on the curves and satisfy the equations") {
  const auto& p = wp_spec().problem;
  const CVec z{Complex(18.0, 17.5), Complex(17.2, 19.1)};
  const auto fiber = fiber_roots(p, z);
  REQUIRE(fiber.size() == 12);
  const auto& c = p.signature().curve(0);
  for (const auto& f : fiber) {
    CHECK(p.fiber_residual(z, f) < 1e-12);
    const auto a = p.alpha(f);
    CHECK(c.curve_residual(std::get<EPoint>(a[0])) < 1e-10);
    CHECK(c.curve_residual(std::get<EPoint>(a[1])) < 1e-10);
    // equations by hand: z2 = x1^2, z1 = y2
    CHECK(std::abs(f.unknowns[0] * f.unknowns[0] - z[1]) < 1e-10 * std::abs(z[1]));
    CHECK(std::abs(f.unknowns[3] - z[0]) < 1e-10 * std::abs(z[0]));
  }
  for (std::size_t i = 1; i < fiber.size(); ++i) CHECK(fiber_less(fiber[i - 1], fiber[i]));
  CHECK(detect_degree(p) == 12);
}

TEST_CASE("group exp and log") {
  const auto& sig = wp_spec().problem.signature();
  const CVec z{Complex(0.3, 0.1), Complex(-0.2, 0.4)};
  const CVec shifted = z + CVec{Complex(2.0, -1.0), Complex(0.0, 3.0)};
  CHECK(group_distance(exp_group(sig, z), exp_group(sig, shifted)) < 1e-10);
  const CVec back = log_group_near(sig, exp_group(sig, z), shifted + CVec{0.05, 0.05});
  CHECK((back - shifted).norm_inf() < 1e-9);
  CHECK(sig.lattice_gap(0) == doctest::Approx(1.0));
  CHECK(sqrt_spec().problem.signature().lattice_gap(0) == doctest::Approx(kTwoPi));
}

TEST_CASE("SectorDomain: membership") {
  const SectorDomain d = full_window();
  CHECK(d.inner_radius() == doctest::Approx(5.0));
  CHECK(d.contains(CVec{10.0}));
  CHECK(d.contains(CVec{Complex(0, -40)}));
  CHECK_FALSE(d.contains(CVec{4.0}));
  CHECK_FALSE(d.contains(CVec{-10.0 * std::exp(Complex(0, -0.1))}));  // arg pi - 0.1 is outside the window
  CHECK(d.contains(CVec{-10.0 * std::exp(Complex(0, 0.3))}));         // arg 0.3 - pi is inside

  const SectorDomain two(CVec{2.0, Complex(0, 2)}, 0, 0.1, 0.0, 1.0);
  CHECK(std::abs(two.direction()[1] - Complex(0, 1)) < 1e-15);
  const CVec on = two.on_ray(50.0, 0.5);
  CHECK(two.contains(on));
  CHECK_FALSE(two.contains(CVec{on[0], on[1] * 1.2}));
  CHECK_FALSE(two.contains(two.on_ray(50.0, 1.2)));
  CHECK_THROWS_AS(SectorDomain(CVec{1.0}, 0, 0.1, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(SectorDomain(CVec{1.0}, 0, -0.1, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(SectorDomain(CVec{0.0, 1.0}, 0, 0.1, 0.0, 1.0), ValidationError);
}

TEST_CASE("SectorDomain: chart_arg picks the branch inside the window") {
  const SectorDomain d(CVec{1.0}, 0, 0.2, 3.0, 7.0);
  CHECK(*d.chart_arg(-1.0) == doctest::Approx(kPi));
  CHECK(*d.chart_arg(std::exp(Complex(0, 0.5))) == doctest::Approx(0.5 + kTwoPi));
  const SectorDomain narrow(CVec{1.0}, 0, 0.2, 0.0, 1.0);
  CHECK_FALSE(narrow.chart_arg(-1.0).has_value());
  CHECK(d.rotated(1).theta() == doctest::Approx(3.0 + kTwoPi));
}

TEST_CASE("SectorDomain: effective epsilon over torus factors") {
  const GroupSignature tt({TorusFactor{}, TorusFactor{}});
  CHECK(effective_epsilon(tt, CVec{1.0, 0.1}, 0.2) == doctest::Approx(0.05));
  CHECK(effective_epsilon(tt, CVec{1.0, 10.0}, 0.2) == doctest::Approx(0.05));
  CHECK(effective_epsilon(tt, CVec{1.0, 1.0}, 0.2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(SectorDomain::for_signature(tt, CVec{1.0, 0.0}, 0, 0.2, 0.0, 1.0), ValidationError);
  const auto& ee = wp_spec().problem.signature();
  CHECK(SectorDomain::for_signature(ee, CVec{1.0, 0.0}, 0, 0.2, 0.0, 1.0).epsilon() == doctest::Approx(0.2));
}

TEST_CASE("branch_base: one state per fiber point with principal logs") {
  const auto& p = sqrt_spec().problem;
  const auto bases = branch_base(p, full_window(), CVec{16.0});
  REQUIRE(bases.size() == 2);
  CHECK(bases[0].branch_id == 0);
  // -4 sits on the cut: either principal value is acceptable
  CHECK(std::abs(std::abs(bases[0].g[0].imag()) - kPi) < 1e-13);
  CHECK(std::abs(std::exp(bases[0].g[0]) + 4.0) < 1e-13);
  CHECK(std::abs(bases[1].g[0] - std::log(4.0)) < 1e-13);
  for (const auto& b : bases) CHECK(branch_residual(p, b) < 1e-13);
  CHECK_THROWS_AS(branch_base(p, full_window(), CVec{2.0}), LeftDomain);
}

TEST_CASE("continuation: square root along a sector path matches the closed form") {
  const auto& p = sqrt_spec().problem;
  const auto d = full_window();
  const CVec a{20.0 * std::exp(Complex(0, -2.5))};
  const CVec b{300.0 * std::exp(Complex(0, 2.7))};
  const Path path = sector_path(d, a, b);
  std::vector<Complex> samples;
  for (int i = 0; i <= 2000; ++i) samples.push_back(path(i / 2000.0)[0]);
  for (const auto& base : branch_base(p, d, a)) {
    const auto end = branch_travel(p, base, b, d);
    CHECK(std::abs(end.fiber.unknowns[0] - oracle::follow_sqrt(samples, base.fiber.unknowns[0])) < 1e-10);
    CHECK(branch_residual(p, end) < 1e-10);
    // g stays a continuous logarithm: 2 g = log z on the principal branch chosen at a
    CHECK(std::abs(std::exp(end.g[0]) - end.fiber.unknowns[0]) < 1e-9);
    CHECK(std::abs((end.g[0] - base.g[0]).imag() - 0.5 * (2.7 + 2.5)) < 1e-9);
  }
}

TEST_CASE("continuation: straight segment and domain exit") {
  const auto& p = sqrt_spec().problem;
  const auto d = full_window();
  const auto base = branch_base(p, d, CVec{10.0})[1];
  const auto moved = branch_continue(p, base, CVec{Complex(40.0, 30.0)}, d);
  CHECK(std::abs(moved.fiber.unknowns[0] - std::sqrt(Complex(40.0, 30.0))) < 1e-12);
  CHECK(branch_continue(p, base, base.z, d).fiber == base.fiber);
  // the straight segment from 10 to -10 + i crosses |z| < 5
  CHECK_THROWS_AS(branch_continue(p, base, CVec{Complex(-10.0, 1.0)}, d), LeftDomain);
  CHECK_THROWS_AS(sector_path(d, CVec{10.0}, CVec{1.0}), LeftDomain);
}

TEST_CASE("continuation: a path through the branch point is refused") {
  const auto& p = sqrt_spec().problem;
  const auto base = branch_base(p, full_window(0.5), CVec{3.0})[1];
  const Path through_zero = [](double t) { return CVec{Complex(3.0 - 6.0 * t, 0.0)}; };
  CHECK_THROWS_AS(continue_along_path(p, base, through_zero, nullptr), BranchPointOnPath);
}

TEST_CASE("monodromy: square root, identity and the x1 stage of the elliptic demo") {
  const auto& p = sqrt_spec().problem;
  const auto d = full_window();
  for (const auto& b : branch_base(p, d, CVec{20.0})) {
    const auto m = monodromy(p, d, b);
    CHECK(m.index == 2);
    CHECK(m.per_unknown == std::vector<int>{2});
  }
  const auto id = spec_of("z1 = torus", "w1 = z1");
  for (const auto& b : branch_base(id.problem, d, CVec{20.0})) CHECK(monodromy_index(id.problem, d, b) == 1);

  const auto& wp = wp_spec().problem;
  const SectorDomain wd(CVec{1.0, 1.0}, 0, 0.2, 0.2, 0.2 + kPi);
  const auto bases = branch_base(wp, wd, wd.on_ray(25.5, 0.8));
  REQUIRE(bases.size() == 12);
  const auto m = monodromy(wp, wd, bases[0]);
  CHECK(m.per_unknown[0] == 2);  // x1 = sqrt(z2)
  CHECK(m.index % 2 == 0);
  CHECK_THROWS_AS(monodromy(p, SectorDomain(CVec{1.0}, 0, 0.2, 0.0, 1.0), branch_base(p, d, CVec{20.0})[0]),
                  ValidationError);
}
