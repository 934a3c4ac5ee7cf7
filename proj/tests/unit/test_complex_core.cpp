#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "expalg/complex_core.hpp"
#include "expalg/errors.hpp"

using namespace expalg;

TEST_CASE("poly_roots: z^2 + 1") {
  const auto r = poly_roots(Poly({1.0, 0.0, 1.0}));
  REQUIRE(r.size() == 2);
  const bool a = std::abs(r[0] - Complex(0, 1)) < 1e-12 && std::abs(r[1] - Complex(0, -1)) < 1e-12;
  const bool b = std::abs(r[1] - Complex(0, 1)) < 1e-12 && std::abs(r[0] - Complex(0, -1)) < 1e-12;
  CHECK((a || b));
}

TEST_CASE("poly_roots: repeated root (z - 1)^3") {
  const auto r = poly_roots(Poly({-1.0, 3.0, -3.0, 1.0}));
  REQUIRE(r.size() == 3);
  for (const auto& x : r) CHECK(std::abs(x - 1.0) < 1e-12);
  const auto clusters = cluster_roots(r, 1e-4);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].multiplicity == 3);
}

TEST_CASE("poly_roots: random degree 7 matches Vieta") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> c(8);
    for (auto& x : c) {
      do {
        x = Complex(u(rng), u(rng));
      } while (std::abs(x) >= 1.0);
    }
    c[7] = 1.0;
    const Poly p(c);
    const auto roots = poly_roots(p);
    REQUIRE(roots.size() == 7);
    const auto e = oracle::elementary_symmetric(roots);
    for (int k = 1; k <= 7; ++k) {
      // monic: c[7-k] = (-1)^k e_k
      const Complex expect = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
      CHECK(std::abs(expect - c[7 - k]) < 1e-8);
    }
    for (const auto& r : roots) {
      CHECK(std::abs(p(r)) <= 1e-12 * std::max(1.0, p.coeff_norm() * std::pow(std::max(1.0, std::abs(r)), 7)));
    }
  }
}

TEST_CASE("poly_roots: root sum equals -c[d-1]/c[d]") {
  const Poly p({Complex(2, 1), Complex(-1, 3), Complex(0.5, 0), Complex(4, -2), Complex(3, 1)});
  const auto r = poly_roots(p);
  Complex sum{};
  for (const auto& x : r) sum += x;
  CHECK(std::abs(sum + p.coeffs()[3] / p.coeffs()[4]) < 1e-8);
}

TEST_CASE("continue_root: principal square root through the upper half plane") {
  // family w^2 - e^{i pi t}: z runs from 1 to -1 over the upper half plane
  const PolyFamily fam = [](Complex t) { return Poly({-std::exp(Complex(0, kPi) * t), 0.0, 1.0}); };
  const Complex w = continue_root(fam, {0.0, 1.0, 0.05}, 1.0);
  CHECK(std::abs(w - Complex(0, 1)) < 1e-10);
}

TEST_CASE("continue_root: full loop flips the square root, reversal restores it") {
  const PolyFamily fam = [](Complex t) { return Poly({-std::exp(Complex(0, kPi) * t), 0.0, 1.0}); };
  const Complex w = continue_root(fam, {0.0, 2.0, 0.05}, 1.0);
  CHECK(std::abs(w + 1.0) < 1e-10);
  const Complex back = continue_root(fam, {2.0, 0.0, 0.05}, w);
  CHECK(std::abs(back - 1.0) < 1e-10);
}

TEST_CASE("continue_root: loop without branch point and constant path") {
  // w^2 - (2 + 0.5 e^{i pi t}) never meets the branch point 0
  const PolyFamily fam = [](Complex t) { return Poly({-(2.0 + 0.5 * std::exp(Complex(0, kPi) * t)), 0.0, 1.0}); };
  const Complex r0 = std::sqrt(Complex(2.5));
  CHECK(std::abs(continue_root(fam, {0.0, 2.0, 0.1}, r0) - r0) < 1e-10);
  CHECK(std::abs(continue_root(fam, {0.3, 0.3, 0.1}, std::sqrt(fam(0.3).coeffs()[0] * -1.0)) -
                 std::sqrt(fam(0.3).coeffs()[0] * -1.0)) < 1e-12);
}

TEST_CASE("continue_root: path through the branch point underflows") {
  // w^2 - t on t from -1 to 1 passes through the double root at 0
  const PolyFamily fam = [](Complex t) { return Poly({-t, 0.0, 1.0}); };
  CHECK_THROWS_AS(continue_root(fam, {-1.0, 1.0, 0.1}, Complex(0, 1)), BranchPointOnPath);
}

TEST_CASE("fixed_point_solve: linear contraction and constant map") {
  const auto half = fixed_point_solve([](const CVec& z) { return z * Complex(0.5); }, CVec{1.0}, 1e-12, 100);
  CHECK(half.point.norm_inf() < 1e-11);
  CHECK(half.contraction_ratio == doctest::Approx(0.5).epsilon(1e-6));
  // q = 1/2 from |z1 - z0| = 1/2: ceil(log(tol / 0.5) / log 0.5) + 2 iterations at most
  CHECK(half.iterations <= static_cast<int>(std::ceil(std::log(1e-12 / 0.5) / std::log(0.5))) + 2);

  const auto c = fixed_point_solve([](const CVec&) { return CVec{Complex(3, -1)}; }, CVec{0.0}, 1e-12, 10);
  CHECK(c.point == CVec{Complex(3, -1)});
  CHECK(c.iterations == 2);
}

TEST_CASE("fixed_point_solve: e^z = z near 2 pi i 10") {
  const Complex lambda(0, kTwoPi * 10);
  const auto res = fixed_point_solve([&](const CVec& z) { return CVec{lambda + std::log(z[0])}; }, CVec{lambda},
                                     1e-13, 100);
  const Complex s = res.point[0];
  CHECK(std::abs(std::exp(s) - s) < 1e-10);
  CHECK(std::abs(s - oracle::newton_exp_identity(lambda + std::log(lambda))) < 1e-10);
}

TEST_CASE("fixed_point_solve: divergence and cap") {
  CHECK_THROWS_AS(fixed_point_solve([](const CVec& z) { return z * Complex(2.0); }, CVec{1.0}, 1e-12, 100),
                  NonConvergence);
  CHECK_THROWS_AS(fixed_point_solve([](const CVec& z) { return z * Complex(0.99); }, CVec{1.0}, 1e-14, 5),
                  NonConvergence);
}

TEST_CASE("finite_diff_jacobian: identity and z^2") {
  const auto id = finite_diff_jacobian([](const CVec& z) { return z; }, CVec{Complex(1, 2), Complex(-3, 0.5)}, 1e-4);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(id(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
  }
  const auto sq = finite_diff_jacobian([](const CVec& z) { return CVec{z[0] * z[0]}; }, CVec{1.0}, 1e-4);
  CHECK(std::abs(sq(0, 0) - 2.0) < 1e-6);
  CHECK(id.norm_inf() == doctest::Approx(1.0));
}

TEST_CASE("CVec and Poly basics") {
  const CVec a{Complex(3, 4), Complex(0, 1)};
  CHECK(a.norm_inf() == doctest::Approx(5.0));
  CHECK(a.norm2() == doctest::Approx(std::sqrt(26.0)));
  CHECK(a.all_finite());
  CHECK_FALSE(CVec{Complex(std::nan(""), 0)}.all_finite());
  const Poly p({1.0, 2.0, 0.0});
  CHECK(p.degree() == 1);
  const std::vector<Complex> roots{1.0, Complex(0, 2)};
  const Poly q = Poly::from_roots(roots);
  CHECK(std::abs(q(Complex(0, 2))) < 1e-14);
  CHECK(std::abs(q.derivative_at(1.0) - (1.0 - Complex(0, 2))) < 1e-14);
}
