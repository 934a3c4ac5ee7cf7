#include <benchmark/benchmark.h>

#include <random>

#include "expalg/branch.hpp"
#include "expalg/elliptic.hpp"
#include "expalg/solver.hpp"

using namespace expalg;

namespace {

const EllipticCurve& square_curve() {
  static const EllipticCurve curve(Lattice(1.0, Complex(0.0, 1.0)));
  return curve;
}

void BM_Wp(benchmark::State& state) {
  const auto& curve = square_curve();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<Complex> zs(256);
  for (auto& z : zs) z = Complex(u(rng), u(rng)) + Complex(0.013, 0.007);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(curve.wp_and_prime(zs[i++ % zs.size()]));
}
BENCHMARK(BM_Wp);

void BM_LogE(benchmark::State& state) {
  const auto& curve = square_curve();
  const EPoint p = exp_E(Complex(0.31, -0.27), curve);
  for (auto _ : state) benchmark::DoNotOptimize(log_E(p, curve));
}
BENCHMARK(BM_LogE);

void BM_PolyRoots(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> c(static_cast<std::size_t>(state.range(0)) + 1);
  for (auto& x : c) x = Complex(u(rng), u(rng));
  c.back() = 1.0;
  const Poly p(c);
  for (auto _ : state) benchmark::DoNotOptimize(poly_roots(p));
}
BENCHMARK(BM_PolyRoots)->Arg(3)->Arg(7)->Arg(12);

void BM_SolveWorkedExample(benchmark::State& state) {
  const auto& curve = square_curve();
  GroupSignature sig({EllipticFactor{curve}, EllipticFactor{curve}});
  const std::size_t nv = 6;
  auto v = [&](std::size_t i) { return MPoly::variable(nv, i); };
  ProblemSpec spec(sig, {v(1) - v(2).pow(2), v(0) - v(5)});
  const SectorDomain domain(CVec{1.0, 1.0}, 0, 0.2, 0.2, 1.4);
  const RadiusRange range{25.0, 26.0};
  const auto bases = branch_base(spec, domain, base_point(spec, domain, range));
  const auto lambdas = enumerate_lattice(domain, LatticeProduct(sig), range);
  const CVec lambda = lambdas[lambdas.size() / 2];
  for (auto _ : state) benchmark::DoNotOptimize(solve_at_lattice_point(spec, domain, bases[0], lambda));
}
BENCHMARK(BM_SolveWorkedExample);

void BM_SolveTorusDemo(benchmark::State& state) {
  GroupSignature sig({TorusFactor{}});
  ProblemSpec spec(sig, {MPoly::variable(2, 1) - MPoly::variable(2, 0)});
  const SectorDomain domain(CVec{1.0}, 0, 0.2, -kPi, kPi - 0.2);
  const auto bases = branch_base(spec, domain, base_point(spec, domain, {5.0, 300.0}));
  const CVec lambda{Complex(0.0, kTwoPi * 20)};
  for (auto _ : state) benchmark::DoNotOptimize(solve_at_lattice_point(spec, domain, bases[0], lambda));
}
BENCHMARK(BM_SolveTorusDemo);

}  // namespace
BENCHMARK_MAIN();
