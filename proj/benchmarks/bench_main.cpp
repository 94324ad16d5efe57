#include <benchmark/benchmark.h>

#include <vector>

#include "mudomains/automorphisms.hpp"
#include "mudomains/domains.hpp"
#include "mudomains/dynamics.hpp"
#include "mudomains/sampling.hpp"

using namespace mudomains;

namespace {

std::vector<SymPoint2> g2_points(int n) {
  Rng rng(1);
  std::vector<SymPoint2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(as_sym2(sample_interior(Domain::G2, rng, 0.99)));
  return pts;
}

void BM_G2Membership(benchmark::State& state) {
  const auto pts = g2_points(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(g2_membership(pts[i++ % pts.size()]));
}
BENCHMARK(BM_G2Membership);

void BM_G2MembershipOracle(benchmark::State& state) {
  const auto pts = g2_points(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(g2_membership_oracle(pts[i++ % pts.size()]));
}
BENCHMARK(BM_G2MembershipOracle);

void BM_GnApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const Automorphism f = GnAut{n, sample_mobius(rng)};
  const Domain d = n == 2 ? Domain::G2 : Domain::G3;
  const auto z = sample_interior(d, rng, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(mudomains::apply(f, z));
}
BENCHMARK(BM_GnApply)->Arg(2)->Arg(3);

void BM_PolyRoots(benchmark::State& state) {
  const auto degree = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<cplx> coeffs(degree + 1);
  for (auto& c : coeffs) c = sample_disc(rng, 1.0);
  coeffs.back() = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(poly_roots(coeffs));
}
BENCHMARK(BM_PolyRoots)->Arg(2)->Arg(3)->Arg(8);

void BM_Iterate(benchmark::State& state) {
  Rng rng(4);
  const auto f = make_self_map(Domain::G2, {Automorphism{GnAut{2, MobiusTransform(0.0, -0.5)}}});
  const auto z = sample_interior(Domain::G2, rng, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(iterate(f, z));
}
BENCHMARK(BM_Iterate);

void BM_NewtonSolve(benchmark::State& state) {
  const auto f = make_self_map(Domain::G2, {Automorphism{GnAut{2, MobiusTransform::rotation_by(1.0)}}});
  const auto z = to_domain_point(SymPoint2{0.3, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(f, z));
}
BENCHMARK(BM_NewtonSolve);

}  // namespace

BENCHMARK_MAIN();
