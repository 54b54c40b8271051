#include <benchmark/benchmark.h>

#include "homrate/mixed.hpp"
#include "homrate/overlap.hpp"
#include "homrate/rate.hpp"

namespace {

using namespace homrate;

GaussianWavePacket packet_a() {
  GaussianWavePacket wp;
  wp.k0 = {0.0, 0.0, 1.0};
  wp.sigma = {0.05, 0.08, 0.1};
  wp.theta = 0.6;
  wp.phi1 = 0.3;
  wp.phi2 = -0.4;
  return wp;
}

GaussianWavePacket packet_b() {
  GaussianWavePacket wp = packet_a();
  wp.r0 = {0.5, -0.3, 2.0};
  wp.k0[2] = 1.01;
  wp.theta = 0.8;
  return wp;
}

void BM_ScalarProductAnalytic(benchmark::State& state) {
  const GaussianWavePacket a = packet_a(), b = packet_b();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        scalar_product(a, b, Engine::analytic).amplitude);
}
BENCHMARK(BM_ScalarProductAnalytic);

void BM_ScalarProductQuadrature(benchmark::State& state) {
  const GaussianWavePacket a = packet_a(), b = packet_b();
  QuadratureSpec quad;
  quad.nodes_per_axis = static_cast<int>(state.range(0));
  quad.convergence_check = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        scalar_product(a, b, Engine::quadrature, quad).amplitude);
}
BENCHMARK(BM_ScalarProductQuadrature)->Arg(24)->Arg(40)->Arg(60);

void BM_P11Pure(benchmark::State& state) {
  const GaussianWavePacket a = packet_a(), b = packet_b();
  for (auto _ : state)
    benchmark::DoNotOptimize(p11_pure(a, b, Engine::analytic).value);
}
BENCHMARK(BM_P11Pure);

void BM_RateFiniteDifferenceAnalytic(benchmark::State& state) {
  const GaussianWavePacket wp = packet_a();
  const DofSelector f = make_dof(wp, DofKind::sigma1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        rate_finite_difference(wp, f, Engine::analytic).value);
}
BENCHMARK(BM_RateFiniteDifferenceAnalytic);

void BM_RateDerivativeForm(benchmark::State& state) {
  const GaussianWavePacket wp = packet_a();
  const DofSelector f = make_dof(wp, DofKind::theta);
  QuadratureSpec quad;
  quad.nodes_per_axis = static_cast<int>(state.range(0));
  quad.convergence_check = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(rate_derivative_form(wp, f, quad).value);
}
BENCHMARK(BM_RateDerivativeForm)->Arg(24)->Arg(40);

void BM_P11MixedDim8(benchmark::State& state) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(8);
  for (auto _ : state) benchmark::DoNotOptimize(p11_mixed(rho, rho));
}
BENCHMARK(BM_P11MixedDim8);

}  // namespace

BENCHMARK_MAIN();
