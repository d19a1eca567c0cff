#include <benchmark/benchmark.h>

#include "qradon/transforms.hpp"
#include "qradon/verify.hpp"

using namespace qradon;

namespace {

void BM_GaussRule(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rule = gauss_legendre(order);
    benchmark::DoNotOptimize(rule);
  }
}
BENCHMARK(BM_GaussRule)->Arg(16)->Arg(64)->Arg(256);

void BM_HaarMass(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const CaseContext ctx("affine-dilation", order);
  const SpaceFunction f = ctx.canonical_bump(Space::G);
  const auto& rule = ctx.rule(Space::G);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, rule));
}
BENCHMARK(BM_HaarMass)->Arg(16)->Arg(64)->Arg(128);

void BM_RadonEval(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const CaseContext ctx("affine-dilation", order);
  const SpaceFunction f = ctx.canonical_bump(Space::GL);
  const auto keys = ctx.sample_keys(Space::GH, 1, "bench", 64);
  for (auto _ : state) {
    // Fresh transform per iteration so the memo cache does not trivialise
    // the measurement.
    const auto rf = radon(ctx.chain(), f, ctx.rule(Space::HL));
    double acc = 0.0;
    for (const auto& key : keys) acc += rf(key);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_RadonEval)->Arg(16)->Arg(64);

void BM_FiniteSuite(benchmark::State& state) {
  const CaseContext ctx("s3-a3", 2);
  const CheckOptions opts;
  for (auto _ : state) {
    const auto report = run_suite(ctx, opts);
    benchmark::DoNotOptimize(report.all_pass);
  }
}
BENCHMARK(BM_FiniteSuite);

void BM_WeilResidualChart(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const CaseContext ctx("affine-dilation", order);
  const SpaceFunction f = ctx.canonical_bump(Space::G);
  const RhoFunction rho = ctx.rho(RhoChoice::canonical);
  for (auto _ : state) {
    double lhs = 0.0, rhs = 0.0;
    benchmark::DoNotOptimize(weil_residual(ctx.chain(), f, ctx.rule(Space::G), ctx.rule(Space::H),
                                           ctx.rule(Space::GH), &rho, &lhs, &rhs));
  }
}
BENCHMARK(BM_WeilResidualChart)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
