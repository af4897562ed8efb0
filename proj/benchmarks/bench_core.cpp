#include <benchmark/benchmark.h>

#include <sstream>

#include "sasadmm/data_io.hpp"
#include "sasadmm/inner.hpp"
#include "sasadmm/solvers.hpp"
#include "sasadmm/stepsize.hpp"

using namespace sasadmm;

namespace {

SyntheticProblem fused(Index samples, Index features) {
  SyntheticOptions o;
  o.seed = 1;
  o.samples = samples;
  o.features = features;
  return gen_synthetic(o);
}

}  // namespace

static void BM_SpectralNorm(benchmark::State& state) {
  const auto sp = fused(200, state.range(0));
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_norm_est(sp.spec.A, 1e-10, 1000, rng).value);
}
BENCHMARK(BM_SpectralNorm)->Arg(50)->Arg(200);

static void BM_SoftShrink(benchmark::State& state) {
  Rng rng(1);
  Vector v(state.range(0));
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(soft_shrink(0.3, v));
}
BENCHMARK(BM_SoftShrink)->Arg(1 << 10)->Arg(1 << 16);

static void BM_Certify(benchmark::State& state) {
  Rng rng(2);
  DenseMatrix B(3, 4);
  for (Index i = 0; i < B.size(); ++i) B.data()[i] = rng.normal();
  const DenseMatrix Dk = DenseMatrix::Identity(2, 2), L = DenseMatrix::Identity(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(certify({0.9, 1.09}, 1.0, Dk, L, B).qtilde_psd);
}
BENCHMARK(BM_Certify);

static void BM_Estimator(benchmark::State& state) {
  const auto sp = fused(1000, 50);
  GradientEstimator est(static_cast<EstimatorMode>(state.range(0)));
  const Vector x = Vector::Constant(50, 0.1);
  est.refresh(*sp.spec.f, Vector::Zero(50));
  Rng rng(4);
  Vector d;
  for (auto _ : state) benchmark::DoNotOptimize(est.estimate(*sp.spec.f, x, rng, d));
  state.SetLabel(to_string(est.mode()));
}
BENCHMARK(BM_Estimator)->Arg(static_cast<int>(EstimatorMode::Plain))->Arg(static_cast<int>(EstimatorMode::Svrg));

static void BM_SasAdmmStep(benchmark::State& state) {
  const auto sp = fused(1000, 50);
  SolverConfig cfg;
  cfg.fixed_inner = InnerStep{static_cast<int>(state.range(0)), 1.0 / (2.0 * sp.spec.f->nu())};
  SolverContext ctx = make_context(sp.spec, cfg);
  SolverState st = init_state(ctx);
  for (auto _ : state) sas_admm_step(ctx, st);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SasAdmmStep)->Arg(10)->Arg(100);

static void BM_ParseLibsvm(benchmark::State& state) {
  const auto sp = fused(state.range(0), 50);
  std::ostringstream out;
  write_libsvm(*sp.data, out);
  const std::string text = out.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(parse_libsvm(in).features.nonZeros());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseLibsvm)->Arg(1000);
BENCHMARK_MAIN();
