#include <benchmark/benchmark.h>

#include "mta/meta.hpp"
#include "mta/mlp.hpp"
#include "mta/transition.hpp"

using namespace mta;

namespace {

struct Fixture {
  MlpParams params;
  TransitionState state;
  Batch train;
  Batch meta;
};

// Reference-sized network on random 2-D inputs.
Fixture make_fixture(std::size_t classes, std::size_t n, std::size_t m) {
  SeededRng rng(7);
  Fixture f{init_mlp({2, 32, 32, classes}, 0.3, rng),
            TransitionState::from_logits(logits_from_estimate(symmetric_matrix(classes, 0.3))),
            {DenseMatrix(n, 2), {}},
            {DenseMatrix(m, 2), {}}};
  for (double& v : f.train.features.data()) v = rng.normal();
  for (double& v : f.meta.features.data()) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) f.train.labels.push_back(static_cast<int>(rng.uniform_index(classes)));
  for (std::size_t i = 0; i < m; ++i) f.meta.labels.push_back(static_cast<int>(rng.uniform_index(classes)));
  return f;
}

void BM_ForwardBackward(benchmark::State& st) {
  const Fixture f = make_fixture(3, static_cast<std::size_t>(st.range(0)), 1);
  DenseMatrix upstream(f.train.size(), 3, 1.0);
  for (auto _ : st) {
    const ForwardCache cache = forward(f.params, f.train.features);
    benchmark::DoNotOptimize(backward(f.params, cache, upstream));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128)->Arg(512);

void BM_NoisyLossGrads(benchmark::State& st) {
  const Fixture f = make_fixture(static_cast<std::size_t>(st.range(0)), 128, 1);
  for (auto _ : st) benchmark::DoNotOptimize(noisy_loss_and_grads(f.params, f.state, f.train));
}
BENCHMARK(BM_NoisyLossGrads)->Arg(3)->Arg(10);

void BM_Hypergradient(benchmark::State& st) {
  const Fixture f = make_fixture(static_cast<std::size_t>(st.range(0)), 128, 32);
  const HypergradMode mode = st.range(1) == 0 ? HypergradMode::kExact : HypergradMode::kFdTrick;
  for (auto _ : st) {
    benchmark::DoNotOptimize(compute_hypergradient(f.state, f.params, f.train, f.meta, 0.1, mode));
  }
  st.SetLabel(to_string(mode));
}
BENCHMARK(BM_Hypergradient)->ArgsProduct({{3, 10}, {0, 1}});

void BM_MetaIteration(benchmark::State& st) {
  const Fixture f = make_fixture(3, 128, 32);
  for (auto _ : st) {
    const TransitionState next =
        meta_step(f.state, f.params, f.train, f.meta, 0.1, 0.5, HypergradMode::kExact);
    benchmark::DoNotOptimize(classifier_step(f.params, next, f.train, 0.1));
  }
}
BENCHMARK(BM_MetaIteration);

}  // namespace
BENCHMARK_MAIN();
