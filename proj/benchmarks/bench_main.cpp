#include <benchmark/benchmark.h>

#include "orl/env/lander.hpp"
#include "orl/funcapprox/mlp.hpp"
#include "orl/ope/estimators.hpp"
#include "orl/ope/fqe.hpp"
#include "orl/random.hpp"
#include "orl/util/allocator.hpp"
#include "test_util.hpp"

namespace {

Eigen::MatrixXd random_batch(int rows, int cols, std::uint64_t seed) {
  orl::Rng rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

void BM_MlpForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const auto net = orl::Mlp::init({8, 256, 256, 4}, 1);
  const auto x = random_batch(8, batch, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64)->Arg(256);

void BM_MlpLossAndGradient(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const auto net = orl::Mlp::init({8, 256, 256, 4}, 1);
  const auto x = random_batch(8, batch, 2);
  const auto y = random_batch(4, batch, 3);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(4, batch);
  for (auto _ : state) benchmark::DoNotOptimize(orl::weighted_squared_error(net, x, y, w));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpLossAndGradient)->Arg(64)->Arg(256);

void BM_LanderStep(benchmark::State& state) {
  orl::Lander env(orl::LanderConfig{});
  std::uint64_t seed = 0;
  env.reset(seed);
  int a = 0;
  for (auto _ : state) {
    if (env.done()) env.reset(++seed);
    benchmark::DoNotOptimize(env.step(a));
    a = (a + 1) % 4;
  }
}
BENCHMARK(BM_LanderStep);

void BM_FitFqe(benchmark::State& state) {
  const auto d = testutil::toy_dataset(200, 6, 4, 20, 7);
  const auto p = testutil::table_policy({0, 1, 2, 3, 0, 1}, 4, orl::SelectionRule::greedy());
  orl::FqeConfig c;
  c.hidden = {64, 64};
  c.iterations = 5;
  c.steps_per_iteration = 50;
  c.batch_size = 128;
  for (auto _ : state) benchmark::DoNotOptimize(orl::fit_fqe(d, p, orl::reward_full(), p.state_spec, c, 1));
}
BENCHMARK(BM_FitFqe)->Unit(benchmark::kMillisecond);

void BM_EstimateIs(benchmark::State& state) {
  const auto d = testutil::toy_dataset(2000, 6, 4, 30, 7);
  const auto p = testutil::table_policy({0, 1, 2, 3, 0, 1}, 4, orl::SelectionRule::eps_greedy(0.3));
  for (auto _ : state) benchmark::DoNotOptimize(orl::estimate_is(d, p, orl::reward_full(), 0.99, false));
}
BENCHMARK(BM_EstimateIs)->Unit(benchmark::kMillisecond);

}  // namespace
int main(int argc, char** argv) {
  orl::configure_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
