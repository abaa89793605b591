#include <benchmark/benchmark.h>

#include "hcot/data.hpp"
#include "hcot/trainer.hpp"

namespace {

void BM_TrainEpoch(benchmark::State& state) {
  hcot::SyntheticSpec spec;
  spec.samples_per_fine = 600;
  const auto data = hcot::generate_synthetic(spec);
  hcot::TrainConfig cfg;
  cfg.objective = static_cast<hcot::ObjectiveKind>(state.range(0));
  cfg.schedule = static_cast<hcot::Schedule>(state.range(1));
  cfg.epochs = 1;
  cfg.lr_milestones = {};
  cfg.batch_size = 64;
  cfg.lr = 0.01;
  auto net = hcot::Network::init(
      {hcot::LayerSpec::dense(16, 32), hcot::LayerSpec::relu(32), hcot::LayerSpec::dense(32, 9)}, 1);
  hcot::OptimizerState opt(net);
  hcot::Index epoch = 0;
  for (auto _ : state) {
    auto stats = hcot::train_epoch(net, opt, {data.train, data.hierarchy, cfg, epoch++});
    benchmark::DoNotOptimize(stats);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.train.size()));
}

}  // namespace

// args: objective (0 xe, 1 cot, 2 hcot), schedule (0 direct, 1 alternating)
BENCHMARK(BM_TrainEpoch)->Args({0, 0})->Args({1, 0})->Args({2, 0})->Args({2, 1})->Unit(benchmark::kMillisecond);
