#include <random>

#include <benchmark/benchmark.h>

#include "hcot/hierarchy.hpp"
#include "hcot/objectives.hpp"

namespace {

struct Batch {
  hcot::Matrix logits;
  std::vector<hcot::Index> labels;
};

Batch make_batch(hcot::Index n, hcot::Index k) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 2.0);
  std::uniform_int_distribution<hcot::Index> y(0, k - 1);
  Batch b{hcot::Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)), {}};
  for (Eigen::Index i = 0; i < b.logits.size(); ++i) b.logits.data()[i] = z(rng);
  for (hcot::Index i = 0; i < n; ++i) b.labels.push_back(y(rng));
  return b;
}

// Batch of 128 over K = range(0) classes grouped into groups of five.
void BM_CrossEntropy(benchmark::State& state) {
  const auto b = make_batch(128, static_cast<hcot::Index>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hcot::cross_entropy(hcot::LogitBatch(b.logits, b.labels)));
}

void BM_ComplementEntropy(benchmark::State& state) {
  const auto b = make_batch(128, static_cast<hcot::Index>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hcot::complement_entropy(hcot::LogitBatch(b.logits, b.labels)));
}

void BM_HierarchicalComplementEntropy(benchmark::State& state) {
  const auto k = static_cast<hcot::Index>(state.range(0));
  const auto b = make_batch(128, k);
  const auto h = hcot::LabelHierarchy::contiguous(k, k / 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hcot::hierarchical_complement_entropy(hcot::LogitBatch(b.logits, b.labels), h));
  }
}

}  // namespace

BENCHMARK(BM_CrossEntropy)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_ComplementEntropy)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_HierarchicalComplementEntropy)->Arg(10)->Arg(100)->Arg(1000);
