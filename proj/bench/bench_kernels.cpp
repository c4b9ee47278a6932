#include <benchmark/benchmark.h>

#include "primnav/explorer/kernels.hpp"

using namespace primnav;
using namespace primnav::explorer;

namespace {

constexpr int kDim = perception::kDefaultEmbeddingDim;

MapGeometry geometry(int side) { return {side, side, 0.25, {0.0, 0.0}}; }

perception::EmbeddingVector random_unit(Rng& rng) {
  perception::EmbeddingVector e{std::vector<double>(kDim)};
  double n = 0.0;
  for (auto& x : e.components) {
    x = rng.normal();
    n += x * x;
  }
  for (auto& x : e.components) x /= std::sqrt(n);
  return e;
}

// Tri-state map: a free blob in the middle, unknown outside, sprinkled obstacles.
ObstacleMap random_map(int side, std::uint64_t seed) {
  Rng rng(seed);
  ObstacleMap m(geometry(side));
  const double c = side / 2.0;
  for (int r = 0; r < side; ++r)
    for (int q = 0; q < side; ++q) {
      const double d = std::hypot(r - c, q - c);
      if (d < side * 0.35 + 3 * rng.uniform()) m.set({r, q}, rng.bernoulli(0.05) ? Occupancy::kOccupied : Occupancy::kFree);
    }
  return m;
}

FeatureMap filled_features(int side, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMap f(geometry(side), kDim);
  for (std::size_t i = 0; i < f.geometry().size(); ++i)
    if (rng.bernoulli(0.6)) f.set(i, random_unit(rng).components, rng.uniform());
  return f;
}

ViewCone cone_at_center(int side) {
  return {{side * 0.125, side * 0.125}, 30.0, 79.0 / 2.0, side * 0.25 * 0.45, {}};
}

template <bool Parallel>
void BM_UpdateMemory(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(3);
  const auto occ = random_map(side, 1);
  auto f = filled_features(side, 2);
  ValueMap v(geometry(side));
  const auto e = random_unit(rng);
  const auto cone = cone_at_center(side);
  for (auto _ : state) {
    if constexpr (Parallel) update_memory(f, v, occ, cone, e, 0.7);
    else reference::update_memory(f, v, occ, cone, e, 0.7);
    benchmark::DoNotOptimize(v.value.data());
  }
}

template <bool Parallel>
void BM_RecomputeValueMap(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Rng rng(5);
  const auto f = filled_features(side, 4);
  const auto target = random_unit(rng);
  for (auto _ : state) {
    auto v = Parallel ? recompute_value_map(f, target) : reference::recompute_value_map(f, target);
    benchmark::DoNotOptimize(v.value.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_FrontierMask(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto occ = random_map(side, 7);
  for (auto _ : state) {
    auto m = Parallel ? frontier_mask(occ) : reference::frontier_mask(occ);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

}  // namespace

BENCHMARK(BM_UpdateMemory<true>)->Name("update_memory/parallel")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_UpdateMemory<false>)->Name("update_memory/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_RecomputeValueMap<true>)->Name("recompute_value_map/parallel")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_RecomputeValueMap<false>)->Name("recompute_value_map/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_FrontierMask<true>)->Name("frontier_mask/parallel")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_FrontierMask<false>)->Name("frontier_mask/serial")->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
