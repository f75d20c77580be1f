// Throughput benchmarks for the hot paths: density kernels, potential scoring,
// candidate generation, and full Gibbs sweeps on the office fixture.

#include <benchmark/benchmark.h>

#include <poseplace/candidates.hpp>
#include <poseplace/densities.hpp>
#include <poseplace/dp_sampler.hpp>
#include <poseplace/fixtures.hpp>
#include <poseplace/learning.hpp>
#include <poseplace/numerics.hpp>

namespace {

using namespace poseplace;

void BM_LogDensityKernels(benchmark::State& state) {
  double x = 0.1;
  double acc = 0.0;
  for (auto _ : state) {
    acc += lognormal_logpdf(x, -0.5, 0.4);
    acc += vonmises_logpdf(x, 0.3, 8.0);
    acc += gaussian_logpdf(x, 0.0, 0.2);
    x = x < 3.0 ? x + 1e-3 : 0.1;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_LogDensityKernels);

void BM_PotentialScore(benchmark::State& state) {
  Scene scene = make_office_scene(7);
  PotentialScorer scorer(default_category_params(), PoseActivityTable{});
  auto poses = generate_pose_candidates(scene);
  auto candidates = generate_placement_candidates(scene, "keyboard");
  std::size_t pi = 0, ci = 0;
  double acc = 0.0;
  for (auto _ : state) {
    const auto& c = candidates[ci];
    acc += scorer(poses[pi], c.location, c.orientation);
    pi = (pi + 1) % poses.size();
    ci = (ci + 7) % candidates.size();
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PotentialScore);

void BM_PlacementCandidates(benchmark::State& state) {
  Scene scene = make_office_scene(7);
  for (auto _ : state) {
    auto candidates = generate_placement_candidates(scene, "keyboard");
    benchmark::DoNotOptimize(candidates.data());
  }
}
BENCHMARK(BM_PlacementCandidates);

void BM_PoseCandidates(benchmark::State& state) {
  Scene scene = make_office_scene(7);
  for (auto _ : state) {
    auto poses = generate_pose_candidates(scene);
    benchmark::DoNotOptimize(poses.data());
  }
}
BENCHMARK(BM_PoseCandidates);

void BM_GibbsSweeps(benchmark::State& state) {
  Scene scene = make_office_scene(7);
  std::erase_if(scene.objects,
                [](const ObjectInstance& o) { return o.category == "keyboard"; });
  ModelParams params;
  for (const auto& entry : scene.categories) params.categories[entry.first] = default_category_params();
  std::vector<TargetSpec> targets{{"k", "keyboard"}};
  DPConfig config;
  config.sweeps = static_cast<int>(state.range(0));
  config.burn_in = 0;
  config.thinning = 1;
  config.seed = 99;
  for (auto _ : state) {
    auto result = run_chain(scene, targets, params, config);
    benchmark::DoNotOptimize(result.snapshots.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsSweeps)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
