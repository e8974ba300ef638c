#include <benchmark/benchmark.h>

#include "mvfuse/filter.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/synth.hpp"
#include "mvfuse/tracker.hpp"

namespace {

using namespace mvfuse;

void BM_EllipsoidBox(benchmark::State& state) {
  const auto cam = CameraModel::look_at(1, {8, -6, 5}, {0, 0, 1}, 1200, 1920, 1080);
  const Ellipsoid e{{0.4, -0.2, 0.9}, {0.3, 0.25, 0.9}};
  for (auto _ : state) benchmark::DoNotOptimize(project_ellipsoid_to_bbox(cam, e));
}
BENCHMARK(BM_EllipsoidBox);

void BM_UkfBoxUpdate(benchmark::State& state) {
  const auto cam = CameraModel::look_at(1, {8, -6, 5}, {0, 0, 1}, 1200, 1920, 1080);
  TrackerConfig config;
  CameraObservations obs;
  obs[1].bbox = {900, 300, 1000, 700};
  const ObjectState s = init_target(obs, {cam}, config);
  const Eigen::Vector4d z(905, 305, 995, 695);
  const Eigen::MatrixXd R = config.r_bbox * Eigen::MatrixXd::Identity(4, 4);
  const MeasurementFn h = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return bbox_measurement(cam, x);
  };
  for (auto _ : state) benchmark::DoNotOptimize(ukf_update(s.belief, z, h, R));
}
BENCHMARK(BM_UkfBoxUpdate);

void BM_RunAll(benchmark::State& state) {
  SceneSpec spec;
  spec.num_objects = static_cast<int>(state.range(0));
  spec.num_cameras = 4;
  spec.frames = 100;
  const SyntheticScene scene = generate(spec);
  TrackerConfig config;
  config.dt = spec.dt();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_all(scene.bundle.annotations, scene.bundle.cameras, config));
  }
  state.SetItemsProcessed(state.iterations() * spec.num_objects * spec.frames);
}
BENCHMARK(BM_RunAll)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
