// Acceptance harness. Prints one PASS/FAIL line per criterion and exits
// nonzero when any evaluated criterion fails. A criterion whose inputs are
// not available is printed as FAIL (not run) and does not set the status.
//
//   mvfuse_acceptance [path/to/mvfuse_tests]
//
// With the unit test binary given, criterion 8 runs its property suite.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "mvfuse/error.hpp"
#include "mvfuse/filter.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/metrics.hpp"
#include "mvfuse/pose.hpp"
#include "mvfuse/synth.hpp"
#include "mvfuse/tracker.hpp"
#include "oracles.hpp"

namespace {

using namespace mvfuse;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;
int not_run = 0;

void report(int id, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << detail
            << std::endl;
  if (!pass) ++failures;
}

template <typename F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void closed_loop_tracking() {
  SceneSpec spec;
  spec.seed = 2024;
  spec.num_objects = 10;
  spec.num_cameras = 6;
  spec.frames = 400;
  const SyntheticScene scene = generate(spec);

  TrackerConfig config;
  config.dt = spec.dt();
  const auto t0 = Clock::now();
  const RunResult run = run_all(scene.bundle.annotations, scene.bundle.cameras,
                                config, std::nullopt, 1);
  const double runtime = seconds_since(t0);

  const TrackSet pred = to_track_set(run.tracks);
  const ClearMotResult clear = clear_mot(pred, scene.truth, 1.0);
  const double id = idf1(pred, scene.truth, 1.0);
  const double ospa = ospa2(pred, scene.truth, 1.0);
  const bool pass = clear.mota >= 99.9 && id >= 99.9 && clear.fp == 0 &&
                    clear.fn == 0 && clear.ids == 0 && ospa <= 0.02 &&
                    runtime <= 60.0;
  std::ostringstream d;
  d << "closed loop 10 objects / 6 cameras / 400 frames: MOTA " << clear.mota
    << " IDF1 " << id << " FP " << clear.fp << " FN " << clear.fn << " IDS "
    << clear.ids << " OSPA2 " << ospa << " m, " << runtime
    << " s (need MOTA,IDF1 >= 99.9, FP=FN=IDS=0, OSPA2 <= 0.02, <= 60 s)";
  report(1, pass, d.str());
}

void pose_reconstruction() {
  SceneSpec spec;
  spec.seed = 7;
  spec.num_objects = 3;
  spec.num_cameras = 5;
  spec.frames = 50;
  spec.motion = MotionKind::kConstantVelocity;
  spec.skeleton = "coco17";
  const SyntheticScene scene = generate(spec);

  TrackerConfig config;
  config.dt = spec.dt();
  const RunResult run = run_all(scene.bundle.annotations, scene.bundle.cameras,
                                config, scene.bundle.skeleton, 1);
  const PoseMetrics m =
      pose_metrics(to_track_set(run.tracks), scene.truth, {25.0}, 500.0);
  const double mpjpe = m.mpjpe_mm.value_or(1e9);
  const bool pass = mpjpe <= 10.0 && m.ap.at(0) >= 99.0 && m.recall == 100.0;
  std::ostringstream d;
  d << "pose 3 subjects / 5 cameras / 50 frames: MPJPE " << mpjpe << " mm, AP@25 "
    << m.ap.at(0) << "%, Recall@500 " << m.recall
    << "% (need <= 10 mm, >= 99%, = 100%)";
  report(2, pass, d.str());
}

void ukf_linear_equivalence() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(1, 9), meas(1, 4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = dim(rng), m = meas(rng);
    const GaussianBelief b{testing::random_vector(rng, d),
                           testing::random_spd(rng, d, 0.1, 2.0)};
    Eigen::MatrixXd H(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      H.row(i) = testing::random_vector(rng, d).transpose();
    }
    const Eigen::MatrixXd R = testing::random_spd(rng, m, 0.1, 1.0);
    const Eigen::VectorXd z = testing::random_vector(rng, m);
    const GaussianBelief got = ukf_update(
        b, z, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return H * x; }, R);
    const GaussianBelief want = testing::linear_kalman_update(b, z, H, R);
    worst = std::max({worst, (got.mean - want.mean).cwiseAbs().maxCoeff(),
                      (got.covariance - want.covariance).cwiseAbs().maxCoeff()});
  }
  std::ostringstream d;
  d << "UKF vs closed-form Kalman on 100 linear systems: max error " << worst
    << " (need <= 1e-9)";
  report(3, worst <= 1e-9, d.str());
}

void ellipsoid_projection_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), axis(0.1, 1.0);
  double worst = 0.0;
  int pairs = 0;
  while (pairs < 200) {
    const CameraModel cam = testing::random_camera(rng);
    const Ellipsoid e{{pos(rng), pos(rng), 1.0}, {axis(rng), axis(rng), axis(rng)}};
    BBox got;
    try {
      got = project_ellipsoid_to_bbox(cam, e);
    } catch (const DegenerateConic&) {
      continue;  // camera too close to this ellipsoid; draw again
    }
    const BBox want = testing::sampled_bbox(cam, e, 10000);
    worst = std::max({worst, std::abs(got.u_min - want.u_min), std::abs(got.v_min - want.v_min),
                      std::abs(got.u_max - want.u_max), std::abs(got.v_max - want.v_max)});
    ++pairs;
  }
  std::ostringstream d;
  d << "dual-quadric box vs 1e4-sample box on 200 pairs: max edge error " << worst
    << " px (need <= 0.5)";
  report(4, worst <= 0.5, d.str());
}

void homography_roundtrip() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  double worst = 0.0;
  int points = 0;
  for (int c = 0; c < 20; ++c) {
    const CameraModel cam = testing::random_camera(rng, c + 1);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector3d x(coord(rng), coord(rng), 0.0);
      if (cam.depth(x) <= 0.0) continue;
      const Eigen::Vector3d back = backproject_ground(cam, project_point(cam, x));
      worst = std::max(worst, (back - x).norm());
      ++points;
    }
  }
  std::ostringstream d;
  d << "backproject(project(x)) over " << points
    << " ground points x 20 cameras: max error " << worst << " m (need < 1e-6)";
  report(5, worst < 1e-6 && points > 0, d.str());
}

void add(TrackSet& set, ObjectId id, FrameIndex frame, const Eigen::Vector3d& p) {
  Track& t = set[id];
  t.object_id = id;
  t.entries.push_back({frame, p, Eigen::Vector3d(0.3, 0.3, 0.9), {}});
}

TrackSet random_tracks(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::bernoulli_distribution present(0.7);
  TrackSet set;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < 5; ++f) {
      if (present(rng)) add(set, i + 1, f, {coord(rng), coord(rng), coord(rng)});
    }
  }
  return set;
}

void metric_consistency() {
  std::mt19937_64 rng(6);
  bool axioms = true;
  for (int trial = 0; trial < 200; ++trial) {
    const TrackSet x = random_tracks(rng), y = random_tracks(rng), z = random_tracks(rng);
    const double xy = ospa2(x, y, 1.0);
    axioms = axioms && std::abs(ospa2(x, x, 1.0)) <= 1e-9 &&
             std::abs(xy - ospa2(y, x, 1.0)) <= 1e-9 && xy >= -1e-9 &&
             xy <= ospa2(x, z, 1.0) + ospa2(z, y, 1.0) + 1e-9;
  }

  TrackSet gt;
  for (int f = 0; f < 20; ++f) {
    for (int id = 1; id <= 3; ++id) add(gt, id, f, {0.1 * f, 1.5 * id, 0.9});
  }
  const ClearMotResult same = clear_mot(gt, gt, 1.0);
  const bool perfect = same.mota == 100.0 && same.fp == 0 && same.fn == 0 &&
                       same.ids == 0 && idf1(gt, gt, 1.0) == 100.0 &&
                       ospa2(gt, gt, 1.0) == 0.0;

  TrackSet g, p;
  add(g, 1, 0, {0, 0, 0});
  add(g, 1, 1, {0.1, 0, 0});
  add(p, 7, 0, {0.05, 0, 0});
  add(p, 8, 1, {0.15, 0, 0});
  const ClearMotResult sw = clear_mot(p, g, 1.0);
  const bool ids_case = sw.ids == 1 && sw.fp == 0 && sw.fn == 0 &&
                        std::abs(sw.mota - 50.0) <= 1e-9 &&
                        std::abs(sw.motp - 0.05) <= 1e-9;

  std::ostringstream d;
  d << "OSPA2 axioms on 200 triples " << (axioms ? "hold" : "violated")
    << ", identical sets " << (perfect ? "perfect" : "imperfect")
    << ", IDS=1 case gives IDS " << sw.ids << " MOTA " << sw.mota << " MOTP "
    << sw.motp;
  report(6, axioms && perfect && ids_case, d.str());
}

void report_not_run(int id, const std::string& reason) {
  std::cout << "FAIL  criterion " << id << ": not run: " << reason << std::endl;
  ++not_run;
}

void dataset_scale() {
  report_not_run(7,
                 "dataset-scale numbers need the public multi-camera datasets, "
                 "which are not available here; see README.md for conversion");
}

void property_suite(const char* unit_binary) {
  if (unit_binary == nullptr) {
    report(8, false, "unit test binary path not given");
    return;
  }
  const std::string cmd = std::string("\"") + unit_binary +
                          "\" --gtest_brief=1 > /dev/null 2>&1";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  const double runtime = seconds_since(t0);
  std::ostringstream d;
  d << "unit and property suite exit status " << status << " in " << runtime
    << " s (need 0 and <= 300 s)";
  report(8, status == 0 && runtime <= 300.0, d.str());
}

}  // namespace

int main(int argc, char** argv) {
  guarded(1, closed_loop_tracking);
  guarded(2, pose_reconstruction);
  guarded(3, ukf_linear_equivalence);
  guarded(4, ellipsoid_projection_oracle);
  guarded(5, homography_roundtrip);
  guarded(6, metric_consistency);
  guarded(7, dataset_scale);
  guarded(8, [&] { property_suite(argc > 1 ? argv[1] : nullptr); });
  std::cout << (failures == 0 ? "all evaluated criteria passed"
                            : "some criteria failed");
  if (not_run > 0) std::cout << ", " << not_run << " not run";
  std::cout << std::endl;
  return failures == 0 ? 0 : 1;
}
