#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mvfuse/error.hpp"
#include "mvfuse/geometry.hpp"
#include "oracles.hpp"

namespace mvfuse {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

Matrix3d intrinsics(double f, double c) {
  Matrix3d K;
  K << f, 0, c, 0, f, c, 0, 0, 1;
  return K;
}

CameraModel axis_camera() {
  return CameraModel(1, intrinsics(1000, 500), Matrix3d::Identity(),
                     Vector3d::Zero(), 1000, 1000);
}

CameraModel overhead_camera() {
  const Matrix3d R = Vector3d(1, -1, -1).asDiagonal();
  return CameraModel(1, intrinsics(1000, 500), R, Vector3d(0, 0, 10), 1000,
                     1000);
}

TEST(CameraModel, RejectsNonOrthonormalRotation) {
  Matrix3d R = Matrix3d::Identity();
  R(0, 1) = 0.01;
  try {
    CameraModel(1, intrinsics(1000, 500), R, Vector3d::Zero(), 10, 10);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("0.01"), std::string::npos)
        << e.what();
  }
}

TEST(CameraModel, RejectsReflection) {
  const Matrix3d R = Vector3d(1, 1, -1).asDiagonal();
  EXPECT_THROW(CameraModel(1, intrinsics(1000, 500), R, Vector3d::Zero(), 10,
                           10),
               ValidationError);
}

TEST(CameraModel, RejectsBadIntrinsics) {
  Matrix3d K = intrinsics(1000, 500);
  K(1, 0) = 1.0;
  EXPECT_THROW(CameraModel(1, K, Matrix3d::Identity(), Vector3d::Zero(), 10,
                           10),
               ValidationError);
  K = intrinsics(-1000, 500);
  EXPECT_THROW(CameraModel(1, K, Matrix3d::Identity(), Vector3d::Zero(), 10,
                           10),
               ValidationError);
}

TEST(CameraModel, LookAtCentresTarget) {
  const auto cam = CameraModel::look_at(3, {8, -2, 4}, {0, 0, 1}, 900, 1920,
                                        1080);
  const Vector2d px = project_point(cam, {0, 0, 1});
  EXPECT_NEAR(px.x(), 960.0, 1e-9);
  EXPECT_NEAR(px.y(), 540.0, 1e-9);
  EXPECT_NEAR((cam.center() - Vector3d(8, -2, 4)).norm(), 0.0, 1e-12);
  // Up in the world is up in the image.
  EXPECT_LT(project_point(cam, {0, 0, 2}).y(), px.y());
}

TEST(ProjectPoint, OpticalAxis) {
  const Vector2d px = project_point(axis_camera(), {0, 0, 5});
  EXPECT_DOUBLE_EQ(px.x(), 500.0);
  EXPECT_DOUBLE_EQ(px.y(), 500.0);
}

TEST(ProjectPoint, PinholeArithmetic) {
  const Vector2d px = project_point(axis_camera(), {1, 0, 5});
  EXPECT_DOUBLE_EQ(px.x(), 700.0);
  EXPECT_DOUBLE_EQ(px.y(), 500.0);
}

TEST(ProjectPoint, BehindCamera) {
  EXPECT_THROW(project_point(axis_camera(), {0, 0, -1}), NonPositiveDepth);
  EXPECT_THROW(project_point(axis_camera(), {1, 1, 0}), NonPositiveDepth);
}

TEST(ProjectPoint, DoublingFocalDoublesOffset) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const CameraModel cam = testing::random_camera(rng);
    Matrix3d K2 = cam.intrinsics();
    K2(0, 0) *= 2.0;
    K2(1, 1) *= 2.0;
    const CameraModel cam2(cam.id(), K2, cam.rotation(), cam.translation(),
                           cam.width(), cam.height());
    const Vector3d X(coord(rng), coord(rng), 0.5 * coord(rng) + 1.0);
    const Vector2d a = project_point(cam, X);
    const Vector2d b = project_point(cam2, X);
    const Vector2d c(cam.intrinsics()(0, 2), cam.intrinsics()(1, 2));
    EXPECT_NEAR((b - c).x(), 2.0 * (a - c).x(), 1e-9);
    EXPECT_NEAR((b - c).y(), 2.0 * (a - c).y(), 1e-9);
  }
}

TEST(GroundHomography, OriginUnderOverheadCamera) {
  const Vector3d h = ground_homography(overhead_camera()) * Vector3d(0, 0, 1);
  EXPECT_NEAR(h.x() / h.z(), 500.0, 1e-12);
  EXPECT_NEAR(h.y() / h.z(), 500.0, 1e-12);
}

TEST(GroundHomography, MapsGroundPoint) {
  const Vector3d h = ground_homography(overhead_camera()) * Vector3d(1, 2, 1);
  EXPECT_NEAR(h.x() / h.z(), 600.0, 1e-12);
  EXPECT_NEAR(h.y() / h.z(), 300.0, 1e-12);
  const Vector2d px = project_point(overhead_camera(), {1, 2, 0});
  EXPECT_NEAR(px.x(), 600.0, 1e-12);
  EXPECT_NEAR(px.y(), 300.0, 1e-12);
}

TEST(GroundHomography, CameraInGroundPlane) {
  const auto cam = CameraModel::look_at(1, {5, 0, 0}, {0, 0, 0}, 1000, 100,
                                        100);
  EXPECT_THROW(ground_homography(cam), DegenerateHomography);
  EXPECT_THROW(backproject_ground(cam, {50, 50}), DegenerateHomography);
}

TEST(BackprojectGround, OverheadExamples) {
  const Vector3d origin = backproject_ground(overhead_camera(), {500, 500});
  EXPECT_NEAR(origin.norm(), 0.0, 1e-12);
  const Vector3d p = backproject_ground(overhead_camera(), {600, 300});
  EXPECT_NEAR(p.x(), 1.0, 1e-12);
  EXPECT_NEAR(p.y(), 2.0, 1e-12);
  EXPECT_EQ(p.z(), 0.0);
}

TEST(BackprojectGround, HorizonIsAtInfinity) {
  // Level camera at height 1 looking along +x; the image row through the
  // principal point is the horizon.
  const auto cam = CameraModel::look_at(1, {0, 0, 1}, {10, 0, 1}, 1000,
                                        1000, 1000);
  EXPECT_THROW(backproject_ground(cam, {500, 500}), PointAtInfinity);
}

TEST(BackprojectGround, RoundtripRandom) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int c = 0; c < 20; ++c) {
    const CameraModel cam = testing::random_camera(rng);
    int tested = 0;
    while (tested < 200) {
      const Vector3d X(coord(rng), coord(rng), 0.0);
      if (cam.depth(X) <= 0.1) continue;
      ++tested;
      const Vector3d back = backproject_ground(cam, project_point(cam, X));
      EXPECT_LT((back - X).norm(), 1e-6);
    }
  }
}

TEST(EllipsoidBox, UnitSphereOnAxis) {
  const BBox b = project_ellipsoid_to_bbox(axis_camera(),
                                           {{0, 0, 5}, {1, 1, 1}});
  const double half = 1000.0 / std::sqrt(24.0);
  EXPECT_NEAR(half, 204.124, 1e-3);
  EXPECT_NEAR(b.u_min, 500.0 - half, 1e-9);
  EXPECT_NEAR(b.u_max, 500.0 + half, 1e-9);
  EXPECT_NEAR(b.v_min, 500.0 - half, 1e-9);
  EXPECT_NEAR(b.v_max, 500.0 + half, 1e-9);
  const BBox s = testing::sampled_bbox(axis_camera(), {{0, 0, 5}, {1, 1, 1}});
  EXPECT_NEAR(s.u_max, b.u_max, 0.5);
  EXPECT_NEAR(s.v_min, b.v_min, 0.5);
}

TEST(EllipsoidBox, MatchesAnalyticSphere) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> radius(0.1, 1.0);
  for (int i = 0; i < 200; ++i) {
    const CameraModel cam = testing::random_camera(rng);
    const Vector3d c(coord(rng), coord(rng), 1.0 + 0.5 * coord(rng));
    const double r = radius(rng);
    if ((cam.center() - c).norm() < 2.0 * r || cam.depth(c) < 2.0 * r) continue;
    const BBox got = project_ellipsoid_to_bbox(cam, {c, Vector3d::Constant(r)});
    const BBox want = testing::sphere_bbox(cam, c, r);
    EXPECT_NEAR(got.u_min, want.u_min, 1e-6);
    EXPECT_NEAR(got.u_max, want.u_max, 1e-6);
    EXPECT_NEAR(got.v_min, want.v_min, 1e-6);
    EXPECT_NEAR(got.v_max, want.v_max, 1e-6);
  }
}

TEST(EllipsoidBox, CollapsesToPoint) {
  const auto cam = CameraModel::look_at(1, {20, 3, 6}, {0, 0, 1}, 1000, 1920,
                                        1080);
  const Vector3d c(0.5, -0.3, 1.0);
  const BBox b = project_ellipsoid_to_bbox(cam, {c, Vector3d::Constant(1e-4)});
  const Vector2d p = project_point(cam, c);
  EXPECT_NEAR(b.u_min, p.x(), 0.01);
  EXPECT_NEAR(b.u_max, p.x(), 0.01);
  EXPECT_NEAR(b.v_min, p.y(), 0.01);
  EXPECT_NEAR(b.v_max, p.y(), 0.01);
}

TEST(EllipsoidBox, CameraInsideIsDegenerate) {
  EXPECT_THROW(project_ellipsoid_to_bbox(axis_camera(), {{0, 0, 0.5}, {1, 1, 1}}),
               DegenerateConic);
}

TEST(EllipsoidBox, CentreBehindCameraIsDegenerate) {
  EXPECT_THROW(
      project_ellipsoid_to_bbox(axis_camera(), {{0, 0, -5}, {1, 1, 1}}),
      DegenerateConic);
}

TEST(EllipsoidBox, CameraOnSurfacePlaneIsDegenerate) {
  // The ellipsoid straddles the camera plane: the outline is unbounded.
  EXPECT_THROW(
      project_ellipsoid_to_bbox(axis_camera(), {{3, 0, 0.2}, {1, 1, 1}}),
      DegenerateConic);
}

TEST(EllipsoidBoxProperty, ContainsSurfaceAndIsTight) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> axis(0.1, 1.0);
  int checked = 0;
  while (checked < 60) {
    const CameraModel cam = testing::random_camera(rng);
    const Ellipsoid e{{coord(rng), coord(rng), 1.0 + 0.3 * coord(rng)},
                      {axis(rng), axis(rng), axis(rng)}};
    if (cam.depth(e.center) < 2.0 ||
        (cam.center() - e.center).norm() < 2.0) {
      continue;
    }
    ++checked;
    const BBox box = project_ellipsoid_to_bbox(cam, e);
    const BBox s = testing::sampled_bbox(cam, e);
    const double slack = 1e-6;
    EXPECT_LE(box.u_min, s.u_min + slack);
    EXPECT_LE(box.v_min, s.v_min + slack);
    EXPECT_GE(box.u_max, s.u_max - slack);
    EXPECT_GE(box.v_max, s.v_max - slack);
    EXPECT_NEAR(box.u_min, s.u_min, 0.5);
    EXPECT_NEAR(box.v_min, s.v_min, 0.5);
    EXPECT_NEAR(box.u_max, s.u_max, 0.5);
    EXPECT_NEAR(box.v_max, s.v_max, 0.5);
    EXPECT_TRUE(box.contains(project_point(cam, e.center)));
  }
}

TEST(EllipsoidBoxProperty, GrowingAxesGrowsBox) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> axis(0.1, 0.6);
  std::uniform_real_distribution<double> scale(1.0, 2.0);
  int checked = 0;
  while (checked < 100) {
    const CameraModel cam = testing::random_camera(rng);
    const Ellipsoid e{{coord(rng), coord(rng), 1.0},
                      {axis(rng), axis(rng), axis(rng)}};
    const double s = scale(rng);
    const Ellipsoid big{e.center, s * e.half_axes};
    if ((cam.center() - e.center).norm() < 3.0 || cam.depth(e.center) < 3.0) {
      continue;
    }
    ++checked;
    EXPECT_TRUE(project_ellipsoid_to_bbox(cam, big).contains(
        project_ellipsoid_to_bbox(cam, e)));
  }
}

TEST(FeetPoint, Examples) {
  EXPECT_EQ(feet_point({100, 100, 200, 300}), Vector2d(150, 300));
  EXPECT_EQ(feet_point({0, 0, 0, 0}), Vector2d(0, 0));
  EXPECT_EQ(feet_point({480, 120, 520, 480}), Vector2d(500, 480));
}

TEST(BBox, Validity) {
  EXPECT_TRUE((BBox{0, 0, 0, 0}.valid()));
  EXPECT_FALSE((BBox{2, 0, 1, 5}.valid()));
  EXPECT_FALSE((BBox{0, 5, 1, 4}.valid()));
}

}  // namespace
}  // namespace mvfuse
