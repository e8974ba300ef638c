#pragma once

#include <Eigen/Dense>

namespace mvfuse {

using CameraId = int;

// Axis-aligned image box in pixel coordinates. Image v grows downward, so
// v_max is the bottom edge.
struct BBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  bool valid() const { return u_min <= u_max && v_min <= v_max; }
  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  bool contains(const Eigen::Vector2d& px) const {
    return px.x() >= u_min && px.x() <= u_max && px.y() >= v_min &&
           px.y() <= v_max;
  }
  bool contains(const BBox& other) const {
    return other.u_min >= u_min && other.v_min >= v_min &&
           other.u_max <= u_max && other.v_max <= v_max;
  }
  Eigen::Vector4d as_vector() const { return {u_min, v_min, u_max, v_max}; }
  static BBox from_vector(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// World-axis-aligned ellipsoid. half_axes are semi-axis lengths along world
// x, y, z in meters.
struct Ellipsoid {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_axes = Eigen::Vector3d::Ones();
};

// Calibrated pinhole camera. X_cam = R * X_world + t, pixel = K * X_cam / z.
// Immutable once constructed; the constructor validates the invariants and
// throws ValidationError.
class CameraModel {
 public:
  CameraModel(CameraId id, const Eigen::Matrix3d& intrinsics,
              const Eigen::Matrix3d& rotation,
              const Eigen::Vector3d& translation, int width, int height);

  // Builds a camera at `center` looking at `target`, with world +z as "up".
  static CameraModel look_at(CameraId id, const Eigen::Vector3d& center,
                             const Eigen::Vector3d& target, double focal,
                             int width, int height);

  CameraId id() const { return id_; }
  const Eigen::Matrix3d& intrinsics() const { return K_; }
  const Eigen::Matrix3d& rotation() const { return R_; }
  const Eigen::Vector3d& translation() const { return t_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Camera center in world coordinates, -R^T t.
  Eigen::Vector3d center() const { return -R_.transpose() * t_; }
  // 3x4 projection matrix K [R | t].
  Eigen::Matrix<double, 3, 4> projection() const;
  // z coordinate of X in the camera frame.
  double depth(const Eigen::Vector3d& world) const {
    return R_.row(2).dot(world) + t_.z();
  }

  // Same camera with translation multiplied by `factor` (unit conversion).
  CameraModel scaled(double factor) const;

 private:
  CameraId id_;
  Eigen::Matrix3d K_;
  Eigen::Matrix3d R_;
  Eigen::Vector3d t_;
  int width_;
  int height_;
};

// Tolerances used by the camera invariants.
inline constexpr double kRotationTolerance = 1e-9;
inline constexpr double kMinDepth = 1e-9;

// Largest entry of |R^T R - I|.
double orthonormality_error(const Eigen::Matrix3d& rotation);

// Pinhole projection. Throws NonPositiveDepth when depth <= 1e-9.
Eigen::Vector2d project_point(const CameraModel& cam,
                              const Eigen::Vector3d& world);

// H = K [r1 r2 t]: maps homogeneous ground points (X, Y, 1) on z = 0 to
// homogeneous pixels. Throws DegenerateHomography if |det H| < 1e-12.
Eigen::Matrix3d ground_homography(const CameraModel& cam);

// Intersects the pixel's viewing ray with the ground plane z = 0.
// Throws DegenerateHomography or PointAtInfinity.
Eigen::Vector3d backproject_ground(const CameraModel& cam,
                                   const Eigen::Vector2d& px);

// Exact bounding box of the ellipsoid's image outline via the dual quadric
// Q* = T diag(a^2, b^2, c^2, -1) T^T projected to the dual conic
// C* = P Q* P^T. The four box edges are the lines of C* parallel to the image
// axes. Throws DegenerateConic when the outline is not a bounded ellipse
// (centre behind the camera, camera inside the ellipsoid, or the principal
// plane cutting the ellipsoid).
BBox project_ellipsoid_to_bbox(const CameraModel& cam, const Ellipsoid& e);

// Midpoint of the bottom edge.
Eigen::Vector2d feet_point(const BBox& b);

}  // namespace mvfuse
