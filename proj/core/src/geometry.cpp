#include "mvfuse/geometry.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mvfuse/error.hpp"

namespace mvfuse {

namespace {

std::string camera_entity(CameraId id) {
  return "camera " + std::to_string(id);
}

}  // namespace

double orthonormality_error(const Eigen::Matrix3d& rotation) {
  return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
      .cwiseAbs()
      .maxCoeff();
}

CameraModel::CameraModel(CameraId id, const Eigen::Matrix3d& intrinsics,
                         const Eigen::Matrix3d& rotation,
                         const Eigen::Vector3d& translation, int width,
                         int height)
    : id_(id),
      K_(intrinsics),
      R_(rotation),
      t_(translation),
      width_(width),
      height_(height) {
  if (!K_.allFinite() || !R_.allFinite() || !t_.allFinite()) {
    throw ValidationError(camera_entity(id), "non-finite calibration value");
  }
  const double ortho = orthonormality_error(R_);
  if (ortho >= kRotationTolerance) {
    std::ostringstream msg;
    msg << "rotation is not orthonormal (|R^T R - I|_max = " << ortho << ")";
    throw ValidationError(camera_entity(id), msg.str());
  }
  const double det = R_.determinant();
  if (std::abs(det - 1.0) > kRotationTolerance) {
    std::ostringstream msg;
    msg << "rotation determinant is " << det << ", expected 1";
    throw ValidationError(camera_entity(id), msg.str());
  }
  if (K_(1, 0) != 0.0 || K_(2, 0) != 0.0 || K_(2, 1) != 0.0 ||
      K_(2, 2) != 1.0) {
    throw ValidationError(camera_entity(id),
                          "intrinsics must be upper-triangular with K[2,2] = 1");
  }
  if (!(K_(0, 0) > 0.0) || !(K_(1, 1) > 0.0)) {
    throw ValidationError(camera_entity(id), "focal lengths must be positive");
  }
  if (width_ <= 0 || height_ <= 0) {
    throw ValidationError(camera_entity(id), "image size must be positive");
  }
}

CameraModel CameraModel::look_at(CameraId id, const Eigen::Vector3d& center,
                                 const Eigen::Vector3d& target, double focal,
                                 int width, int height) {
  const Eigen::Vector3d forward = (target - center).normalized();
  Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
  if (right.norm() < 1e-9) {
    // Looking straight up or down: pick world +x as the image right axis.
    right = Eigen::Vector3d::UnitX();
    right -= forward * forward.dot(right);
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);

  Eigen::Matrix3d R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();

  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  K(0, 0) = focal;
  K(1, 1) = focal;
  K(0, 2) = 0.5 * width;
  K(1, 2) = 0.5 * height;
  return CameraModel(id, K, R, -R * center, width, height);
}

Eigen::Matrix<double, 3, 4> CameraModel::projection() const {
  Eigen::Matrix<double, 3, 4> Rt;
  Rt.leftCols<3>() = R_;
  Rt.col(3) = t_;
  return K_ * Rt;
}

CameraModel CameraModel::scaled(double factor) const {
  return CameraModel(id_, K_, R_, t_ * factor, width_, height_);
}

Eigen::Vector2d project_point(const CameraModel& cam,
                              const Eigen::Vector3d& world) {
  const Eigen::Vector3d c = cam.rotation() * world + cam.translation();
  if (!(c.z() > kMinDepth)) {
    throw NonPositiveDepth("point is at or behind camera " +
                           std::to_string(cam.id()));
  }
  const Eigen::Matrix3d& K = cam.intrinsics();
  const double x = c.x() / c.z();
  const double y = c.y() / c.z();
  return {K(0, 0) * x + K(0, 1) * y + K(0, 2), K(1, 1) * y + K(1, 2)};
}

Eigen::Matrix3d ground_homography(const CameraModel& cam) {
  Eigen::Matrix3d M;
  M.col(0) = cam.rotation().col(0);
  M.col(1) = cam.rotation().col(1);
  M.col(2) = cam.translation();
  const Eigen::Matrix3d H = cam.intrinsics() * M;
  if (std::abs(H.determinant()) < 1e-12) {
    throw DegenerateHomography("camera " + std::to_string(cam.id()) +
                               " centre lies in the ground plane");
  }
  return H;
}

Eigen::Vector3d backproject_ground(const CameraModel& cam,
                                   const Eigen::Vector2d& px) {
  const Eigen::Matrix3d H = ground_homography(cam);
  const Eigen::Vector3d g = H.partialPivLu().solve(px.homogeneous());
  if (std::abs(g.z()) < 1e-12 || !g.allFinite()) {
    throw PointAtInfinity("pixel ray of camera " + std::to_string(cam.id()) +
                          " is parallel to the ground plane");
  }
  return {g.x() / g.z(), g.y() / g.z(), 0.0};
}

BBox project_ellipsoid_to_bbox(const CameraModel& cam, const Ellipsoid& e) {
  if (!(cam.depth(e.center) > kMinDepth)) {
    throw DegenerateConic("ellipsoid centre is behind camera " +
                          std::to_string(cam.id()));
  }
  const Eigen::Vector3d a2 = e.half_axes.cwiseAbs2();
  const Eigen::Vector3d offset = cam.center() - e.center;
  if (offset.cwiseAbs2().cwiseQuotient(a2).sum() <= 1.0) {
    throw DegenerateConic("camera " + std::to_string(cam.id()) +
                          " is inside the ellipsoid");
  }

  // Q* = T diag(a^2, b^2, c^2, -1) T^T with T the translation by the centre.
  Eigen::Matrix4d dual_quadric;
  dual_quadric.topLeftCorner<3, 3>() =
      Eigen::Matrix3d(a2.asDiagonal()) - e.center * e.center.transpose();
  dual_quadric.topRightCorner<3, 1>() = -e.center;
  dual_quadric.bottomLeftCorner<1, 3>() = -e.center.transpose();
  dual_quadric(3, 3) = -1.0;

  const Eigen::Matrix<double, 3, 4> P = cam.projection();
  const Eigen::Matrix3d C = P * dual_quadric * P.transpose();

  // C(2,2) is the dual quadric evaluated on the principal plane; it is
  // negative exactly when that plane misses the ellipsoid.
  const double scale = C.cwiseAbs().maxCoeff();
  if (!(C(2, 2) < -1e-12 * scale)) {
    throw DegenerateConic("ellipsoid crosses the principal plane of camera " +
                          std::to_string(cam.id()));
  }
  const double cu = C(0, 2) / C(2, 2);
  const double cv = C(1, 2) / C(2, 2);
  const double du = cu * cu - C(0, 0) / C(2, 2);
  const double dv = cv * cv - C(1, 1) / C(2, 2);
  if (du < 0.0 || dv < 0.0 || !std::isfinite(du) || !std::isfinite(dv)) {
    throw DegenerateConic("projected outline of the ellipsoid is not bounded");
  }
  const double hu = std::sqrt(du);
  const double hv = std::sqrt(dv);
  return {cu - hu, cv - hv, cu + hu, cv + hv};
}

Eigen::Vector2d feet_point(const BBox& b) {
  return {0.5 * (b.u_min + b.u_max), b.v_max};
}

}  // namespace mvfuse
