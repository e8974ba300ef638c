#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvfuse/annotation.hpp"
#include "mvfuse/config.hpp"
#include "mvfuse/filter.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

// Normalized template pose: unit height, origin at the body centre, world
// axes x forward, y to the subject's left, z up.
struct CanonicalPose {
  std::string name;
  std::vector<std::string> joints;
  Keypoints3d coordinates;  // N x 3

  Eigen::Index size() const { return coordinates.rows(); }
};

// Built-in skeletons: "coco17" and "panoptic15". Throws UnknownSkeleton.
CanonicalPose builtin_skeleton(const std::string& name);

// Picks the built-in skeleton with `joint_count` joints. Throws
// UnknownSkeleton.
CanonicalPose skeleton_for_joint_count(Eigen::Index joint_count);

// Rescales to unit vertical extent and recentres on the bounding-box centre.
// Throws ValidationError for empty or flat poses.
CanonicalPose normalized(CanonicalPose pose);

// Per-keypoint belief over [x, vx, y, vy, z, vz].
struct KeypointState {
  GaussianBelief belief;

  Eigen::Vector3d position() const {
    return {belief.mean[0], belief.mean[2], belief.mean[4]};
  }
  Eigen::Vector3d velocity() const {
    return {belief.mean[1], belief.mean[3], belief.mean[5]};
  }
};

// Places the template at `center`: height scaled to 2 * half_axes.z, lateral
// extent scaled to 2 * half_axes.y, depth scaled with the height. Each
// keypoint inherits `velocity`.
std::vector<KeypointState> init_keypoints(const CanonicalPose& pose,
                                          const Eigen::Vector3d& center,
                                          const Eigen::Vector3d& half_axes,
                                          const Eigen::Vector3d& velocity,
                                          const TrackerConfig& config);

// Where init_keypoints places the joints (means only).
Keypoints3d place_pose(const CanonicalPose& pose, const Eigen::Vector3d& center,
                       const Eigen::Vector3d& half_axes);

// Something that went wrong for a single keypoint/camera update.
struct KeypointDiagnostic {
  Eigen::Index joint = 0;
  CameraId camera = 0;
  std::string message;
};

void predict_keypoints(std::vector<KeypointState>& states,
                       const MotionModel& motion);

// Sequential UKF update of every keypoint with one camera's 2D keypoints.
// Keypoints whose visibility flag is not above the threshold are skipped,
// as are keypoints whose sigma points cannot be projected.
std::vector<KeypointDiagnostic> update_keypoints(
    std::vector<KeypointState>& states, const Keypoints2d& observed,
    const CameraModel& cam, const TrackerConfig& config);

Keypoints3d keypoint_positions(const std::vector<KeypointState>& states);

// Keypoint-only tracking: frame 0 of `frames` is processed without a
// prediction, every later frame is predicted one step first. Cameras are
// visited in ascending id order. Returns the N x 3 estimate after each frame.
std::vector<Keypoints3d> track_keypoints(
    const std::vector<std::map<CameraId, Keypoints2d>>& frames,
    std::vector<KeypointState> states, const std::vector<CameraModel>& cams,
    const TrackerConfig& config);

}  // namespace mvfuse
