#include "mvfuse/pose.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "mvfuse/error.hpp"

namespace mvfuse {

namespace {

struct JointSpec {
  const char* name;
  double forward;  // fraction of stature
  double left;     // fraction of stature
  double height;   // fraction of stature above the floor
};

// Standing pose with slightly abducted arms; proportions from standard
// anthropometric tables (joint heights as fractions of stature).
constexpr std::array<JointSpec, 17> kCoco17 = {{
    {"nose", 0.055, 0.000, 0.925},
    {"left_eye", 0.045, 0.032, 0.936},
    {"right_eye", 0.045, -0.032, 0.936},
    {"left_ear", 0.000, 0.065, 0.930},
    {"right_ear", 0.000, -0.065, 0.930},
    {"left_shoulder", 0.000, 0.129, 0.818},
    {"right_shoulder", 0.000, -0.129, 0.818},
    {"left_elbow", 0.000, 0.160, 0.630},
    {"right_elbow", 0.000, -0.160, 0.630},
    {"left_wrist", 0.020, 0.185, 0.485},
    {"right_wrist", 0.020, -0.185, 0.485},
    {"left_hip", 0.000, 0.095, 0.530},
    {"right_hip", 0.000, -0.095, 0.530},
    {"left_knee", 0.010, 0.090, 0.285},
    {"right_knee", 0.010, -0.090, 0.285},
    {"left_ankle", 0.000, 0.085, 0.039},
    {"right_ankle", 0.000, -0.085, 0.039},
}};

constexpr std::array<JointSpec, 15> kPanoptic15 = {{
    {"neck", 0.000, 0.000, 0.870},
    {"nose", 0.055, 0.000, 0.925},
    {"body_center", 0.000, 0.000, 0.530},
    {"left_shoulder", 0.000, 0.129, 0.818},
    {"left_elbow", 0.000, 0.160, 0.630},
    {"left_wrist", 0.020, 0.185, 0.485},
    {"left_hip", 0.000, 0.095, 0.530},
    {"left_knee", 0.010, 0.090, 0.285},
    {"left_ankle", 0.000, 0.085, 0.039},
    {"right_shoulder", 0.000, -0.129, 0.818},
    {"right_elbow", 0.000, -0.160, 0.630},
    {"right_wrist", 0.020, -0.185, 0.485},
    {"right_hip", 0.000, -0.095, 0.530},
    {"right_knee", 0.010, -0.090, 0.285},
    {"right_ankle", 0.000, -0.085, 0.039},
}};

template <std::size_t N>
CanonicalPose from_table(const std::string& name,
                         const std::array<JointSpec, N>& table) {
  CanonicalPose pose;
  pose.name = name;
  pose.coordinates.resize(static_cast<Eigen::Index>(N), 3);
  for (std::size_t i = 0; i < N; ++i) {
    pose.joints.emplace_back(table[i].name);
    pose.coordinates.row(static_cast<Eigen::Index>(i))
        << table[i].forward, table[i].left, table[i].height;
  }
  return normalized(std::move(pose));
}

GaussianBelief keypoint_prior(const Eigen::Vector3d& position,
                              const Eigen::Vector3d& velocity,
                              const TrackerConfig& config) {
  GaussianBelief b;
  b.mean.resize(6);
  b.mean << position.x(), velocity.x(), position.y(), velocity.y(),
      position.z(), velocity.z();
  Eigen::VectorXd diag(6);
  diag << config.keypoint_pos_var, config.keypoint_vel_var,
      config.keypoint_pos_var, config.keypoint_vel_var,
      config.keypoint_pos_var, config.keypoint_vel_var;
  b.covariance = diag.asDiagonal();
  return b;
}

}  // namespace

CanonicalPose normalized(CanonicalPose pose) {
  if (pose.coordinates.rows() == 0) {
    throw ValidationError("skeleton " + pose.name, "has no joints");
  }
  if (!pose.joints.empty() &&
      static_cast<Eigen::Index>(pose.joints.size()) != pose.coordinates.rows()) {
    throw ValidationError("skeleton " + pose.name,
                          "joint names and coordinates differ in length");
  }
  const Eigen::RowVector3d lo = pose.coordinates.colwise().minCoeff();
  const Eigen::RowVector3d hi = pose.coordinates.colwise().maxCoeff();
  const double height = hi.z() - lo.z();
  if (!(height > 0.0)) {
    throw ValidationError("skeleton " + pose.name, "has zero vertical extent");
  }
  const Eigen::RowVector3d mid = 0.5 * (lo + hi);
  pose.coordinates = (pose.coordinates.rowwise() - mid) / height;
  return pose;
}

CanonicalPose builtin_skeleton(const std::string& name) {
  if (name == "coco17") return from_table(name, kCoco17);
  if (name == "panoptic15") return from_table(name, kPanoptic15);
  throw UnknownSkeleton("unknown skeleton '" + name + "'");
}

CanonicalPose skeleton_for_joint_count(Eigen::Index joint_count) {
  if (joint_count == 17) return builtin_skeleton("coco17");
  if (joint_count == 15) return builtin_skeleton("panoptic15");
  throw UnknownSkeleton("no built-in skeleton with " +
                        std::to_string(joint_count) + " joints");
}

Keypoints3d place_pose(const CanonicalPose& pose, const Eigen::Vector3d& center,
                       const Eigen::Vector3d& half_axes) {
  const double height = 2.0 * half_axes.z();
  const double lateral_extent = pose.coordinates.col(1).maxCoeff() -
                                pose.coordinates.col(1).minCoeff();
  const double lateral_scale =
      lateral_extent > 0.0 ? 2.0 * half_axes.y() / lateral_extent : height;

  Keypoints3d out(pose.size(), 3);
  out.col(0) = pose.coordinates.col(0) * height;
  out.col(1) = pose.coordinates.col(1) * lateral_scale;
  out.col(2) = pose.coordinates.col(2) * height;
  out.rowwise() += center.transpose();
  return out;
}

std::vector<KeypointState> init_keypoints(const CanonicalPose& pose,
                                          const Eigen::Vector3d& center,
                                          const Eigen::Vector3d& half_axes,
                                          const Eigen::Vector3d& velocity,
                                          const TrackerConfig& config) {
  const Keypoints3d placed = place_pose(pose, center, half_axes);
  std::vector<KeypointState> states;
  states.reserve(static_cast<std::size_t>(placed.rows()));
  for (Eigen::Index j = 0; j < placed.rows(); ++j) {
    states.push_back(
        {keypoint_prior(placed.row(j).transpose(), velocity, config)});
  }
  return states;
}

void predict_keypoints(std::vector<KeypointState>& states,
                       const MotionModel& motion) {
  for (auto& s : states) s.belief = kalman_predict(s.belief, motion);
}

std::vector<KeypointDiagnostic> update_keypoints(
    std::vector<KeypointState>& states, const Keypoints2d& observed,
    const CameraModel& cam, const TrackerConfig& config) {
  std::vector<KeypointDiagnostic> diagnostics;
  const Eigen::Index n =
      std::min<Eigen::Index>(observed.rows(),
                             static_cast<Eigen::Index>(states.size()));
  if (observed.rows() != static_cast<Eigen::Index>(states.size())) {
    diagnostics.push_back(
        {-1, cam.id(),
         "observed " + std::to_string(observed.rows()) +
             " keypoints, skeleton has " + std::to_string(states.size())});
  }
  const Eigen::Matrix2d R =
      config.r_keypoint * Eigen::Matrix2d::Identity();
  const MeasurementFn h = [&cam](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return project_point(cam, Eigen::Vector3d(x[0], x[2], x[4]));
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(observed(j, 2) > config.visibility_threshold)) continue;
    const Eigen::Vector2d z = observed.row(j).head<2>().transpose();
    auto& belief = states[static_cast<std::size_t>(j)].belief;
    try {
      belief = ukf_update(belief, z, h, R, config.ut);
    } catch (const FilterError& e) {
      diagnostics.push_back({j, cam.id(), e.what()});
    }
  }
  return diagnostics;
}

Keypoints3d keypoint_positions(const std::vector<KeypointState>& states) {
  Keypoints3d out(static_cast<Eigen::Index>(states.size()), 3);
  for (std::size_t j = 0; j < states.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = states[j].position().transpose();
  }
  return out;
}

std::vector<Keypoints3d> track_keypoints(
    const std::vector<std::map<CameraId, Keypoints2d>>& frames,
    std::vector<KeypointState> states, const std::vector<CameraModel>& cams,
    const TrackerConfig& config) {
  const MotionModel motion =
      make_motion_model(config.dt, config.q_pos, 0.0, StateLayout::kKeypoint);
  std::map<CameraId, const CameraModel*> by_id;
  for (const auto& c : cams) by_id[c.id()] = &c;

  std::vector<Keypoints3d> out;
  out.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (k > 0) predict_keypoints(states, motion);
    for (const auto& [cam_id, observed] : frames[k]) {
      auto it = by_id.find(cam_id);
      if (it == by_id.end()) continue;
      update_keypoints(states, observed, *it->second, config);
    }
    out.push_back(keypoint_positions(states));
  }
  return out;
}

}  // namespace mvfuse
