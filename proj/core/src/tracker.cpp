#include "mvfuse/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "mvfuse/error.hpp"

namespace mvfuse {

namespace si = state_index;

Eigen::Vector3d ObjectState::position() const {
  return {belief.mean[si::kX], belief.mean[si::kY], belief.mean[si::kZ]};
}

Eigen::Vector3d ObjectState::velocity() const {
  return {belief.mean[si::kVx], belief.mean[si::kVy], belief.mean[si::kVz]};
}

Eigen::Vector3d ObjectState::half_axes() const {
  return belief.mean.segment<3>(si::kLogA).array().exp();
}

Eigen::Vector4d bbox_measurement(const CameraModel& cam,
                                 const Eigen::VectorXd& state) {
  const Ellipsoid e{{state[si::kX], state[si::kY], state[si::kZ]},
                    state.segment<3>(si::kLogA).array().exp()};
  return project_ellipsoid_to_bbox(cam, e).as_vector();
}

namespace {

const CameraModel* find_camera(const std::vector<CameraModel>& cams,
                               CameraId id) {
  for (const auto& c : cams) {
    if (c.id() == id) return &c;
  }
  return nullptr;
}

}  // namespace

ObjectState init_target(const CameraObservations& boxes,
                        const std::vector<CameraModel>& cams,
                        const TrackerConfig& config) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  int count = 0;
  for (const auto& [cam_id, obs] : boxes) {
    const CameraModel* cam = find_camera(cams, cam_id);
    if (cam == nullptr || !obs.bbox.valid()) continue;
    try {
      const Eigen::Vector3d ground =
          backproject_ground(*cam, feet_point(obs.bbox));
      sum += ground.head<2>();
      ++count;
    } catch (const GeometryError&) {
      // Feet ray misses the ground plane in this view.
    }
  }
  if (count == 0) {
    throw NoObservation("no camera provides a usable box at birth");
  }
  const Eigen::Vector2d ground = sum / count;

  ObjectState s;
  s.belief.mean = Eigen::VectorXd::Zero(9);
  s.belief.mean[si::kX] = ground.x();
  s.belief.mean[si::kY] = ground.y();
  s.belief.mean[si::kZ] = config.default_half_axes.z();
  s.belief.mean.segment<3>(si::kLogA) =
      config.default_half_axes.array().log();

  Eigen::VectorXd diag(9);
  diag << config.init_pos_var, config.init_vel_var, config.init_pos_var,
      config.init_vel_var, config.init_pos_var, config.init_vel_var,
      config.init_log_shape_var, config.init_log_shape_var,
      config.init_log_shape_var;
  s.belief.covariance = diag.asDiagonal();
  return s;
}

std::vector<KeypointState> init_keypoints(const CanonicalPose& pose,
                                          const ObjectState& state,
                                          const TrackerConfig& config) {
  return init_keypoints(pose, state.position(), state.half_axes(),
                        state.velocity(), config);
}

Estimate extract_estimates(const ObjectState& state) {
  return {state.position(), state.half_axes(),
          keypoint_positions(state.keypoints)};
}

namespace {

class ObjectFilter {
 public:
  ObjectFilter(ObjectId id, const std::vector<CameraModel>& cams,
               const TrackerConfig& config,
               const std::optional<CanonicalPose>& skeleton,
               std::vector<Diagnostic>& diagnostics)
      : id_(id),
        cams_(cams),
        config_(config),
        skeleton_(skeleton),
        diagnostics_(diagnostics),
        motion_(make_motion_model(config.dt, config.q_pos, config.q_shape,
                                  StateLayout::kEllipsoid)),
        keypoint_motion_(make_motion_model(config.dt, config.q_pos, 0.0,
                                           StateLayout::kKeypoint)) {}

  void birth(FrameIndex frame, const CameraObservations& obs) {
    state_ = init_target(obs, cams_, config_);
    update_boxes(frame, obs);
    // Keypoints start from the box-refined ellipsoid.
    init_pose(obs);
    update_pose(frame, obs);
  }

  void step(FrameIndex frame, const CameraObservations* obs) {
    state_.belief = kalman_predict(state_.belief, motion_);
    predict_keypoints(state_.keypoints, keypoint_motion_);
    if (obs == nullptr) return;
    update_boxes(frame, *obs);
    if (state_.keypoints.empty()) init_pose(*obs);
    update_pose(frame, *obs);
  }

  const ObjectState& state() const { return state_; }

 private:
  void update_boxes(FrameIndex frame, const CameraObservations& obs) {
    const Eigen::Matrix4d R = config_.r_bbox * Eigen::Matrix4d::Identity();
    for (const auto& [cam_id, o] : obs) {
      const CameraModel* cam = find_camera(cams_, cam_id);
      if (cam == nullptr) {
        report(frame, cam_id, -1, "unknown camera");
        continue;
      }
      const MeasurementFn h = [cam](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(bbox_measurement(*cam, x));
      };
      try {
        state_.belief = ukf_update(state_.belief, o.bbox.as_vector(), h, R,
                                   config_.ut);
      } catch (const FilterError& e) {
        report(frame, cam_id, -1, e.what());
      }
    }
  }

  void init_pose(const CameraObservations& obs) {
    if (!skeleton_) return;
    for (const auto& [cam_id, o] : obs) {
      if (o.keypoints && o.keypoints->rows() > 0) {
        state_.keypoints = init_keypoints(*skeleton_, state_, config_);
        return;
      }
    }
  }

  void update_pose(FrameIndex frame, const CameraObservations& obs) {
    if (state_.keypoints.empty()) return;
    for (const auto& [cam_id, o] : obs) {
      if (!o.keypoints) continue;
      const CameraModel* cam = find_camera(cams_, cam_id);
      if (cam == nullptr) continue;
      for (auto& d :
           update_keypoints(state_.keypoints, *o.keypoints, *cam, config_)) {
        report(frame, cam_id, d.joint, std::move(d.message));
      }
    }
  }

  void report(FrameIndex frame, CameraId cam, Eigen::Index joint,
              std::string message) {
    diagnostics_.push_back({id_, frame, cam, joint, std::move(message)});
  }

  ObjectId id_;
  const std::vector<CameraModel>& cams_;
  const TrackerConfig& config_;
  const std::optional<CanonicalPose>& skeleton_;
  std::vector<Diagnostic>& diagnostics_;
  MotionModel motion_;
  MotionModel keypoint_motion_;
  ObjectState state_;
};

bool has_box(const CameraObservations& obs) {
  return std::any_of(obs.begin(), obs.end(),
                     [](const auto& kv) { return kv.second.bbox.valid(); });
}

TrackEntry to_entry(FrameIndex frame, const ObjectState& s) {
  const Estimate e = extract_estimates(s);
  return {frame, e.position, e.half_axes, e.keypoints};
}

}  // namespace

TrackResult track_object(ObjectId id, const ObjectAnnotations& annotations,
                         const std::vector<CameraModel>& cams,
                         const TrackerConfig& config,
                         const std::optional<CanonicalPose>& skeleton) {
  TrackResult result;
  result.track.object_id = id;

  auto birth = std::find_if(annotations.begin(), annotations.end(),
                            [](const auto& kv) { return has_box(kv.second); });
  if (birth == annotations.end()) {
    throw NoObservation("object " + std::to_string(id) + " has no boxes");
  }
  FrameIndex last = birth->first;
  for (const auto& [frame, obs] : annotations) {
    if (has_box(obs)) last = frame;
  }

  ObjectFilter filter(id, cams, config, skeleton, result.diagnostics);
  // Birth can fail when every feet ray misses the ground; retry on the next
  // observed frame.
  auto it = birth;
  for (; it != annotations.end(); ++it) {
    try {
      filter.birth(it->first, it->second);
      break;
    } catch (const NoObservation& e) {
      result.diagnostics.push_back({id, it->first, -1, -1, e.what()});
    }
  }
  if (it == annotations.end()) {
    throw NoObservation("object " + std::to_string(id) +
                        " could not be initialized");
  }
  result.track.entries.push_back(to_entry(it->first, filter.state()));

  auto next = std::next(it);
  for (FrameIndex frame = it->first + 1; frame <= last; ++frame) {
    const CameraObservations* obs = nullptr;
    if (next != annotations.end() && next->first == frame) {
      obs = &next->second;
      ++next;
    }
    filter.step(frame, obs);
    result.track.entries.push_back(to_entry(frame, filter.state()));
  }
  return result;
}

RunResult run_all(const AnnotationSequence& annotations,
                  const std::vector<CameraModel>& cams,
                  const TrackerConfig& config,
                  const std::optional<CanonicalPose>& skeleton,
                  unsigned workers) {
  const auto grouped = group_by_object(annotations);
  std::vector<std::pair<ObjectId, const ObjectAnnotations*>> jobs;
  for (const auto& [id, ann] : grouped) jobs.emplace_back(id, &ann);

  struct Slot {
    std::optional<Track> track;
    std::vector<Diagnostic> diagnostics;
  };
  std::vector<Slot> slots(jobs.size());

  auto run_job = [&](std::size_t i) {
    const auto& [id, ann] = jobs[i];
    try {
      TrackResult r = track_object(id, *ann, cams, config, skeleton);
      slots[i].track = std::move(r.track);
      slots[i].diagnostics = std::move(r.diagnostics);
    } catch (const Error& e) {
      slots[i].diagnostics.push_back({id, 0, -1, -1, e.what()});
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, jobs.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  RunResult result;
  for (auto& s : slots) {
    if (s.track) result.tracks.push_back(std::move(*s.track));
    result.diagnostics.insert(result.diagnostics.end(), s.diagnostics.begin(),
                              s.diagnostics.end());
  }
  return result;
}

}  // namespace mvfuse
