#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvfuse/annotation.hpp"
#include "mvfuse/config.hpp"
#include "mvfuse/filter.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/pose.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

// Full state of one tracked object: ellipsoid belief over
// [x, vx, y, vy, z, vz, log a, log b, log c] plus independent keypoints.
struct ObjectState {
  GaussianBelief belief;
  std::vector<KeypointState> keypoints;

  Eigen::Vector3d position() const;
  Eigen::Vector3d velocity() const;
  Eigen::Vector3d half_axes() const;
  Ellipsoid ellipsoid() const { return {position(), half_axes()}; }
};

// Maps an ellipsoid state vector to its box corners in `cam`.
Eigen::Vector4d bbox_measurement(const CameraModel& cam,
                                 const Eigen::VectorXd& state);

// Birth from the feet points of every available box: ground position is the
// mean of the back-projected feet points, z = default half-height, zero
// velocity, log of the default half-axes. Throws NoObservation.
ObjectState init_target(const CameraObservations& boxes,
                        const std::vector<CameraModel>& cams,
                        const TrackerConfig& config);

// init_keypoints with the object's current position, size and velocity.
std::vector<KeypointState> init_keypoints(const CanonicalPose& pose,
                                          const ObjectState& state,
                                          const TrackerConfig& config);

struct Estimate {
  Eigen::Vector3d position;
  Eigen::Vector3d half_axes;
  Keypoints3d keypoints;
};

Estimate extract_estimates(const ObjectState& state);

// Non-fatal problem encountered while tracking. camera = -1 and joint = -1
// when not applicable.
struct Diagnostic {
  ObjectId object_id = 0;
  FrameIndex frame = 0;
  CameraId camera = -1;
  Eigen::Index joint = -1;
  std::string message;
};

struct TrackResult {
  Track track;
  std::vector<Diagnostic> diagnostics;
};

// Filters one object from its birth frame (first frame with a box) to its
// last observed frame. Every frame index in between gets one prediction of
// config.dt and a sequential update per observing camera in ascending id.
// `skeleton` enables keypoint tracking when the object carries keypoints.
// Throws NoObservation when the object has no boxes.
TrackResult track_object(ObjectId id, const ObjectAnnotations& annotations,
                         const std::vector<CameraModel>& cams,
                         const TrackerConfig& config,
                         const std::optional<CanonicalPose>& skeleton = {});

struct RunResult {
  std::vector<Track> tracks;  // ascending object id
  std::vector<Diagnostic> diagnostics;
};

// Tracks every object independently. workers = 0 uses the hardware
// concurrency; output does not depend on the worker count.
RunResult run_all(const AnnotationSequence& annotations,
                  const std::vector<CameraModel>& cams,
                  const TrackerConfig& config,
                  const std::optional<CanonicalPose>& skeleton = {},
                  unsigned workers = 1);

}  // namespace mvfuse
