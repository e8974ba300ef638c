#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mvfuse/geometry.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

// N x 3 rows of (u, v, visibility).
using Keypoints2d = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// One object's annotation in one camera at one frame.
struct Observation {
  BBox bbox;
  std::optional<Keypoints2d> keypoints;
};

// Camera id -> observation. Ordered so iteration is ascending camera id.
using CameraObservations = std::map<CameraId, Observation>;

// All annotations of a single frame.
struct AnnotationFrame {
  FrameIndex frame = 0;
  std::map<ObjectId, CameraObservations> objects;
};

// Frames sorted ascending, at most one record per (object, camera, frame).
using AnnotationSequence = std::vector<AnnotationFrame>;

// Per-object view of an annotation sequence: frame -> camera observations.
using ObjectAnnotations = std::map<FrameIndex, CameraObservations>;

std::map<ObjectId, ObjectAnnotations> group_by_object(
    const AnnotationSequence& frames);

}  // namespace mvfuse
