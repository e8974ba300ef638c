#pragma once

#include <optional>
#include <vector>

#include "mvfuse/annotation.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/pose.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

// Everything needed to run (and optionally score) one sequence.
struct SceneBundle {
  std::vector<CameraModel> cameras;  // ascending id
  AnnotationSequence annotations;    // ascending frame
  std::optional<TrackSet> gt_tracks;
  std::optional<CanonicalPose> skeleton;
};

}  // namespace mvfuse
