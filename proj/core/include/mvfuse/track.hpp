#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

namespace mvfuse {

using ObjectId = long long;
using FrameIndex = long long;

using Keypoints3d = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// One extracted 3D estimate (or reference sample) at one frame.
struct TrackEntry {
  FrameIndex frame = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_axes = Eigen::Vector3d::Zero();
  Keypoints3d keypoints;  // N x 3, empty when not tracked
};

// Time-indexed estimates for one identity, frames strictly increasing.
struct Track {
  ObjectId object_id = 0;
  std::vector<TrackEntry> entries;

  const TrackEntry* at(FrameIndex frame) const;
};

// Tracks keyed by object id.
using TrackSet = std::map<ObjectId, Track>;

TrackSet to_track_set(std::vector<Track> tracks);

// Sorted union of frames present in either set.
std::vector<FrameIndex> frame_union(const TrackSet& a, const TrackSet& b);

bool tracks_equal(const Track& a, const Track& b);
bool track_sets_equal(const TrackSet& a, const TrackSet& b);

}  // namespace mvfuse
