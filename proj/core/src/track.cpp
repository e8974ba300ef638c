#include "mvfuse/track.hpp"

#include <algorithm>
#include <set>

#include "mvfuse/annotation.hpp"

namespace mvfuse {

const TrackEntry* Track::at(FrameIndex frame) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), frame,
      [](const TrackEntry& e, FrameIndex f) { return e.frame < f; });
  if (it == entries.end() || it->frame != frame) return nullptr;
  return &*it;
}

TrackSet to_track_set(std::vector<Track> tracks) {
  TrackSet out;
  for (auto& t : tracks) {
    const ObjectId id = t.object_id;
    out.emplace(id, std::move(t));
  }
  return out;
}

std::vector<FrameIndex> frame_union(const TrackSet& a, const TrackSet& b) {
  std::set<FrameIndex> frames;
  for (const auto* set : {&a, &b}) {
    for (const auto& [id, track] : *set) {
      for (const auto& e : track.entries) frames.insert(e.frame);
    }
  }
  return {frames.begin(), frames.end()};
}

bool tracks_equal(const Track& a, const Track& b) {
  if (a.object_id != b.object_id || a.entries.size() != b.entries.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const TrackEntry& x = a.entries[i];
    const TrackEntry& y = b.entries[i];
    if (x.frame != y.frame || x.position != y.position ||
        x.half_axes != y.half_axes ||
        x.keypoints.rows() != y.keypoints.rows() ||
        x.keypoints != y.keypoints) {
      return false;
    }
  }
  return true;
}

bool track_sets_equal(const TrackSet& a, const TrackSet& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !tracks_equal(ia->second, ib->second)) {
      return false;
    }
  }
  return true;
}

std::map<ObjectId, ObjectAnnotations> group_by_object(
    const AnnotationSequence& frames) {
  std::map<ObjectId, ObjectAnnotations> out;
  for (const auto& f : frames) {
    for (const auto& [id, cams] : f.objects) out[id][f.frame] = cams;
  }
  return out;
}

}  // namespace mvfuse
