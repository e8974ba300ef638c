#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvfuse/scene.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

enum class MotionKind { kStatic, kConstantVelocity, kWaypoint };

std::string to_string(MotionKind kind);
// Throws InvalidSpec.
MotionKind motion_kind_from_string(const std::string& name);

// Drop every record of `camera` (and `object`, or all objects when
// object < 0) for frames first..last inclusive.
struct Occlusion {
  CameraId camera = 0;
  ObjectId object = -1;
  FrameIndex first = 0;
  FrameIndex last = 0;
};

struct SceneSpec {
  std::uint64_t seed = 1;
  int num_objects = 5;
  int num_cameras = 4;
  int frames = 100;
  double fps = 10.0;
  MotionKind motion = MotionKind::kWaypoint;

  double arena_size = 10.0;   // square side, centred on the origin, meters
  double speed = 0.5;         // constant-velocity speed, m/s
  int waypoints = 4;          // waypoint motion: points visited

  // Ground-truth body size ranges (half-axes, meters).
  double lateral_min = 0.22, lateral_max = 0.35;
  double vertical_min = 0.78, vertical_max = 0.95;

  // Ring rig looking at the arena centre.
  double camera_radius = 12.0;
  double camera_height = 5.0;
  double fov_deg = 70.0;
  int image_width = 1920;
  int image_height = 1080;
  double margin_px = 100.0;  // boxes further outside the frame are dropped

  double pixel_noise_std = 0.0;
  std::string skeleton;           // "", "coco17" or "panoptic15"
  double pose_jitter = 0.03;      // per-subject joint offset std, meters

  std::vector<Occlusion> occlusions;

  double dt() const { return 1.0 / fps; }
};

// Throws InvalidSpec.
void validate(const SceneSpec& spec);

struct SyntheticScene {
  SceneBundle bundle;  // gt_tracks set to `truth`
  TrackSet truth;
};

// Deterministic in `spec`. Throws InvalidSpec.
SyntheticScene generate(const SceneSpec& spec);

// Ring of `count` cameras at `radius`/`height` looking at the origin.
std::vector<CameraModel> ring_cameras(int count, double radius, double height,
                                      double fov_deg, int width, int height_px);

}  // namespace mvfuse
