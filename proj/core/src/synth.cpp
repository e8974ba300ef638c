#include "mvfuse/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "mvfuse/error.hpp"

namespace mvfuse {

std::string to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::kStatic:
      return "static";
    case MotionKind::kConstantVelocity:
      return "constant-velocity";
    case MotionKind::kWaypoint:
      return "waypoint";
  }
  return "unknown";
}

MotionKind motion_kind_from_string(const std::string& name) {
  if (name == "static") return MotionKind::kStatic;
  if (name == "constant-velocity") return MotionKind::kConstantVelocity;
  if (name == "waypoint") return MotionKind::kWaypoint;
  throw InvalidSpec("unknown motion kind '" + name + "'");
}

void validate(const SceneSpec& spec) {
  auto fail = [](const std::string& why) { throw InvalidSpec(why); };
  if (spec.num_objects < 0) fail("num_objects must be >= 0");
  if (spec.num_cameras < 1) fail("num_cameras must be >= 1");
  if (spec.frames < 1) fail("frames must be >= 1");
  if (!(spec.fps > 0.0)) fail("fps must be positive");
  if (!(spec.arena_size > 0.0)) fail("arena_size must be positive");
  if (!(spec.speed >= 0.0)) fail("speed must be >= 0");
  if (spec.waypoints < 2) fail("waypoints must be >= 2");
  if (!(spec.lateral_min > 0.0) || spec.lateral_max < spec.lateral_min) {
    fail("lateral half-axis range is invalid");
  }
  if (!(spec.vertical_min > 0.0) || spec.vertical_max < spec.vertical_min) {
    fail("vertical half-axis range is invalid");
  }
  if (!(spec.camera_height > 0.0)) fail("camera_height must be positive");
  if (!(spec.camera_radius > 0.5 * std::numbers::sqrt2 * spec.arena_size +
                                 spec.lateral_max)) {
    fail("camera_radius must place the cameras outside the arena");
  }
  if (!(spec.fov_deg > 0.0 && spec.fov_deg < 180.0)) {
    fail("fov_deg must be in (0, 180)");
  }
  if (spec.image_width < 1 || spec.image_height < 1) {
    fail("image size must be positive");
  }
  if (!(spec.margin_px >= 0.0)) fail("margin_px must be >= 0");
  if (!(spec.pixel_noise_std >= 0.0)) fail("pixel_noise_std must be >= 0");
  if (!(spec.pose_jitter >= 0.0)) fail("pose_jitter must be >= 0");
  if (!spec.skeleton.empty() && spec.skeleton != "coco17" &&
      spec.skeleton != "panoptic15") {
    fail("unknown skeleton '" + spec.skeleton + "'");
  }
  for (const auto& o : spec.occlusions) {
    if (o.last < o.first) fail("occlusion range is reversed");
  }
}

std::vector<CameraModel> ring_cameras(int count, double radius, double height,
                                      double fov_deg, int width,
                                      int height_px) {
  const double focal =
      0.5 * width / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
  std::vector<CameraModel> cams;
  cams.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / count;
    const Eigen::Vector3d center(radius * std::cos(angle),
                                 radius * std::sin(angle), height);
    cams.push_back(CameraModel::look_at(c + 1, center, {0.0, 0.0, 0.0}, focal,
                                        width, height_px));
  }
  return cams;
}

namespace {

struct Subject {
  Eigen::Vector3d half_axes;
  std::vector<Eigen::Vector2d> waypoints;  // ground positions
  Keypoints3d joint_offsets;               // added to the placed template
};

Eigen::Vector2d ground_at(const Subject& s, const SceneSpec& spec, int k) {
  if (s.waypoints.size() == 1 || spec.frames == 1) return s.waypoints.front();
  const double u = static_cast<double>(k) / (spec.frames - 1) *
                   static_cast<double>(s.waypoints.size() - 1);
  const std::size_t seg = std::min<std::size_t>(
      static_cast<std::size_t>(u), s.waypoints.size() - 2);
  const double a = u - static_cast<double>(seg);
  return (1.0 - a) * s.waypoints[seg] + a * s.waypoints[seg + 1];
}

bool occluded(const SceneSpec& spec, CameraId cam, ObjectId obj,
              FrameIndex frame) {
  for (const auto& o : spec.occlusions) {
    if (o.camera == cam && (o.object < 0 || o.object == obj) &&
        frame >= o.first && frame <= o.last) {
      return true;
    }
  }
  return false;
}

bool within_margin(const BBox& b, const CameraModel& cam, double margin) {
  return b.u_min >= -margin && b.v_min >= -margin &&
         b.u_max <= cam.width() + margin && b.v_max <= cam.height() + margin;
}

}  // namespace

SyntheticScene generate(const SceneSpec& spec) {
  validate(spec);
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32)};
  std::mt19937_64 world_rng(seq);
  std::mt19937_64 noise_rng(world_rng());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * unit(world_rng);
  };
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::optional<CanonicalPose> skeleton;
  if (!spec.skeleton.empty()) skeleton = builtin_skeleton(spec.skeleton);

  const double half = 0.5 * spec.arena_size;
  const double duration = (spec.frames - 1) / spec.fps;

  std::vector<Subject> subjects;
  for (int i = 0; i < spec.num_objects; ++i) {
    Subject s;
    const double lateral = uniform(spec.lateral_min, spec.lateral_max);
    s.half_axes = {lateral, lateral, uniform(spec.vertical_min,
                                             spec.vertical_max)};
    const double inner = half - s.half_axes.x();
    switch (spec.motion) {
      case MotionKind::kStatic:
        s.waypoints = {{uniform(-inner, inner), uniform(-inner, inner)}};
        break;
      case MotionKind::kConstantVelocity: {
        const double heading = uniform(0.0, 2.0 * std::numbers::pi);
        const Eigen::Vector2d travel =
            spec.speed * duration *
            Eigen::Vector2d(std::cos(heading), std::sin(heading));
        // Start where the whole straight path stays inside the arena when
        // it fits; otherwise centre the path on the arena.
        Eigen::Vector2d start;
        for (int axis = 0; axis < 2; ++axis) {
          const double lo = -inner - std::min(0.0, travel[axis]);
          const double hi = inner - std::max(0.0, travel[axis]);
          start[axis] = lo <= hi ? uniform(lo, hi) : -0.5 * travel[axis];
        }
        s.waypoints = {start, start + travel};
        break;
      }
      case MotionKind::kWaypoint:
        for (int w = 0; w < spec.waypoints; ++w) {
          s.waypoints.emplace_back(uniform(-inner, inner),
                                   uniform(-inner, inner));
        }
        break;
    }
    if (skeleton) {
      s.joint_offsets.resize(skeleton->size(), 3);
      for (Eigen::Index j = 0; j < s.joint_offsets.size(); ++j) {
        s.joint_offsets.data()[j] = spec.pose_jitter * gauss(world_rng);
      }
    }
    subjects.push_back(std::move(s));
  }

  SyntheticScene out;
  out.bundle.cameras =
      ring_cameras(spec.num_cameras, spec.camera_radius, spec.camera_height,
                   spec.fov_deg, spec.image_width, spec.image_height);
  out.bundle.skeleton = skeleton;
  const auto& cams = out.bundle.cameras;

  for (int i = 0; i < spec.num_objects; ++i) {
    Track t;
    t.object_id = i + 1;
    out.truth.emplace(t.object_id, std::move(t));
  }

  std::normal_distribution<double> pixel_noise(0.0, 1.0);
  auto noisy = [&](double v) {
    return spec.pixel_noise_std > 0.0
               ? v + spec.pixel_noise_std * pixel_noise(noise_rng)
               : v;
  };

  for (int k = 0; k < spec.frames; ++k) {
    AnnotationFrame frame;
    frame.frame = k;
    for (int i = 0; i < spec.num_objects; ++i) {
      const Subject& s = subjects[static_cast<std::size_t>(i)];
      const ObjectId id = i + 1;
      const Eigen::Vector2d ground = ground_at(s, spec, k);
      const Ellipsoid body{{ground.x(), ground.y(), s.half_axes.z()},
                           s.half_axes};

      TrackEntry truth{k, body.center, body.half_axes, {}};
      if (skeleton) {
        truth.keypoints = place_pose(*skeleton, body.center, body.half_axes) +
                          s.joint_offsets;
      }

      for (const auto& cam : cams) {
        if (occluded(spec, cam.id(), id, k)) continue;
        BBox box;
        try {
          box = project_ellipsoid_to_bbox(cam, body);
        } catch (const GeometryError&) {
          continue;
        }
        if (!within_margin(box, cam, spec.margin_px)) continue;

        Observation obs;
        if (spec.pixel_noise_std > 0.0) {
          const double u0 = noisy(box.u_min), v0 = noisy(box.v_min);
          const double u1 = noisy(box.u_max), v1 = noisy(box.v_max);
          box = {std::min(u0, u1), std::min(v0, v1), std::max(u0, u1),
                 std::max(v0, v1)};
        }
        obs.bbox = box;
        if (skeleton) {
          Keypoints2d kp(truth.keypoints.rows(), 3);
          for (Eigen::Index j = 0; j < kp.rows(); ++j) {
            const Eigen::Vector3d p = truth.keypoints.row(j).transpose();
            if (cam.depth(p) <= kMinDepth) {
              kp.row(j) << 0.0, 0.0, 0.0;
              continue;
            }
            const Eigen::Vector2d px = project_point(cam, p);
            const bool inside = px.x() >= -spec.margin_px &&
                                px.y() >= -spec.margin_px &&
                                px.x() <= cam.width() + spec.margin_px &&
                                px.y() <= cam.height() + spec.margin_px;
            if (inside) {
              kp.row(j) << noisy(px.x()), noisy(px.y()), 1.0;
            } else {
              kp.row(j) << 0.0, 0.0, 0.0;
            }
          }
          obs.keypoints = std::move(kp);
        }
        frame.objects[id][cam.id()] = std::move(obs);
      }
      out.truth[id].entries.push_back(std::move(truth));
    }
    out.bundle.annotations.push_back(std::move(frame));
  }
  out.bundle.gt_tracks = out.truth;
  return out;
}

}  // namespace mvfuse
