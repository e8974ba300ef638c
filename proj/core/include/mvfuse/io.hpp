#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mvfuse/annotation.hpp"
#include "mvfuse/config.hpp"
#include "mvfuse/geometry.hpp"
#include "mvfuse/metrics.hpp"
#include "mvfuse/pose.hpp"
#include "mvfuse/scene.hpp"
#include "mvfuse/synth.hpp"
#include "mvfuse/track.hpp"

// Readers throw ParseError (malformed bytes, with 1-based line numbers) or
// ValidationError (well-formed but semantically invalid). File access
// failures throw IoError. Writers are deterministic: the same data always
// produces the same bytes, and doubles are written in shortest round-trip
// form.
namespace mvfuse::io {

// Length unit of the metric values in an input file. Pixels are unaffected.
enum class Units { kMeters, kMillimeters };

double to_meters(Units units);
// "m" or "mm"; throws ValidationError.
Units units_from_string(const std::string& name);

// Calibration: {"cameras": [{"id", "K", "R", "t", "width", "height"}]} with
// K and R as 9 row-major numbers and t in file units. A bare top-level array
// of cameras is accepted too. Extra fields (e.g. distortion) are ignored.
std::vector<CameraModel> parse_calibration(std::istream& in,
                                           const std::string& name,
                                           Units units = Units::kMeters);
std::vector<CameraModel> load_calibration(const std::filesystem::path& path,
                                          Units units = Units::kMeters);
void write_calibration(std::ostream& out, const std::vector<CameraModel>& cams);
void save_calibration(const std::vector<CameraModel>& cams,
                      const std::filesystem::path& path);

// Annotations, JSON Lines: {"frame", "object_id", "camera_id",
// "bbox": [u_min, v_min, u_max, v_max], "keypoints": [[u, v, visible], ...]}.
AnnotationSequence parse_annotations(std::istream& in, const std::string& name);
AnnotationSequence load_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const AnnotationSequence& frames);
void save_annotations(const AnnotationSequence& frames,
                      const std::filesystem::path& path);

// Tracks, JSON Lines: {"frame", "object_id", "position", "half_axes",
// "keypoints"}, written frame-major then by object id.
TrackSet parse_tracks(std::istream& in, const std::string& name,
                      Units units = Units::kMeters);
TrackSet load_tracks(const std::filesystem::path& path,
                     Units units = Units::kMeters);
void write_tracks(std::ostream& out, const TrackSet& tracks);
void save_tracks(const TrackSet& tracks, const std::filesystem::path& path);

// Skeleton: {"name", "joints": [...], "canonical": [[x, y, z], ...]}.
// The canonical pose is normalized to unit height on load.
CanonicalPose parse_skeleton(std::istream& in, const std::string& name);
CanonicalPose load_skeleton(const std::filesystem::path& path);
void write_skeleton(std::ostream& out, const CanonicalPose& pose);

// Run configuration. Missing keys keep their defaults; unknown keys are a
// ValidationError.
RunConfig parse_config(std::istream& in, const std::string& name);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);
// Throws ValidationError.
void validate(const RunConfig& config);

SceneSpec parse_scene_spec(std::istream& in, const std::string& name);
SceneSpec load_scene_spec(const std::filesystem::path& path);
std::string scene_spec_to_json(const SceneSpec& spec);

std::string report_to_json(const MetricReport& report);
MetricReport parse_report(std::istream& in, const std::string& name);
MetricReport load_report(const std::filesystem::path& path);

struct ScenePaths {
  std::filesystem::path calibration;
  std::filesystem::path annotations;
  std::optional<std::filesystem::path> gt_tracks;
  std::optional<std::filesystem::path> skeleton;
};

// Loads and cross-validates a scene. Throws ValidationError when an
// annotation references an unknown camera.
SceneBundle load_scene(const ScenePaths& paths, Units units = Units::kMeters);
void validate(const SceneBundle& scene);

}  // namespace mvfuse::io
