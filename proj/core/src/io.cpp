#include "mvfuse/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvfuse/error.hpp"

namespace mvfuse::io {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// File helpers

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(end),
                            '\n'));
}

// Number overflow carries no position; locate the quoted literal instead.
std::size_t line_of_overflow(const std::string& text, const std::string& what) {
  const auto open = what.find('\'');
  const auto close = what.rfind('\'');
  if (open == std::string::npos || close <= open) return 1;
  const auto at = text.find(what.substr(open + 1, close - open - 1));
  return at == std::string::npos ? 1 : line_of_byte(text, at + 1);
}

json parse_document(std::istream& in, const std::string& name) {
  const std::string text = slurp(in);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(name, line_of_byte(text, e.byte), e.what());
  } catch (const json::out_of_range& e) {
    throw ParseError(name, line_of_overflow(text, e.what()), e.what());
  }
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

// Calls fn(record, line_number) for every non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, const std::string& name, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(name, number, e.what());
    } catch (const json::out_of_range& e) {
      throw ParseError(name, number, e.what());
    }
    if (!record.is_object()) {
      throw ParseError(name, number, "record is not a JSON object");
    }
    fn(record, number);
  }
}

// ---------------------------------------------------------------------------
// Typed field access. Each throws ValidationError naming the entity.

[[noreturn]] void invalid(const std::string& entity, const std::string& rule) {
  throw ValidationError(entity, rule);
}

const json& field(const json& obj, const char* key, const std::string& entity) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(entity, std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& entity, const char* what) {
  if (!v.is_number()) invalid(entity, std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(entity, std::string(what) + " must be finite");
  return d;
}

long long as_integer(const json& v, const std::string& entity,
                     const char* what) {
  if (!v.is_number_integer()) {
    invalid(entity, std::string(what) + " must be an integer");
  }
  return v.get<long long>();
}

bool as_bool(const json& v, const std::string& entity, const char* what) {
  if (!v.is_boolean()) invalid(entity, std::string(what) + " must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& entity,
                      const char* what) {
  if (!v.is_string()) invalid(entity, std::string(what) + " must be a string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vector(const json& v, std::size_t size,
                          const std::string& entity, const char* what) {
  if (!v.is_array() || v.size() != size) {
    invalid(entity, std::string(what) + " must be an array of " +
                        std::to_string(size) + " numbers");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    out[static_cast<Eigen::Index>(i)] = as_number(v[i], entity, what);
  }
  return out;
}

Eigen::Matrix3d as_matrix3(const json& v, const std::string& entity,
                           const char* what) {
  const Eigen::VectorXd flat = as_vector(v, 9, entity, what);
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = flat[3 * r + c];
  }
  return m;
}

// Rows of `cols` numbers; rows of length `min_cols` get `fill` appended.
Eigen::Matrix<double, Eigen::Dynamic, 3> as_rows3(const json& v,
                                                  std::size_t min_cols,
                                                  double fill,
                                                  const std::string& entity,
                                                  const char* what) {
  if (!v.is_array()) invalid(entity, std::string(what) + " must be an array");
  Eigen::Matrix<double, Eigen::Dynamic, 3> out(
      static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() < min_cols || row.size() > 3) {
      invalid(entity, std::string(what) + "[" + std::to_string(i) +
                          "] must have " + std::to_string(min_cols) +
                          (min_cols == 3 ? "" : " or 3") + " numbers");
    }
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < 3; ++c) {
      out(r, static_cast<Eigen::Index>(c)) =
          c < row.size() ? as_number(row[c], entity, what) : fill;
    }
  }
  return out;
}

void require_object(const json& v, const std::string& entity) {
  if (!v.is_object()) invalid(entity, "must be a JSON object");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> keys,
                         const std::string& entity) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      invalid(entity, "unknown field '" + key + "'");
    }
  }
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Derived>
json rows_json(const Eigen::MatrixBase<Derived>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json matrix3_json(const Eigen::Matrix3d& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

std::string line_entity(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line);
}

}  // namespace

double to_meters(Units units) {
  return units == Units::kMillimeters ? 1e-3 : 1.0;
}

Units units_from_string(const std::string& name) {
  if (name == "m") return Units::kMeters;
  if (name == "mm") return Units::kMillimeters;
  throw ValidationError("units", "expected 'm' or 'mm', got '" + name + "'");
}

// ---------------------------------------------------------------------------
// Calibration

std::vector<CameraModel> parse_calibration(std::istream& in,
                                           const std::string& name,
                                           Units units) {
  const json doc = parse_document(in, name);
  const json* list = &doc;
  if (doc.is_object()) list = &field(doc, "cameras", name);
  if (!list->is_array()) invalid(name, "expected a list of cameras");

  std::vector<CameraModel> cams;
  std::set<CameraId> seen;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& c = (*list)[i];
    const std::string entity = name + ": cameras[" + std::to_string(i) + "]";
    require_object(c, entity);
    const long long id = as_integer(field(c, "id", entity), entity, "id");
    const std::string cam_entity = name + ": camera " + std::to_string(id);
    const Eigen::Matrix3d K = as_matrix3(field(c, "K", entity), cam_entity, "K");
    const Eigen::Matrix3d R = as_matrix3(field(c, "R", entity), cam_entity, "R");
    const Eigen::Vector3d t =
        as_vector(field(c, "t", entity), 3, cam_entity, "t") * to_meters(units);
    const long long width =
        as_integer(field(c, "width", entity), cam_entity, "width");
    const long long height =
        as_integer(field(c, "height", entity), cam_entity, "height");
    if (width <= 0 || height <= 0 || width > (1 << 30) || height > (1 << 30) ||
        id < std::numeric_limits<CameraId>::min() ||
        id > std::numeric_limits<CameraId>::max()) {
      invalid(cam_entity, "id or image size out of range");
    }
    if (!seen.insert(static_cast<CameraId>(id)).second) {
      invalid(cam_entity, "duplicate camera id");
    }
    try {
      cams.emplace_back(static_cast<CameraId>(id), K, R, t,
                        static_cast<int>(width), static_cast<int>(height));
    } catch (const ValidationError& e) {
      throw ValidationError(name + ": " + e.entity(), e.rule());
    }
  }
  std::sort(cams.begin(), cams.end(),
            [](const CameraModel& a, const CameraModel& b) {
              return a.id() < b.id();
            });
  return cams;
}

std::vector<CameraModel> load_calibration(const std::filesystem::path& path,
                                          Units units) {
  auto in = open_input(path);
  return parse_calibration(in, path.string(), units);
}

void write_calibration(std::ostream& out,
                       const std::vector<CameraModel>& cams) {
  json list = json::array();
  for (const auto& c : cams) {
    list.push_back({{"id", c.id()},
                    {"K", matrix3_json(c.intrinsics())},
                    {"R", matrix3_json(c.rotation())},
                    {"t", vector_json(c.translation())},
                    {"width", c.width()},
                    {"height", c.height()}});
  }
  out << json{{"cameras", list}}.dump(2) << '\n';
}

void save_calibration(const std::vector<CameraModel>& cams,
                      const std::filesystem::path& path) {
  auto out = open_output(path);
  write_calibration(out, cams);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Annotations

AnnotationSequence parse_annotations(std::istream& in,
                                     const std::string& name) {
  std::map<FrameIndex, AnnotationFrame> frames;
  for_each_record(in, name, [&](const json& r, std::size_t line) {
    const std::string entity = line_entity(name, line);
    const FrameIndex frame = as_integer(field(r, "frame", entity), entity, "frame");
    const ObjectId object =
        as_integer(field(r, "object_id", entity), entity, "object_id");
    const long long camera =
        as_integer(field(r, "camera_id", entity), entity, "camera_id");
    if (camera < std::numeric_limits<CameraId>::min() ||
        camera > std::numeric_limits<CameraId>::max()) {
      invalid(entity, "camera_id out of range");
    }
    const Eigen::VectorXd b = as_vector(field(r, "bbox", entity), 4, entity, "bbox");
    Observation obs;
    obs.bbox = {b[0], b[1], b[2], b[3]};
    if (!obs.bbox.valid()) {
      invalid(entity, "bbox must satisfy u_min <= u_max and v_min <= v_max");
    }
    auto kp = r.find("keypoints");
    if (kp != r.end() && !kp->is_null()) {
      obs.keypoints = as_rows3(*kp, 2, 1.0, entity, "keypoints");
    }
    AnnotationFrame& f = frames[frame];
    f.frame = frame;
    auto& cams = f.objects[object];
    if (!cams.emplace(static_cast<CameraId>(camera), std::move(obs)).second) {
      invalid(entity, "duplicate record for object " + std::to_string(object) +
                          ", camera " + std::to_string(camera) + ", frame " +
                          std::to_string(frame));
    }
  });
  AnnotationSequence out;
  out.reserve(frames.size());
  for (auto& [k, f] : frames) out.push_back(std::move(f));
  return out;
}

AnnotationSequence load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_annotations(in, path.string());
}

void write_annotations(std::ostream& out, const AnnotationSequence& frames) {
  for (const auto& f : frames) {
    for (const auto& [object, cams] : f.objects) {
      for (const auto& [camera, obs] : cams) {
        json r{{"frame", f.frame},
               {"object_id", object},
               {"camera_id", camera},
               {"bbox", vector_json(obs.bbox.as_vector())}};
        if (obs.keypoints) r["keypoints"] = rows_json(*obs.keypoints);
        out << r.dump() << '\n';
      }
    }
  }
}

void save_annotations(const AnnotationSequence& frames,
                      const std::filesystem::path& path) {
  auto out = open_output(path);
  write_annotations(out, frames);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Tracks

TrackSet parse_tracks(std::istream& in, const std::string& name, Units units) {
  const double scale = to_meters(units);
  TrackSet tracks;
  std::map<std::pair<ObjectId, FrameIndex>, std::size_t> seen;
  for_each_record(in, name, [&](const json& r, std::size_t line) {
    const std::string entity = line_entity(name, line);
    const FrameIndex frame = as_integer(field(r, "frame", entity), entity, "frame");
    const ObjectId object =
        as_integer(field(r, "object_id", entity), entity, "object_id");
    auto [it, fresh] = seen.emplace(std::make_pair(object, frame), line);
    if (!fresh) {
      invalid(entity, "duplicate entry for object " + std::to_string(object) +
                          " at frame " + std::to_string(frame) +
                          " (first at line " + std::to_string(it->second) + ")");
    }
    TrackEntry e;
    e.frame = frame;
    e.position =
        as_vector(field(r, "position", entity), 3, entity, "position") * scale;
    auto ha = r.find("half_axes");
    if (ha != r.end() && !ha->is_null()) {
      e.half_axes = as_vector(*ha, 3, entity, "half_axes") * scale;
    }
    auto kp = r.find("keypoints");
    if (kp != r.end() && !kp->is_null()) {
      e.keypoints = as_rows3(*kp, 3, 0.0, entity, "keypoints") * scale;
    }
    Track& t = tracks[object];
    t.object_id = object;
    t.entries.push_back(std::move(e));
  });
  for (auto& [id, t] : tracks) {
    std::sort(t.entries.begin(), t.entries.end(),
              [](const TrackEntry& a, const TrackEntry& b) {
                return a.frame < b.frame;
              });
  }
  return tracks;
}

TrackSet load_tracks(const std::filesystem::path& path, Units units) {
  auto in = open_input(path);
  return parse_tracks(in, path.string(), units);
}

void write_tracks(std::ostream& out, const TrackSet& tracks) {
  std::vector<std::tuple<FrameIndex, ObjectId, const TrackEntry*>> order;
  for (const auto& [id, t] : tracks) {
    for (const auto& e : t.entries) order.emplace_back(e.frame, id, &e);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b));
  });
  for (const auto& [frame, id, e] : order) {
    json r{{"frame", frame},
           {"object_id", id},
           {"position", vector_json(e->position)},
           {"half_axes", vector_json(e->half_axes)},
           {"keypoints", rows_json(e->keypoints)}};
    out << r.dump() << '\n';
  }
}

void save_tracks(const TrackSet& tracks, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_tracks(out, tracks);
  finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Skeleton

CanonicalPose parse_skeleton(std::istream& in, const std::string& name) {
  const json doc = parse_document(in, name);
  require_object(doc, name);
  CanonicalPose pose;
  pose.name = as_string(field(doc, "name", name), name, "name");
  const json& joints = field(doc, "joints", name);
  if (!joints.is_array()) invalid(name, "joints must be an array of names");
  for (const auto& j : joints) pose.joints.push_back(as_string(j, name, "joints"));
  pose.coordinates = as_rows3(field(doc, "canonical", name), 3, 0.0, name,
                              "canonical");
  try {
    return normalized(std::move(pose));
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.entity(), e.rule());
  }
}

CanonicalPose load_skeleton(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_skeleton(in, path.string());
}

void write_skeleton(std::ostream& out, const CanonicalPose& pose) {
  json doc{{"name", pose.name},
           {"joints", pose.joints},
           {"canonical", rows_json(pose.coordinates)}};
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Config

void validate(const RunConfig& config) {
  const TrackerConfig& t = config.tracker;
  const EvalConfig& e = config.eval;
  auto check = [](bool ok, const char* entity, const char* rule) {
    if (!ok) throw ValidationError(entity, rule);
  };
  check(t.dt > 0.0 && std::isfinite(t.dt), "tracker.dt", "must be positive");
  check(t.ut.alpha > 0.0, "tracker.ut.alpha", "must be positive");
  for (double v : {t.q_pos, t.q_shape, t.r_bbox, t.r_keypoint, t.init_pos_var,
                   t.init_vel_var, t.init_log_shape_var, t.keypoint_pos_var,
                   t.keypoint_vel_var}) {
    check(v >= 0.0 && std::isfinite(v), "tracker", "variances must be >= 0");
  }
  check((t.default_half_axes.array() > 0.0).all(),
        "tracker.default_half_axes", "must be positive");
  check(e.threshold > 0.0, "eval.threshold", "must be positive");
  check(e.ospa_cutoff > 0.0, "eval.ospa_cutoff", "must be positive");
  check(e.ospa_order >= 1.0, "eval.ospa_order", "must be >= 1");
  check(e.ospa_window >= 0, "eval.ospa_window", "must be >= 0");
}

RunConfig parse_config(std::istream& in, const std::string& name) {
  const json doc = parse_document(in, name);
  require_object(doc, name);
  reject_unknown_keys(doc, {"tracker", "eval"}, name);
  RunConfig config;

  if (auto it = doc.find("tracker"); it != doc.end()) {
    const std::string entity = name + ": tracker";
    require_object(*it, entity);
    reject_unknown_keys(
        *it,
        {"dt", "ut", "q_pos", "q_shape", "r_bbox", "r_keypoint",
         "default_half_axes", "init_pos_var", "init_vel_var",
         "init_log_shape_var", "keypoint_pos_var", "keypoint_vel_var",
         "visibility_threshold"},
        entity);
    TrackerConfig& t = config.tracker;
    auto num = [&](const char* key, double& target) {
      if (auto f = it->find(key); f != it->end()) {
        target = as_number(*f, entity, key);
      }
    };
    num("dt", t.dt);
    num("q_pos", t.q_pos);
    num("q_shape", t.q_shape);
    num("r_bbox", t.r_bbox);
    num("r_keypoint", t.r_keypoint);
    num("init_pos_var", t.init_pos_var);
    num("init_vel_var", t.init_vel_var);
    num("init_log_shape_var", t.init_log_shape_var);
    num("keypoint_pos_var", t.keypoint_pos_var);
    num("keypoint_vel_var", t.keypoint_vel_var);
    num("visibility_threshold", t.visibility_threshold);
    if (auto f = it->find("default_half_axes"); f != it->end()) {
      t.default_half_axes = as_vector(*f, 3, entity, "default_half_axes");
    }
    if (auto f = it->find("ut"); f != it->end()) {
      const std::string ut_entity = entity + ".ut";
      require_object(*f, ut_entity);
      reject_unknown_keys(*f, {"alpha", "beta", "kappa"}, ut_entity);
      if (auto g = f->find("alpha"); g != f->end())
        t.ut.alpha = as_number(*g, ut_entity, "alpha");
      if (auto g = f->find("beta"); g != f->end())
        t.ut.beta = as_number(*g, ut_entity, "beta");
      if (auto g = f->find("kappa"); g != f->end())
        t.ut.kappa = as_number(*g, ut_entity, "kappa");
    }
  }

  if (auto it = doc.find("eval"); it != doc.end()) {
    const std::string entity = name + ": eval";
    require_object(*it, entity);
    reject_unknown_keys(
        *it, {"threshold", "ospa_cutoff", "ospa_order", "ospa_window",
              "plane_only"},
        entity);
    EvalConfig& e = config.eval;
    if (auto f = it->find("threshold"); f != it->end())
      e.threshold = as_number(*f, entity, "threshold");
    if (auto f = it->find("ospa_cutoff"); f != it->end())
      e.ospa_cutoff = as_number(*f, entity, "ospa_cutoff");
    if (auto f = it->find("ospa_order"); f != it->end())
      e.ospa_order = as_number(*f, entity, "ospa_order");
    if (auto f = it->find("ospa_window"); f != it->end()) {
      const long long w = as_integer(*f, entity, "ospa_window");
      if (w < 0 || w > std::numeric_limits<int>::max()) {
        invalid(entity, "ospa_window out of range");
      }
      e.ospa_window = static_cast<int>(w);
    }
    if (auto f = it->find("plane_only"); f != it->end())
      e.plane_only = as_bool(*f, entity, "plane_only");
  }

  try {
    validate(config);
  } catch (const ValidationError& e) {
    throw ValidationError(name + ": " + e.entity(), e.rule());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_config(in, path.string());
}

std::string config_to_json(const RunConfig& config) {
  const TrackerConfig& t = config.tracker;
  const EvalConfig& e = config.eval;
  json doc{
      {"tracker",
       {{"dt", t.dt},
        {"ut", {{"alpha", t.ut.alpha}, {"beta", t.ut.beta}, {"kappa", t.ut.kappa}}},
        {"q_pos", t.q_pos},
        {"q_shape", t.q_shape},
        {"r_bbox", t.r_bbox},
        {"r_keypoint", t.r_keypoint},
        {"default_half_axes", vector_json(t.default_half_axes)},
        {"init_pos_var", t.init_pos_var},
        {"init_vel_var", t.init_vel_var},
        {"init_log_shape_var", t.init_log_shape_var},
        {"keypoint_pos_var", t.keypoint_pos_var},
        {"keypoint_vel_var", t.keypoint_vel_var},
        {"visibility_threshold", t.visibility_threshold}}},
      {"eval",
       {{"threshold", e.threshold},
        {"ospa_cutoff", e.ospa_cutoff},
        {"ospa_order", e.ospa_order},
        {"ospa_window", e.ospa_window},
        {"plane_only", e.plane_only}}}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic scene spec

SceneSpec parse_scene_spec(std::istream& in, const std::string& name) {
  const json doc = parse_document(in, name);
  require_object(doc, name);
  reject_unknown_keys(
      doc,
      {"seed", "num_objects", "num_cameras", "frames", "fps", "motion",
       "arena_size", "speed", "waypoints", "lateral_min", "lateral_max",
       "vertical_min", "vertical_max", "camera_radius", "camera_height",
       "fov_deg", "image_width", "image_height", "margin_px",
       "pixel_noise_std", "skeleton", "pose_jitter", "occlusions"},
      name);
  SceneSpec s;
  auto num = [&](const char* key, double& target) {
    if (auto f = doc.find(key); f != doc.end()) target = as_number(*f, name, key);
  };
  auto integer = [&](const char* key, int& target) {
    if (auto f = doc.find(key); f != doc.end()) {
      const long long v = as_integer(*f, name, key);
      if (v < std::numeric_limits<int>::min() ||
          v > std::numeric_limits<int>::max()) {
        invalid(name, std::string(key) + " out of range");
      }
      target = static_cast<int>(v);
    }
  };
  if (auto f = doc.find("seed"); f != doc.end()) {
    if (!f->is_number_unsigned() && !f->is_number_integer()) {
      invalid(name, "seed must be a non-negative integer");
    }
    if (f->is_number_integer() && f->get<long long>() < 0) {
      invalid(name, "seed must be a non-negative integer");
    }
    s.seed = f->get<std::uint64_t>();
  }
  integer("num_objects", s.num_objects);
  integer("num_cameras", s.num_cameras);
  integer("frames", s.frames);
  num("fps", s.fps);
  if (auto f = doc.find("motion"); f != doc.end()) {
    try {
      s.motion = motion_kind_from_string(as_string(*f, name, "motion"));
    } catch (const InvalidSpec& e) {
      invalid(name, e.what());
    }
  }
  num("arena_size", s.arena_size);
  num("speed", s.speed);
  integer("waypoints", s.waypoints);
  num("lateral_min", s.lateral_min);
  num("lateral_max", s.lateral_max);
  num("vertical_min", s.vertical_min);
  num("vertical_max", s.vertical_max);
  num("camera_radius", s.camera_radius);
  num("camera_height", s.camera_height);
  num("fov_deg", s.fov_deg);
  integer("image_width", s.image_width);
  integer("image_height", s.image_height);
  num("margin_px", s.margin_px);
  num("pixel_noise_std", s.pixel_noise_std);
  if (auto f = doc.find("skeleton"); f != doc.end() && !f->is_null()) {
    s.skeleton = as_string(*f, name, "skeleton");
  }
  num("pose_jitter", s.pose_jitter);
  if (auto f = doc.find("occlusions"); f != doc.end()) {
    if (!f->is_array()) invalid(name, "occlusions must be an array");
    for (std::size_t i = 0; i < f->size(); ++i) {
      const json& o = (*f)[i];
      const std::string entity = name + ": occlusions[" + std::to_string(i) + "]";
      require_object(o, entity);
      reject_unknown_keys(o, {"camera", "object", "first", "last"}, entity);
      Occlusion occ;
      const long long cam = as_integer(field(o, "camera", entity), entity, "camera");
      if (cam < std::numeric_limits<CameraId>::min() ||
          cam > std::numeric_limits<CameraId>::max()) {
        invalid(entity, "camera out of range");
      }
      occ.camera = static_cast<CameraId>(cam);
      if (auto g = o.find("object"); g != o.end()) {
        occ.object = as_integer(*g, entity, "object");
      }
      occ.first = as_integer(field(o, "first", entity), entity, "first");
      occ.last = as_integer(field(o, "last", entity), entity, "last");
      s.occlusions.push_back(occ);
    }
  }
  return s;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_scene_spec(in, path.string());
}

std::string scene_spec_to_json(const SceneSpec& s) {
  json occlusions = json::array();
  for (const auto& o : s.occlusions) {
    occlusions.push_back(
        {{"camera", o.camera}, {"object", o.object}, {"first", o.first},
         {"last", o.last}});
  }
  json doc{{"seed", s.seed},
           {"num_objects", s.num_objects},
           {"num_cameras", s.num_cameras},
           {"frames", s.frames},
           {"fps", s.fps},
           {"motion", to_string(s.motion)},
           {"arena_size", s.arena_size},
           {"speed", s.speed},
           {"waypoints", s.waypoints},
           {"lateral_min", s.lateral_min},
           {"lateral_max", s.lateral_max},
           {"vertical_min", s.vertical_min},
           {"vertical_max", s.vertical_max},
           {"camera_radius", s.camera_radius},
           {"camera_height", s.camera_height},
           {"fov_deg", s.fov_deg},
           {"image_width", s.image_width},
           {"image_height", s.image_height},
           {"margin_px", s.margin_px},
           {"pixel_noise_std", s.pixel_noise_std},
           {"skeleton", s.skeleton},
           {"pose_jitter", s.pose_jitter},
           {"occlusions", occlusions}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Metric report

std::string report_to_json(const MetricReport& r) {
  json doc{{"fp", r.clear.fp},
           {"fn", r.clear.fn},
           {"ids", r.clear.ids},
           {"mota", r.clear.mota},
           {"motp", r.clear.motp},
           {"matches", r.clear.matches},
           {"gt_count", r.clear.gt_count},
           {"idf1", r.identity.idf1},
           {"idtp", r.identity.idtp},
           {"idfp", r.identity.idfp},
           {"idfn", r.identity.idfn},
           {"ospa2", r.ospa2},
           {"config",
            {{"threshold", r.config.threshold},
             {"ospa_cutoff", r.config.ospa_cutoff},
             {"ospa_order", r.config.ospa_order},
             {"ospa_window", r.config.ospa_window},
             {"plane_only", r.config.plane_only}}}};
  if (r.pose) {
    json ap = json::array();
    for (std::size_t i = 0; i < r.pose->ap.size(); ++i) {
      ap.push_back({{"threshold_mm", r.pose->ap_thresholds_mm[i]},
                    {"ap", r.pose->ap[i]}});
    }
    doc["pose"] = {{"ap", ap},
                   {"recall_at_mm", r.pose->recall_at_mm},
                   {"recall", r.pose->recall},
                   {"mpjpe_mm", r.pose->mpjpe_mm ? json(*r.pose->mpjpe_mm)
                                                 : json(nullptr)},
                   {"gt_poses", r.pose->gt_poses},
                   {"pred_poses", r.pose->pred_poses}};
  }
  return doc.dump(2) + "\n";
}

MetricReport parse_report(std::istream& in, const std::string& name) {
  const json doc = parse_document(in, name);
  require_object(doc, name);
  MetricReport r;
  auto integer = [&](const char* key) {
    return as_integer(field(doc, key, name), name, key);
  };
  auto number = [&](const char* key) {
    return as_number(field(doc, key, name), name, key);
  };
  r.clear.fp = integer("fp");
  r.clear.fn = integer("fn");
  r.clear.ids = integer("ids");
  r.clear.mota = number("mota");
  r.clear.motp = number("motp");
  r.clear.matches = integer("matches");
  r.clear.gt_count = integer("gt_count");
  r.identity.idf1 = number("idf1");
  r.identity.idtp = integer("idtp");
  r.identity.idfp = integer("idfp");
  r.identity.idfn = integer("idfn");
  r.ospa2 = number("ospa2");
  const json& c = field(doc, "config", name);
  require_object(c, name + ": config");
  r.config.threshold = as_number(field(c, "threshold", name), name, "threshold");
  r.config.ospa_cutoff =
      as_number(field(c, "ospa_cutoff", name), name, "ospa_cutoff");
  r.config.ospa_order =
      as_number(field(c, "ospa_order", name), name, "ospa_order");
  r.config.ospa_window = static_cast<int>(
      as_integer(field(c, "ospa_window", name), name, "ospa_window"));
  r.config.plane_only = as_bool(field(c, "plane_only", name), name, "plane_only");
  if (auto p = doc.find("pose"); p != doc.end() && !p->is_null()) {
    const std::string entity = name + ": pose";
    require_object(*p, entity);
    PoseMetrics pm;
    const json& ap = field(*p, "ap", entity);
    if (!ap.is_array()) invalid(entity, "ap must be an array");
    for (const auto& a : ap) {
      require_object(a, entity);
      pm.ap_thresholds_mm.push_back(
          as_number(field(a, "threshold_mm", entity), entity, "threshold_mm"));
      pm.ap.push_back(as_number(field(a, "ap", entity), entity, "ap"));
    }
    pm.recall_at_mm =
        as_number(field(*p, "recall_at_mm", entity), entity, "recall_at_mm");
    pm.recall = as_number(field(*p, "recall", entity), entity, "recall");
    const json& mp = field(*p, "mpjpe_mm", entity);
    if (!mp.is_null()) pm.mpjpe_mm = as_number(mp, entity, "mpjpe_mm");
    pm.gt_poses = as_integer(field(*p, "gt_poses", entity), entity, "gt_poses");
    pm.pred_poses =
        as_integer(field(*p, "pred_poses", entity), entity, "pred_poses");
    r.pose = std::move(pm);
  }
  return r;
}

MetricReport load_report(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_report(in, path.string());
}

// ---------------------------------------------------------------------------
// Scene bundle

void validate(const SceneBundle& scene) {
  std::set<CameraId> ids;
  for (const auto& c : scene.cameras) ids.insert(c.id());
  FrameIndex previous = std::numeric_limits<FrameIndex>::min();
  bool first = true;
  for (const auto& f : scene.annotations) {
    if (!first && f.frame <= previous) {
      throw ValidationError("annotations", "frames are not strictly ascending");
    }
    first = false;
    previous = f.frame;
    for (const auto& [object, cams] : f.objects) {
      for (const auto& [camera, obs] : cams) {
        if (!ids.count(camera)) {
          throw ValidationError(
              "annotation (frame " + std::to_string(f.frame) + ", object " +
                  std::to_string(object) + ")",
              "unknown camera_id " + std::to_string(camera));
        }
        if (scene.skeleton && obs.keypoints &&
            obs.keypoints->rows() != scene.skeleton->size()) {
          throw ValidationError(
              "annotation (frame " + std::to_string(f.frame) + ", object " +
                  std::to_string(object) + ", camera " +
                  std::to_string(camera) + ")",
              "has " + std::to_string(obs.keypoints->rows()) +
                  " keypoints, skeleton '" + scene.skeleton->name + "' has " +
                  std::to_string(scene.skeleton->size()));
        }
      }
    }
  }
}

SceneBundle load_scene(const ScenePaths& paths, Units units) {
  SceneBundle scene;
  scene.cameras = load_calibration(paths.calibration, units);
  scene.annotations = load_annotations(paths.annotations);
  if (paths.gt_tracks) scene.gt_tracks = load_tracks(*paths.gt_tracks, units);
  if (paths.skeleton) scene.skeleton = load_skeleton(*paths.skeleton);
  validate(scene);
  return scene;
}

}  // namespace mvfuse::io
