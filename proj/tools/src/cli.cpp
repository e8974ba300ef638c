#include "mvfuse_cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mvfuse/error.hpp"
#include "mvfuse/io.hpp"
#include "mvfuse/metrics.hpp"
#include "mvfuse/pose.hpp"
#include "mvfuse/synth.hpp"
#include "mvfuse/tracker.hpp"

namespace mvfuse::cli {
namespace {

namespace fs = std::filesystem;

// Bad invocation or unusable input; exits with kUsageError.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { kQuiet = 0, kError, kWarn, kInfo, kDebug };

LogLevel log_level_from_env() {
  const char* raw = std::getenv("MVFUSE_LOG");
  if (!raw) return LogLevel::kInfo;
  const std::string v(raw);
  if (v == "quiet" || v == "off") return LogLevel::kQuiet;
  if (v == "error") return LogLevel::kError;
  if (v == "warn" || v == "warning") return LogLevel::kWarn;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level_from_env()) {}

  void error(const std::string& m) { emit(LogLevel::kError, "error", m); }
  void warn(const std::string& m) { emit(LogLevel::kWarn, "warning", m); }
  void info(const std::string& m) { emit(LogLevel::kInfo, "info", m); }
  void debug(const std::string& m) { emit(LogLevel::kDebug, "debug", m); }

 private:
  void emit(LogLevel at, const char* tag, const std::string& m) {
    if (level_ >= at) err_ << "mvfuse: " << tag << ": " << m << '\n';
  }

  std::ostream& err_;
  LogLevel level_;
};

void require_file(const fs::path& path, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw UsageError(std::string(what) + " file not found: " + path.string());
  }
}

std::string format_seconds(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << s << " s";
  return o.str();
}

std::optional<CanonicalPose> resolve_skeleton(const std::string& arg) {
  if (arg.empty()) return std::nullopt;
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return io::load_skeleton(arg);
  if (arg == "coco17" || arg == "panoptic15") return builtin_skeleton(arg);
  throw UsageError("skeleton file not found: " + arg);
}

// ---------------------------------------------------------------------------
// annotate

struct AnnotateArgs {
  std::string calib;
  std::string annotations;
  std::string config;
  std::string out;
  std::string skeleton;
  std::string units = "m";
  unsigned workers = 0;
  double dt = 0, q_pos = 0, q_shape = 0, r_bbox = 0, r_keypoint = 0;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* q_pos_opt = nullptr;
  CLI::Option* q_shape_opt = nullptr;
  CLI::Option* r_bbox_opt = nullptr;
  CLI::Option* r_keypoint_opt = nullptr;
};

void add_annotate(CLI::App& app, AnnotateArgs& a) {
  auto* cmd = app.add_subcommand(
      "annotate",
      "Fuse 2D boxes and keypoints into 3D tracks.\n"
      "Parameter precedence: flags > --config file > built-in defaults.");
  cmd->add_option("--calib", a.calib, "Calibration JSON")->required();
  cmd->add_option("--annotations", a.annotations, "Annotations JSON Lines")
      ->required();
  cmd->add_option("--config", a.config, "Run config JSON");
  cmd->add_option("--out", a.out, "Output tracks JSON Lines")->required();
  cmd->add_option("--skeleton", a.skeleton,
                  "Skeleton JSON, or coco17 / panoptic15");
  cmd->add_option("--units", a.units, "Length unit of calibration: m or mm")
      ->check(CLI::IsMember({"m", "mm"}));
  cmd->add_option("--workers", a.workers,
                  "Worker threads across objects (0 = all cores)");
  a.dt_opt = cmd->add_option("--dt", a.dt, "Frame interval, seconds");
  a.q_pos_opt = cmd->add_option("--q-pos", a.q_pos, "Position process noise");
  a.q_shape_opt =
      cmd->add_option("--q-shape", a.q_shape, "Log-shape process noise");
  a.r_bbox_opt =
      cmd->add_option("--r-bbox", a.r_bbox, "Box corner noise variance, px^2");
  a.r_keypoint_opt = cmd->add_option("--r-keypoint", a.r_keypoint,
                                     "Keypoint noise variance, px^2");
}

int run_annotate(const AnnotateArgs& a, std::ostream& out, Log& log) {
  (void)out;
  const auto start = std::chrono::steady_clock::now();
  require_file(a.calib, "calibration");
  require_file(a.annotations, "annotations");
  RunConfig config;
  if (!a.config.empty()) {
    require_file(a.config, "config");
    config = io::load_config(a.config);
  }
  TrackerConfig& t = config.tracker;
  if (*a.dt_opt) t.dt = a.dt;
  if (*a.q_pos_opt) t.q_pos = a.q_pos;
  if (*a.q_shape_opt) t.q_shape = a.q_shape;
  if (*a.r_bbox_opt) t.r_bbox = a.r_bbox;
  if (*a.r_keypoint_opt) t.r_keypoint = a.r_keypoint;
  io::validate(config);

  io::ScenePaths paths{a.calib, a.annotations, std::nullopt, std::nullopt};
  SceneBundle scene = io::load_scene(paths, io::units_from_string(a.units));
  std::optional<CanonicalPose> skeleton = resolve_skeleton(a.skeleton);
  if (!skeleton) {
    for (const auto& f : scene.annotations) {
      for (const auto& [id, cams] : f.objects) {
        for (const auto& [cam, obs] : cams) {
          if (obs.keypoints && !skeleton) {
            skeleton = skeleton_for_joint_count(obs.keypoints->rows());
            log.debug("using built-in skeleton " + skeleton->name);
          }
        }
      }
    }
  }
  scene.skeleton = skeleton;
  io::validate(scene);

  const RunResult result =
      run_all(scene.annotations, scene.cameras, t, skeleton, a.workers);
  for (const auto& d : result.diagnostics) {
    std::ostringstream m;
    m << "object " << d.object_id << " frame " << d.frame;
    if (d.camera >= 0) m << " camera " << d.camera;
    if (d.joint >= 0) m << " joint " << d.joint;
    m << ": " << d.message;
    log.warn(m.str());
  }
  io::save_tracks(to_track_set(result.tracks), a.out);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  log.info("annotate: " + std::to_string(result.tracks.size()) +
           " objects, " + std::to_string(scene.annotations.size()) +
           " frames, " + format_seconds(seconds));
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  std::string config;
  std::string report;
  std::string format = "table";
  std::string units = "m";
  unsigned workers = 0;
  bool plane = false;
  double threshold = 0, ospa_cutoff = 0, ospa_order = 0;
  int ospa_window = 0;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* cutoff_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* window_opt = nullptr;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand(
      "evaluate",
      "Compare predicted tracks with reference tracks.\n"
      "Several --pred/--gt pairs are evaluated as separate sequences.\n"
      "Parameter precedence: flags > --config file > built-in defaults.");
  cmd->add_option("--pred", a.pred, "Predicted tracks JSON Lines")->required();
  cmd->add_option("--gt", a.gt, "Reference tracks JSON Lines")->required();
  cmd->add_option("--config", a.config, "Run config JSON (eval section)");
  a.threshold_opt =
      cmd->add_option("--threshold", a.threshold, "Match threshold, meters");
  a.cutoff_opt =
      cmd->add_option("--ospa-cutoff", a.ospa_cutoff, "OSPA cutoff, meters");
  a.order_opt = cmd->add_option("--ospa-order", a.ospa_order, "OSPA order");
  a.window_opt = cmd->add_option("--ospa-window", a.ospa_window,
                                 "OSPA window, frames (0 = whole sequence)");
  cmd->add_flag("--plane", a.plane, "Ignore z when matching");
  cmd->add_option("--report", a.report,
                  "Write JSON report here (a directory for several pairs)");
  cmd->add_option("--format", a.format, "Stdout format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  cmd->add_option("--units", a.units, "Length unit of both files: m or mm")
      ->check(CLI::IsMember({"m", "mm"}));
  cmd->add_option("--workers", a.workers,
                  "Worker threads across sequences (0 = all cores)");
}

std::vector<std::string> sequence_names(const std::vector<std::string>& pred) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::string name = fs::path(pred[i]).stem().string();
    if (name.empty() || used.count(name)) name += "_" + std::to_string(i + 1);
    used.insert(name);
    names.push_back(name);
  }
  return names;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out, Log& log) {
  if (a.pred.size() != a.gt.size()) {
    throw UsageError("--pred and --gt must be given the same number of times");
  }
  for (const auto& p : a.pred) require_file(p, "prediction");
  for (const auto& g : a.gt) require_file(g, "reference");
  RunConfig config;
  if (!a.config.empty()) {
    require_file(a.config, "config");
    config = io::load_config(a.config);
  }
  EvalConfig& e = config.eval;
  if (*a.threshold_opt) e.threshold = a.threshold;
  if (*a.cutoff_opt) e.ospa_cutoff = a.ospa_cutoff;
  if (*a.order_opt) e.ospa_order = a.ospa_order;
  if (*a.window_opt) e.ospa_window = a.ospa_window;
  if (a.plane) e.plane_only = true;
  io::validate(config);
  const io::Units units = io::units_from_string(a.units);

  // Load sequentially so parse errors are reported in argument order.
  std::vector<std::pair<TrackSet, TrackSet>> inputs;
  for (std::size_t i = 0; i < a.pred.size(); ++i) {
    inputs.emplace_back(io::load_tracks(a.pred[i], units),
                        io::load_tracks(a.gt[i], units));
  }

  std::vector<MetricReport> reports(inputs.size());
  unsigned workers = a.workers ? a.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, inputs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < inputs.size(); i = next++) {
        reports[i] = evaluate(inputs[i].first, inputs[i].second, e);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  const std::vector<std::string> names = sequence_names(a.pred);
  if (!a.report.empty()) {
    if (reports.size() == 1) {
      std::ofstream f(a.report, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot open '" + a.report + "' for writing");
      f << io::report_to_json(reports[0]);
    } else {
      fs::create_directories(a.report);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const fs::path p = fs::path(a.report) / (names[i] + ".json");
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
        f << io::report_to_json(reports[i]);
      }
    }
    log.debug("report written to " + a.report);
  }

  if (a.format == "json") {
    if (reports.size() == 1) {
      out << io::report_to_json(reports[0]);
    } else {
      out << "[\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        out << io::report_to_json(reports[i]) << (i + 1 < reports.size() ? "," : "")
            << '\n';
      }
      out << "]\n";
    }
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      out << format_report_table(reports[i], names[i]);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string spec;
  std::string out;
  bool force = false;
  std::uint64_t seed = 0;
  int objects = 0, cameras = 0, frames = 0;
  double noise = 0;
  std::string motion, skeleton;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* objects_opt = nullptr;
  CLI::Option* cameras_opt = nullptr;
  CLI::Option* frames_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
  CLI::Option* motion_opt = nullptr;
  CLI::Option* skeleton_opt = nullptr;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand(
      "synth",
      "Generate a synthetic scene with exact annotations and ground truth.\n"
      "Parameter precedence: flags > --spec file > built-in defaults.");
  cmd->add_option("--spec", a.spec, "Scene spec JSON");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_flag("--force", a.force, "Write into a non-empty directory");
  a.seed_opt = cmd->add_option("--seed", a.seed, "Random seed");
  a.objects_opt = cmd->add_option("--objects", a.objects, "Number of objects");
  a.cameras_opt = cmd->add_option("--cameras", a.cameras, "Number of cameras");
  a.frames_opt = cmd->add_option("--frames", a.frames, "Number of frames");
  a.noise_opt =
      cmd->add_option("--noise", a.noise, "Pixel noise standard deviation");
  a.motion_opt = cmd->add_option("--motion", a.motion,
                                 "static, constant-velocity or waypoint");
  a.skeleton_opt =
      cmd->add_option("--skeleton", a.skeleton, "coco17 or panoptic15");
}

int run_synth(const SynthArgs& a, std::ostream& out, Log& log) {
  SceneSpec spec;
  if (!a.spec.empty()) {
    require_file(a.spec, "spec");
    spec = io::load_scene_spec(a.spec);
  }
  if (*a.seed_opt) spec.seed = a.seed;
  if (*a.objects_opt) spec.num_objects = a.objects;
  if (*a.cameras_opt) spec.num_cameras = a.cameras;
  if (*a.frames_opt) spec.frames = a.frames;
  if (*a.noise_opt) spec.pixel_noise_std = a.noise;
  if (*a.motion_opt) spec.motion = motion_kind_from_string(a.motion);
  if (*a.skeleton_opt) spec.skeleton = a.skeleton;
  validate(spec);

  const fs::path dir(a.out);
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      throw UsageError("output path exists and is not a directory: " + a.out);
    }
    if (!fs::is_empty(dir, ec) && !a.force) {
      throw UsageError("output directory is not empty (use --force): " + a.out);
    }
  }
  fs::create_directories(dir);

  const SyntheticScene scene = generate(spec);
  io::save_calibration(scene.bundle.cameras, dir / "calibration.json");
  io::save_annotations(scene.bundle.annotations, dir / "annotations.jsonl");
  io::save_tracks(scene.truth, dir / "gt_tracks.jsonl");
  auto write_text = [](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing '" + p.string() + "'");
  };
  write_text(dir / "spec.json", io::scene_spec_to_json(spec));
  RunConfig config;
  config.tracker.dt = spec.dt();
  write_text(dir / "config.json", io::config_to_json(config));
  if (scene.bundle.skeleton) {
    std::ostringstream s;
    io::write_skeleton(s, *scene.bundle.skeleton);
    write_text(dir / "skeleton.json", s.str());
  }
  out << dir.string() << '\n';
  log.info("synth: " + std::to_string(spec.num_objects) + " objects, " +
           std::to_string(spec.num_cameras) + " cameras, " +
           std::to_string(spec.frames) + " frames");
  return kOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string input;
  std::string format = "table";
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand("report", "Print a saved JSON report.");
  cmd->add_option("--input", a.input, "Report JSON")->required();
  cmd->add_option("--format", a.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
}

int run_report(const ReportArgs& a, std::ostream& out) {
  require_file(a.input, "report");
  const MetricReport report = io::load_report(a.input);
  if (a.format == "json") {
    out << io::report_to_json(report);
  } else {
    out << format_report_table(report,
                               fs::path(a.input).stem().string());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Log log(err);
  CLI::App app{"Multi-camera 3D track annotation and evaluation", "mvfuse"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mvfuse 0.1.0");

  AnnotateArgs annotate;
  EvaluateArgs evaluate_args;
  SynthArgs synth;
  ReportArgs report;
  add_annotate(app, annotate);
  add_evaluate(app, evaluate_args);
  add_synth(app, synth);
  add_report(app, report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "annotate") return run_annotate(annotate, out, log);
    if (name == "evaluate") return run_evaluate(evaluate_args, out, log);
    if (name == "synth") return run_synth(synth, out, log);
    if (name == "report") return run_report(report, out);
    return kUsageError;
  } catch (const UsageError& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const ParseError& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const ValidationError& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const InvalidSpec& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const UnknownSkeleton& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const SkeletonMismatch& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const EmptyGroundTruth& e) {
    log.error(e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kRuntimeError;
  }
}

}  // namespace mvfuse::cli
