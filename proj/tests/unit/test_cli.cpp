#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mvfuse/io.hpp"
#include "mvfuse/metrics.hpp"
#include "mvfuse_cli/cli.hpp"

namespace mvfuse {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("mvfuse_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth(const std::string& name, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"synth", "--out", path(name), "--frames", "30",
                                  "--objects", "3", "--cameras", "3"};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

TEST_F(CliTest, SynthAnnotateEvaluate) {
  const std::string scene = synth("scene", {"--skeleton", "coco17", "--motion",
                                            "constant-velocity"});
  for (const char* f : {"calibration.json", "annotations.jsonl", "gt_tracks.jsonl",
                        "spec.json", "config.json", "skeleton.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(scene) / f)) << f;
  }
  Result r = run({"annotate", "--calib", scene + "/calibration.json",
                  "--annotations", scene + "/annotations.jsonl", "--config",
                  scene + "/config.json", "--out", path("pred.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("annotate: 3 objects, 30 frames"), std::string::npos) << r.err;

  r = run({"evaluate", "--pred", path("pred.jsonl"), "--gt",
           scene + "/gt_tracks.jsonl", "--format", "json", "--report",
           path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["fp"], 0);
  EXPECT_EQ(j["fn"], 0);
  EXPECT_EQ(j["ids"], 0);
  EXPECT_TRUE(j.contains("pose"));
  EXPECT_EQ(slurp(path("report.json")), r.out);

  r = run({"report", "--input", path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MOTA"), std::string::npos);
  EXPECT_NE(r.out.find("report"), std::string::npos);
}

TEST_F(CliTest, MissingCalibrationIsUsageError) {
  const std::string scene = synth("scene");
  const std::string missing = path("nope.json");
  const Result r = run({"annotate", "--calib", missing, "--annotations",
                        scene + "/annotations.jsonl", "--out", path("p.jsonl")});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find(missing), std::string::npos);
  EXPECT_FALSE(fs::exists(path("p.jsonl")));
}

TEST_F(CliTest, MalformedInputExitsTwo) {
  const std::string scene = synth("scene");
  std::ofstream(path("bad.jsonl")) << "{\"frame\": 0,\n";
  const Result r = run({"annotate", "--calib", scene + "/calibration.json",
                        "--annotations", path("bad.jsonl"), "--out", path("p.jsonl")});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("bad.jsonl"), std::string::npos);
}

TEST_F(CliTest, UnitsMillimeters) {
  const std::string scene = synth("scene");
  auto cams = io::load_calibration(scene + "/calibration.json");
  std::vector<CameraModel> mm;
  for (const auto& c : cams) mm.push_back(c.scaled(1000.0));
  io::save_calibration(mm, path("calib_mm.json"));
  ASSERT_EQ(run({"annotate", "--calib", scene + "/calibration.json",
                 "--annotations", scene + "/annotations.jsonl", "--out",
                 path("m.jsonl")}).code, 0);
  const Result r = run({"annotate", "--calib", path("calib_mm.json"), "--units", "mm",
                        "--annotations", scene + "/annotations.jsonl", "--out",
                        path("mm.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const TrackSet a = io::load_tracks(path("m.jsonl"));
  const TrackSet b = io::load_tracks(path("mm.jsonl"));
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [id, t] : a) {
    ASSERT_EQ(t.entries.size(), b.at(id).entries.size());
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
      EXPECT_LT((t.entries[k].position - b.at(id).entries[k].position).norm(), 1e-6);
    }
  }
}

TEST_F(CliTest, EvaluateIdentity) {
  const std::string scene = synth("scene");
  const std::string gt = scene + "/gt_tracks.jsonl";
  Result r = run({"evaluate", "--pred", gt, "--gt", gt, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["mota"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["idf1"].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(j["ospa2"].get<double>(), 0.0);

  r = run({"evaluate", "--pred", gt, "--gt", gt, "--format", "json", "--plane",
           "--threshold", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["plane_only"], true);
  EXPECT_DOUBLE_EQ(j["config"]["threshold"].get<double>(), 0.5);
}

TEST_F(CliTest, PlaneIgnoresHeight) {
  const std::string scene = synth("scene");
  TrackSet lifted = io::load_tracks(scene + "/gt_tracks.jsonl");
  for (auto& [id, t] : lifted) {
    for (auto& e : t.entries) e.position.z() += 2.0;
  }
  io::save_tracks(lifted, path("lifted.jsonl"));
  auto mota = [&](bool plane) {
    std::vector<std::string> args{"evaluate", "--pred", path("lifted.jsonl"), "--gt",
                                  scene + "/gt_tracks.jsonl", "--format", "json"};
    if (plane) args.push_back("--plane");
    const Result r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out)["mota"].get<double>();
  };
  EXPECT_DOUBLE_EQ(mota(true), 100.0);
  EXPECT_LT(mota(false), 0.0);
}

TEST_F(CliTest, MultipleSequencesWriteReportDirectory) {
  const std::string a = synth("a");
  const std::string b = synth("b", {"--seed", "5"});
  const Result r = run({"evaluate", "--pred", a + "/gt_tracks.jsonl", "--gt",
                        a + "/gt_tracks.jsonl", "--pred", b + "/gt_tracks.jsonl",
                        "--gt", b + "/gt_tracks.jsonl", "--report", path("reports")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("reports") + "/gt_tracks.json"));
  EXPECT_TRUE(fs::exists(path("reports") + "/gt_tracks_2.json"));
}

TEST_F(CliTest, SynthRefusesNonEmptyDirectory) {
  synth("scene");
  Result r = run({"synth", "--out", path("scene"), "--frames", "5"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("--force"), std::string::npos);
  r = run({"synth", "--out", path("scene"), "--frames", "5", "--force"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, SynthSeedReproducible) {
  synth("a", {"--seed", "9", "--noise", "1.0"});
  synth("b", {"--seed", "9", "--noise", "1.0"});
  synth("c", {"--seed", "10", "--noise", "1.0"});
  for (const char* f : {"calibration.json", "annotations.jsonl", "gt_tracks.jsonl"}) {
    EXPECT_EQ(slurp(path("a") + "/" + f), slurp(path("b") + "/" + f)) << f;
  }
  EXPECT_NE(slurp(path("a") + "/annotations.jsonl"),
            slurp(path("c") + "/annotations.jsonl"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(run({"annotate", "--calib", "x"}).code, cli::kUsageError);
  EXPECT_EQ(run({"synth", "--out", path("s"), "--motion", "teleport"}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"evaluate", "--pred", "a", "--gt", "b", "--format", "xml"}).code,
            cli::kUsageError);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("annotate"), std::string::npos);
}

TEST_F(CliTest, LogLevelQuiet) {
  const std::string scene = synth("scene");
  ::setenv("MVFUSE_LOG", "quiet", 1);
  const Result r = run({"annotate", "--calib", scene + "/calibration.json",
                        "--annotations", scene + "/annotations.jsonl", "--out",
                        path("p.jsonl")});
  ::unsetenv("MVFUSE_LOG");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.err.empty()) << r.err;
}

}  // namespace
}  // namespace mvfuse
