#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvfuse/config.hpp"
#include "mvfuse/track.hpp"

namespace mvfuse {

struct ClearMotResult {
  long long fp = 0;
  long long fn = 0;
  long long ids = 0;
  long long matches = 0;
  long long gt_count = 0;  // sum over frames of ground-truth objects
  double mota = 0.0;       // percent
  double motp = 0.0;       // mean matched distance, meters
};

// CLEAR MOT with per-frame Hungarian matching on Euclidean distance, gated
// at `threshold`. Correspondences from earlier frames are kept while they
// stay within the gate; a ground-truth object matched to a different
// prediction than last time counts one identity switch.
// Throws EmptyGroundTruth when the reference has no samples.
ClearMotResult clear_mot(const TrackSet& pred, const TrackSet& gt,
                         double threshold);

struct IdentityResult {
  long long idtp = 0;
  long long idfp = 0;
  long long idfn = 0;
  double idf1 = 0.0;  // percent
};

// Global one-to-one identity matching that maximizes the number of frames
// where a matched pair is within `threshold`.
// Throws EmptyGroundTruth.
IdentityResult identity_metrics(const TrackSet& pred, const TrackSet& gt,
                                double threshold);

double idf1(const TrackSet& pred, const TrackSet& gt, double threshold);

// OSPA over tracks. The base distance between two tracks is the per-frame
// distance min(cutoff, |x - y|) (cutoff when only one exists) averaged over
// the frames where either exists inside the window; tracks are then matched
// by an order-`order` OSPA with the same cutoff. window = 0 evaluates the
// whole sequence once; window = w > 0 averages the value over every window
// of w frames ending at a frame of the sequence.
double ospa2(const TrackSet& pred, const TrackSet& gt, double cutoff,
             double order = 1.0, int window = 0);

struct PoseMetrics {
  std::vector<double> ap_thresholds_mm;
  std::vector<double> ap;  // percent, one per threshold
  double recall_at_mm = 500.0;
  double recall = 0.0;     // percent
  std::optional<double> mpjpe_mm;  // empty when nothing matched
  long long gt_poses = 0;
  long long pred_poses = 0;
};

// Per-frame Hungarian matching of poses by mean joint distance. A matched
// pose is a true positive at d when its MPJPE <= d. All predictions carry
// the same confidence, so AP@d is precision * recall at d. MPJPE averages
// the matched poses within recall_at_mm. Positions are meters; thresholds
// millimeters. Throws SkeletonMismatch.
PoseMetrics pose_metrics(const TrackSet& pred, const TrackSet& gt,
                         const std::vector<double>& ap_thresholds_mm =
                             {25.0, 50.0, 100.0, 150.0},
                         double recall_at_mm = 500.0);

// Copy with z set to zero on every position.
TrackSet drop_z(TrackSet tracks);

bool has_keypoints(const TrackSet& tracks);

struct MetricReport {
  ClearMotResult clear;
  IdentityResult identity;
  double ospa2 = 0.0;
  EvalConfig config;
  std::optional<PoseMetrics> pose;
};

// All metrics; pose metrics when both sides carry keypoints.
MetricReport evaluate(const TrackSet& pred, const TrackSet& gt,
                      const EvalConfig& config);

// Aligned text table, columns FP FN IDs MOTA IDF1 OSPA2 (+ pose columns).
std::string format_report_table(const MetricReport& report,
                                const std::string& sequence = "sequence");

}  // namespace mvfuse
