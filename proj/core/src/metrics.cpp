#include "mvfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "mvfuse/assignment.hpp"
#include "mvfuse/error.hpp"

namespace mvfuse {

namespace {

using FrameObjects = std::vector<std::pair<ObjectId, const TrackEntry*>>;

// frame -> objects present, for both sets over the union of frames.
std::map<FrameIndex, FrameObjects> by_frame(const TrackSet& set) {
  std::map<FrameIndex, FrameObjects> out;
  for (const auto& [id, track] : set) {
    for (const auto& e : track.entries) out[e.frame].emplace_back(id, &e);
  }
  return out;
}

long long sample_count(const TrackSet& set) {
  long long n = 0;
  for (const auto& [id, t] : set) n += static_cast<long long>(t.entries.size());
  return n;
}

const FrameObjects& objects_at(const std::map<FrameIndex, FrameObjects>& m,
                               FrameIndex f) {
  static const FrameObjects kEmpty;
  auto it = m.find(f);
  return it == m.end() ? kEmpty : it->second;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw ValidationError(what, "must be positive");
  }
}

}  // namespace

ClearMotResult clear_mot(const TrackSet& pred, const TrackSet& gt,
                         double threshold) {
  require_positive(threshold, "threshold");
  ClearMotResult r;
  r.gt_count = sample_count(gt);
  if (r.gt_count == 0) {
    throw EmptyGroundTruth("ground truth has no samples; MOTA is undefined");
  }

  const auto gt_frames = by_frame(gt);
  const auto pred_frames = by_frame(pred);
  std::map<ObjectId, ObjectId> last_match;  // gt id -> pred id
  double total_distance = 0.0;

  for (FrameIndex f : frame_union(pred, gt)) {
    const FrameObjects& g = objects_at(gt_frames, f);
    const FrameObjects& h = objects_at(pred_frames, f);
    std::vector<int> g_match(g.size(), -1);
    std::vector<char> h_used(h.size(), 0);

    // Keep correspondences that are still inside the gate.
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto lm = last_match.find(g[i].first);
      if (lm == last_match.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j].first != lm->second || h_used[j]) continue;
        const double d =
            (g[i].second->position - h[j].second->position).norm();
        if (d <= threshold) {
          g_match[i] = static_cast<int>(j);
          h_used[j] = 1;
          total_distance += d;
        }
        break;
      }
    }

    std::vector<std::size_t> free_g, free_h;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g_match[i] < 0) free_g.push_back(i);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_used[j]) free_h.push_back(j);
    }
    if (!free_g.empty() && !free_h.empty()) {
      // Gated pairs cost more than any feasible full matching, so the
      // solver maximizes the number of in-gate matches first.
      const double blocked =
          threshold * static_cast<double>(free_g.size() + free_h.size() + 1);
      Eigen::MatrixXd cost(free_g.size(), free_h.size());
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        for (std::size_t b = 0; b < free_h.size(); ++b) {
          const double d = (g[free_g[a]].second->position -
                            h[free_h[b]].second->position)
                               .norm();
          cost(a, b) = d <= threshold ? d : blocked;
        }
      }
      const std::vector<int> assign = solve_assignment(cost);
      for (std::size_t a = 0; a < assign.size(); ++a) {
        if (assign[a] < 0 || cost(a, assign[a]) > threshold) continue;
        const std::size_t i = free_g[a];
        const std::size_t j = free_h[static_cast<std::size_t>(assign[a])];
        g_match[i] = static_cast<int>(j);
        h_used[j] = 1;
        total_distance += cost(a, assign[a]);
        auto lm = last_match.find(g[i].first);
        if (lm != last_match.end() && lm->second != h[j].first) ++r.ids;
        last_match[g[i].first] = h[j].first;
      }
    }

    for (int m : g_match) {
      if (m < 0) ++r.fn;
      else ++r.matches;
    }
    for (char used : h_used) {
      if (!used) ++r.fp;
    }
  }

  r.mota = (1.0 - static_cast<double>(r.fp + r.fn + r.ids) /
                      static_cast<double>(r.gt_count)) *
           100.0;
  r.motp = r.matches > 0 ? total_distance / static_cast<double>(r.matches)
                         : 0.0;
  return r;
}

IdentityResult identity_metrics(const TrackSet& pred, const TrackSet& gt,
                                double threshold) {
  require_positive(threshold, "threshold");
  const long long n_gt = sample_count(gt);
  const long long n_pred = sample_count(pred);
  if (n_gt == 0) {
    throw EmptyGroundTruth("ground truth has no samples; IDF1 is undefined");
  }

  IdentityResult r;
  if (!pred.empty()) {
    Eigen::MatrixXd cost(gt.size(), pred.size());
    Eigen::Index gi = 0;
    for (const auto& [gid, gtrack] : gt) {
      Eigen::Index pi = 0;
      for (const auto& [pid, ptrack] : pred) {
        long long overlap = 0;
        for (const auto& e : gtrack.entries) {
          const TrackEntry* p = ptrack.at(e.frame);
          if (p && (p->position - e.position).norm() <= threshold) ++overlap;
        }
        cost(gi, pi) = -static_cast<double>(overlap);
        ++pi;
      }
      ++gi;
    }
    const std::vector<int> assign = solve_assignment(cost);
    for (std::size_t a = 0; a < assign.size(); ++a) {
      if (assign[a] >= 0) {
        r.idtp += static_cast<long long>(
            -cost(static_cast<Eigen::Index>(a), assign[a]));
      }
    }
  }
  r.idfn = n_gt - r.idtp;
  r.idfp = n_pred - r.idtp;
  r.idf1 = 200.0 * static_cast<double>(r.idtp) /
           static_cast<double>(n_gt + n_pred);
  return r;
}

double idf1(const TrackSet& pred, const TrackSet& gt, double threshold) {
  return identity_metrics(pred, gt, threshold).idf1;
}

namespace {

double ospa2_window(const TrackSet& pred, const TrackSet& gt, double cutoff,
                    double order, FrameIndex first, FrameIndex last) {
  auto active = [&](const TrackSet& set) {
    std::vector<const Track*> out;
    for (const auto& [id, t] : set) {
      for (const auto& e : t.entries) {
        if (e.frame >= first && e.frame <= last) {
          out.push_back(&t);
          break;
        }
      }
    }
    return out;
  };
  const auto x = active(pred);
  const auto y = active(gt);
  const std::size_t m = x.size();
  const std::size_t n = y.size();
  if (m == 0 && n == 0) return 0.0;
  if (m == 0 || n == 0) return cutoff;

  auto base = [&](const Track& a, const Track& b) {
    std::size_t ia = 0, ib = 0;
    double sum = 0.0;
    long long frames = 0;
    const auto& ea = a.entries;
    const auto& eb = b.entries;
    while (ia < ea.size() && ea[ia].frame < first) ++ia;
    while (ib < eb.size() && eb[ib].frame < first) ++ib;
    while (true) {
      const bool has_a = ia < ea.size() && ea[ia].frame <= last;
      const bool has_b = ib < eb.size() && eb[ib].frame <= last;
      if (!has_a && !has_b) break;
      if (has_a && has_b && ea[ia].frame == eb[ib].frame) {
        sum += std::min(cutoff,
                        (ea[ia].position - eb[ib].position).norm());
        ++ia;
        ++ib;
      } else if (has_a && (!has_b || ea[ia].frame < eb[ib].frame)) {
        sum += cutoff;
        ++ia;
      } else {
        sum += cutoff;
        ++ib;
      }
      ++frames;
    }
    return frames > 0 ? sum / static_cast<double>(frames) : 0.0;
  };

  Eigen::MatrixXd cost(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost(i, j) = std::pow(base(*x[i], *y[j]), order);
    }
  }
  const double matched = assignment_cost(cost, solve_assignment(cost));
  const double unmatched =
      std::pow(cutoff, order) *
      static_cast<double>(std::max(m, n) - std::min(m, n));
  const double value = std::pow(
      (matched + unmatched) / static_cast<double>(std::max(m, n)),
      1.0 / order);
  return std::clamp(value, 0.0, cutoff);
}

}  // namespace

double ospa2(const TrackSet& pred, const TrackSet& gt, double cutoff,
             double order, int window) {
  require_positive(cutoff, "ospa cutoff");
  if (!(order >= 1.0)) {
    throw ValidationError("ospa order", "must be >= 1");
  }
  if (window < 0) throw ValidationError("ospa window", "must be >= 0");
  const std::vector<FrameIndex> frames = frame_union(pred, gt);
  if (frames.empty()) return 0.0;
  if (window == 0) {
    return ospa2_window(pred, gt, cutoff, order, frames.front(),
                        frames.back());
  }
  double sum = 0.0;
  for (FrameIndex f : frames) {
    sum += ospa2_window(pred, gt, cutoff, order, f - window + 1, f);
  }
  return sum / static_cast<double>(frames.size());
}

PoseMetrics pose_metrics(const TrackSet& pred, const TrackSet& gt,
                         const std::vector<double>& ap_thresholds_mm,
                         double recall_at_mm) {
  PoseMetrics r;
  r.ap_thresholds_mm = ap_thresholds_mm;
  r.recall_at_mm = recall_at_mm;

  Eigen::Index joints = -1;
  auto check = [&](const TrackEntry& e) {
    if (e.keypoints.rows() == 0) return false;
    if (joints < 0) joints = e.keypoints.rows();
    if (e.keypoints.rows() != joints) {
      throw SkeletonMismatch("poses with " + std::to_string(joints) + " and " +
                             std::to_string(e.keypoints.rows()) + " joints");
    }
    return true;
  };

  std::map<FrameIndex, std::vector<const TrackEntry*>> g_frames, p_frames;
  for (const auto& [id, t] : gt) {
    for (const auto& e : t.entries) {
      if (check(e)) g_frames[e.frame].push_back(&e);
    }
  }
  for (const auto& [id, t] : pred) {
    for (const auto& e : t.entries) {
      if (check(e)) p_frames[e.frame].push_back(&e);
    }
  }

  std::vector<double> matched_errors;
  for (const auto& [f, gs] : g_frames) {
    r.gt_poses += static_cast<long long>(gs.size());
    auto it = p_frames.find(f);
    if (it == p_frames.end()) continue;
    const auto& ps = it->second;
    Eigen::MatrixXd cost(gs.size(), ps.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      for (std::size_t j = 0; j < ps.size(); ++j) {
        cost(i, j) =
            1000.0 *
            (gs[i]->keypoints - ps[j]->keypoints).rowwise().norm().mean();
      }
    }
    const std::vector<int> assign = solve_assignment(cost);
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (assign[i] >= 0) {
        matched_errors.push_back(cost(static_cast<Eigen::Index>(i), assign[i]));
      }
    }
  }
  for (const auto& [f, ps] : p_frames) {
    r.pred_poses += static_cast<long long>(ps.size());
  }

  auto true_positives = [&](double d) {
    return std::count_if(matched_errors.begin(), matched_errors.end(),
                         [d](double e) { return e <= d; });
  };
  for (double d : ap_thresholds_mm) {
    const double tp = static_cast<double>(true_positives(d));
    const double precision =
        r.pred_poses > 0 ? tp / static_cast<double>(r.pred_poses) : 0.0;
    const double recall =
        r.gt_poses > 0 ? tp / static_cast<double>(r.gt_poses) : 0.0;
    r.ap.push_back(100.0 * precision * recall);
  }
  const auto within = true_positives(recall_at_mm);
  r.recall = r.gt_poses > 0 ? 100.0 * static_cast<double>(within) /
                                  static_cast<double>(r.gt_poses)
                            : 0.0;
  if (within > 0) {
    double sum = 0.0;
    for (double e : matched_errors) {
      if (e <= recall_at_mm) sum += e;
    }
    r.mpjpe_mm = sum / static_cast<double>(within);
  }
  return r;
}

TrackSet drop_z(TrackSet tracks) {
  for (auto& [id, t] : tracks) {
    for (auto& e : t.entries) e.position.z() = 0.0;
  }
  return tracks;
}

bool has_keypoints(const TrackSet& tracks) {
  for (const auto& [id, t] : tracks) {
    for (const auto& e : t.entries) {
      if (e.keypoints.rows() > 0) return true;
    }
  }
  return false;
}

MetricReport evaluate(const TrackSet& pred, const TrackSet& gt,
                      const EvalConfig& config) {
  MetricReport report;
  report.config = config;
  const TrackSet p = config.plane_only ? drop_z(pred) : pred;
  const TrackSet g = config.plane_only ? drop_z(gt) : gt;
  report.clear = clear_mot(p, g, config.threshold);
  report.identity = identity_metrics(p, g, config.threshold);
  report.ospa2 = ospa2(p, g, config.ospa_cutoff, config.ospa_order,
                       config.ospa_window);
  if (has_keypoints(pred) && has_keypoints(gt)) {
    report.pose = pose_metrics(pred, gt);
  }
  return report;
}

std::string format_report_table(const MetricReport& report,
                                const std::string& sequence) {
  std::vector<std::string> head{"Sequence", "FP", "FN", "IDs",
                                "MOTA", "IDF1", "OSPA2"};
  std::vector<std::string> row;
  auto fixed = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  row.push_back(sequence);
  row.push_back(std::to_string(report.clear.fp));
  row.push_back(std::to_string(report.clear.fn));
  row.push_back(std::to_string(report.clear.ids));
  row.push_back(fixed(report.clear.mota, 1));
  row.push_back(fixed(report.identity.idf1, 1));
  row.push_back(fixed(report.ospa2, 2));
  if (report.pose) {
    const PoseMetrics& pm = *report.pose;
    for (std::size_t i = 0; i < pm.ap.size(); ++i) {
      head.push_back("AP" + fixed(pm.ap_thresholds_mm[i], 0));
      row.push_back(fixed(pm.ap[i], 1));
    }
    head.push_back("Recall@" + fixed(pm.recall_at_mm, 0));
    row.push_back(fixed(pm.recall, 1));
    head.push_back("MPJPE[mm]");
    row.push_back(pm.mpjpe_mm ? fixed(*pm.mpjpe_mm, 1) : "-");
  }

  std::ostringstream out;
  for (const auto* line : {&head, &row}) {
    for (std::size_t i = 0; i < line->size(); ++i) {
      const std::size_t width = std::max(head[i].size(), row[i].size());
      if (i == 0) {
        out << std::left << std::setw(static_cast<int>(width)) << (*line)[i];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width))
            << (*line)[i];
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mvfuse
