#pragma once

#include <Eigen/Dense>

#include "mvfuse/filter.hpp"

namespace mvfuse {

// Filter and initialization settings for annotation fusion. Noise defaults
// are near zero because the inputs are ground-truth annotations; exact zeros
// would make the innovation covariance singular.
struct TrackerConfig {
  double dt = 0.1;  // seconds per frame index
  UtParams ut;

  double q_pos = 1e-6;       // white-acceleration intensity, (m/s^2)^2 s
  double q_shape = 1e-6;     // log half-axis random-walk variance per step
  double r_bbox = 1e-4;      // px^2, per box corner coordinate
  double r_keypoint = 1.0;   // px^2, per keypoint coordinate

  // Birth prior for a standing person.
  Eigen::Vector3d default_half_axes{0.3, 0.3, 0.9};
  double init_pos_var = 0.25;
  double init_vel_var = 1.0;
  double init_log_shape_var = 0.05;

  double keypoint_pos_var = 0.04;
  double keypoint_vel_var = 1.0;
  // A 2D keypoint participates when its visibility flag exceeds this value.
  double visibility_threshold = 0.0;
};

// Metric settings. window = 0 means the whole sequence.
struct EvalConfig {
  double threshold = 1.0;   // meters, CLEAR MOT and IDF1 gate
  double ospa_cutoff = 1.0; // meters
  double ospa_order = 1.0;
  int ospa_window = 0;
  bool plane_only = false;  // drop z on both sides before matching
};

struct RunConfig {
  TrackerConfig tracker;
  EvalConfig eval;
};

}  // namespace mvfuse
