#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mvfuse {

// Gaussian belief N(mean, covariance).
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  Eigen::Index dim() const { return mean.size(); }
};

// Scaled unscented transform parameters. lambda = alpha^2 (d + kappa) - d.
struct UtParams {
  double alpha = 1e-1;
  double beta = 2.0;
  double kappa = 0.0;

  double lambda(Eigen::Index d) const {
    return alpha * alpha * (static_cast<double>(d) + kappa) -
           static_cast<double>(d);
  }
};

// 2d+1 sigma points, one per row.
struct SigmaSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd cov_weights;
  UtParams params;
  double lambda = 0.0;

  Eigen::Index size() const { return points.rows(); }
};

// Which state vector a motion model acts on. Both layouts interleave
// position and velocity per axis: [x, vx, y, vy, z, vz, ...].
enum class StateLayout {
  kEllipsoid,  // d = 9: kinematics + log half-axes (random walk)
  kKeypoint,   // d = 6: kinematics only
};

Eigen::Index state_dim(StateLayout layout);

struct MotionModel {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd process_noise;
  double dt = 1.0;
};

// State indices for the interleaved layout.
namespace state_index {
inline constexpr int kX = 0, kVx = 1, kY = 2, kVy = 3, kZ = 4, kVz = 5;
inline constexpr int kLogA = 6, kLogB = 7, kLogC = 8;
}  // namespace state_index

// Measurement function used by ukf_update. May throw any mvfuse::Error for
// states it cannot map (e.g. a sigma point behind a camera).
using MeasurementFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Matrix square root L with L L^T = m, from Cholesky. On failure adds
// jitter starting at 1e-12 * trace/d and growing tenfold up to
// 1e-6 * trace/d. Throws CholeskyFailure.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m);

SigmaSet sigma_points(const GaussianBelief& b, const UtParams& params = {});

// Weighted mean and covariance of transformed sigma points (one per row).
GaussianBelief unscented_moments(const Eigen::MatrixXd& transformed,
                                 const SigmaSet& sigmas);

// mean' = F mean, cov' = F P F^T + Q. Throws DimensionMismatch.
GaussianBelief kalman_predict(const GaussianBelief& b, const MotionModel& m);

// Unscented measurement update. Errors thrown by `h` are rethrown as
// SigmaPointProjectionFailure; a non-invertible innovation covariance throws
// SingularInnovation. The posterior covariance is symmetrized and any
// round-off negative eigenvalues are clamped to zero.
GaussianBelief ukf_update(const GaussianBelief& b, const Eigen::VectorXd& z,
                          const MeasurementFn& h, const Eigen::MatrixXd& R,
                          const UtParams& params = {});

// F = I3 (x) [[1, dt], [0, 1]] on the kinematic block and identity on the
// shape block. Q uses continuous white-acceleration blocks
// q_pos * [[dt^3/3, dt^2/2], [dt^2/2, dt]] per axis and q_shape * I3 for the
// shape. Throws InvalidDt for dt <= 0 or negative variances.
MotionModel make_motion_model(double dt, double q_pos, double q_shape,
                              StateLayout layout);

// (P + P^T) / 2.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& p);

}  // namespace mvfuse
