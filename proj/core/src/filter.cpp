#include "mvfuse/filter.hpp"

#include <cmath>
#include <string>

#include "mvfuse/error.hpp"

namespace mvfuse {

namespace {

void check_belief(const GaussianBelief& b) {
  if (b.covariance.rows() != b.mean.size() ||
      b.covariance.cols() != b.mean.size()) {
    throw DimensionMismatch("belief covariance is " +
                            std::to_string(b.covariance.rows()) + "x" +
                            std::to_string(b.covariance.cols()) +
                            " for a mean of size " +
                            std::to_string(b.mean.size()));
  }
}

// Symmetrize and clamp negative eigenvalues left by round-off.
Eigen::MatrixXd clean_covariance(const Eigen::MatrixXd& p) {
  Eigen::MatrixXd s = symmetrized(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() < 0.0) {
    const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
    s = eig.eigenvectors() * clamped.asDiagonal() *
        eig.eigenvectors().transpose();
    s = symmetrized(s);
  }
  return s;
}

}  // namespace

Eigen::Index state_dim(StateLayout layout) {
  return layout == StateLayout::kEllipsoid ? 9 : 6;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& p) {
  return 0.5 * (p + p.transpose());
}

Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double mean_diag = m.trace() / static_cast<double>(d);
  if (!(mean_diag > 0.0)) {
    throw CholeskyFailure("matrix is not positive definite (trace <= 0)");
  }
  for (double jitter = 1e-12 * mean_diag; jitter <= 1e-6 * mean_diag * 1.0001;
       jitter *= 10.0) {
    llt.compute(m + jitter * Eigen::MatrixXd::Identity(d, d));
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw CholeskyFailure("matrix is not positive definite after jitter");
}

SigmaSet sigma_points(const GaussianBelief& b, const UtParams& params) {
  check_belief(b);
  const Eigen::Index d = b.dim();
  const double lambda = params.lambda(d);
  const double spread = static_cast<double>(d) + lambda;
  if (!(spread > 0.0)) {
    throw CholeskyFailure("d + lambda must be positive");
  }
  const Eigen::MatrixXd L = robust_cholesky(spread * b.covariance);

  SigmaSet s;
  s.params = params;
  s.lambda = lambda;
  s.points.resize(2 * d + 1, d);
  s.points.row(0) = b.mean.transpose();
  for (Eigen::Index i = 0; i < d; ++i) {
    s.points.row(1 + i) = (b.mean + L.col(i)).transpose();
    s.points.row(1 + d + i) = (b.mean - L.col(i)).transpose();
  }
  s.mean_weights = Eigen::VectorXd::Constant(2 * d + 1, 0.5 / spread);
  s.cov_weights = s.mean_weights;
  s.mean_weights[0] = lambda / spread;
  s.cov_weights[0] =
      lambda / spread + (1.0 - params.alpha * params.alpha + params.beta);
  return s;
}

GaussianBelief unscented_moments(const Eigen::MatrixXd& transformed,
                                 const SigmaSet& sigmas) {
  GaussianBelief out;
  out.mean = transformed.transpose() * sigmas.mean_weights;
  const Eigen::MatrixXd dev = transformed.rowwise() - out.mean.transpose();
  out.covariance = dev.transpose() * sigmas.cov_weights.asDiagonal() * dev;
  return out;
}

GaussianBelief kalman_predict(const GaussianBelief& b, const MotionModel& m) {
  check_belief(b);
  if (m.transition.rows() != b.dim() || m.transition.cols() != b.dim() ||
      m.process_noise.rows() != b.dim() || m.process_noise.cols() != b.dim()) {
    throw DimensionMismatch("motion model dimension " +
                            std::to_string(m.transition.rows()) +
                            " does not match state dimension " +
                            std::to_string(b.dim()));
  }
  GaussianBelief out;
  out.mean = m.transition * b.mean;
  out.covariance = symmetrized(
      m.transition * b.covariance * m.transition.transpose() +
      m.process_noise);
  return out;
}

GaussianBelief ukf_update(const GaussianBelief& b, const Eigen::VectorXd& z,
                          const MeasurementFn& h, const Eigen::MatrixXd& R,
                          const UtParams& params) {
  check_belief(b);
  const Eigen::Index m = z.size();
  if (R.rows() != m || R.cols() != m) {
    throw DimensionMismatch("measurement noise is " + std::to_string(R.rows()) +
                            "x" + std::to_string(R.cols()) +
                            " for a measurement of size " +
                            std::to_string(m));
  }

  const SigmaSet sigmas = sigma_points(b, params);
  Eigen::MatrixXd projected(sigmas.size(), m);
  for (Eigen::Index i = 0; i < sigmas.size(); ++i) {
    Eigen::VectorXd zi;
    try {
      zi = h(sigmas.points.row(i).transpose());
    } catch (const Error& e) {
      throw SigmaPointProjectionFailure("sigma point " + std::to_string(i) +
                                        ": " + e.what());
    }
    if (zi.size() != m) {
      throw DimensionMismatch("measurement function returned size " +
                              std::to_string(zi.size()) + ", expected " +
                              std::to_string(m));
    }
    if (!zi.allFinite()) {
      throw SigmaPointProjectionFailure("sigma point " + std::to_string(i) +
                                        " projects to a non-finite value");
    }
    projected.row(i) = zi.transpose();
  }

  const Eigen::VectorXd z_hat = projected.transpose() * sigmas.mean_weights;
  const Eigen::MatrixXd dz = projected.rowwise() - z_hat.transpose();
  const Eigen::MatrixXd dx = sigmas.points.rowwise() - b.mean.transpose();
  const Eigen::MatrixXd S = symmetrized(
      dz.transpose() * sigmas.cov_weights.asDiagonal() * dz + R);
  const Eigen::MatrixXd cross =
      dx.transpose() * sigmas.cov_weights.asDiagonal() * dz;

  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd L;
    try {
      L = robust_cholesky(S);
    } catch (const CholeskyFailure&) {
      throw SingularInnovation("innovation covariance is not invertible");
    }
    llt.compute(L * L.transpose());
    if (llt.info() != Eigen::Success) {
      throw SingularInnovation("innovation covariance is not invertible");
    }
  }
  // K = C S^-1, computed as (S^-1 C^T)^T.
  const Eigen::MatrixXd gain = llt.solve(cross.transpose()).transpose();

  GaussianBelief out;
  out.mean = b.mean + gain * (z - z_hat);
  out.covariance = clean_covariance(b.covariance - gain * S * gain.transpose());
  return out;
}

MotionModel make_motion_model(double dt, double q_pos, double q_shape,
                              StateLayout layout) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidDt("dt must be positive, got " + std::to_string(dt));
  }
  if (!(q_pos >= 0.0) || !(q_shape >= 0.0)) {
    throw InvalidDt("process noise variances must be non-negative");
  }
  const Eigen::Index d = state_dim(layout);
  MotionModel m;
  m.dt = dt;
  m.transition = Eigen::MatrixXd::Identity(d, d);
  m.process_noise = Eigen::MatrixXd::Zero(d, d);

  Eigen::Matrix2d q_block;
  q_block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  for (int axis = 0; axis < 3; ++axis) {
    const int p = 2 * axis;
    m.transition(p, p + 1) = dt;
    m.process_noise.block<2, 2>(p, p) = q_pos * q_block;
  }
  if (layout == StateLayout::kEllipsoid) {
    m.process_noise.block<3, 3>(6, 6) = q_shape * Eigen::Matrix3d::Identity();
  }
  return m;
}

}  // namespace mvfuse
