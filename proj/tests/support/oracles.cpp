#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mvfuse::testing {

BBox sampled_bbox(const CameraModel& cam, const Ellipsoid& e, int samples) {
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  const Eigen::Matrix3d K = cam.intrinsics();
  BBox box{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < samples; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / samples;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    const Eigen::Vector3d unit(r * std::cos(phi), r * std::sin(phi), z);
    const Eigen::Vector3d world =
        e.center + e.half_axes.cwiseProduct(unit);
    const Eigen::Vector3d x = K * (cam.rotation() * world + cam.translation());
    const double u = x.x() / x.z();
    const double v = x.y() / x.z();
    box.u_min = std::min(box.u_min, u);
    box.u_max = std::max(box.u_max, u);
    box.v_min = std::min(box.v_min, v);
    box.v_max = std::max(box.v_max, v);
  }
  return box;
}

BBox sphere_bbox(const CameraModel& cam, const Eigen::Vector3d& center,
                 double radius) {
  const Eigen::Vector3d c = cam.rotation() * center + cam.translation();
  const Eigen::Matrix3d& K = cam.intrinsics();
  // Planes x = k z tangent to the sphere: (cx - k cz)^2 = r^2 (1 + k^2).
  auto tangents = [&](double a, double z) {
    const double den = z * z - radius * radius;
    const double root = radius * std::sqrt(a * a + z * z - radius * radius);
    return std::pair{(a * z - root) / den, (a * z + root) / den};
  };
  const auto [ku0, ku1] = tangents(c.x(), c.z());
  const auto [kv0, kv1] = tangents(c.y(), c.z());
  return {K(0, 0) * ku0 + K(0, 2), K(1, 1) * kv0 + K(1, 2),
          K(0, 0) * ku1 + K(0, 2), K(1, 1) * kv1 + K(1, 2)};
}

GaussianBelief linear_kalman_update(const GaussianBelief& b,
                                    const Eigen::VectorXd& z,
                                    const Eigen::MatrixXd& H,
                                    const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd S = H * b.covariance * H.transpose() + R;
  const Eigen::MatrixXd K =
      b.covariance * H.transpose() * S.inverse();
  GaussianBelief out;
  out.mean = b.mean + K * (z - H * b.mean);
  const Eigen::MatrixXd I =
      Eigen::MatrixXd::Identity(b.dim(), b.dim());
  out.covariance = (I - K * H) * b.covariance;
  return out;
}

double brute_force_assignment_cost(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  std::vector<int> perm(static_cast<std::size_t>(cols));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int r = 0; r < rows; ++r) total += cost(r, perm[static_cast<std::size_t>(r)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Eigen::Vector3d triangulate(const std::vector<CameraModel>& cams,
                            const std::vector<Eigen::Vector2d>& pixels) {
  Eigen::MatrixXd A(2 * cams.size(), 4);
  for (std::size_t i = 0; i < cams.size(); ++i) {
    Eigen::Matrix<double, 3, 4> P;
    P.leftCols<3>() = cams[i].intrinsics() * cams[i].rotation();
    P.col(3) = cams[i].intrinsics() * cams[i].translation();
    const auto r = static_cast<Eigen::Index>(2 * i);
    A.row(r) = pixels[i].x() * P.row(2) - P.row(0);
    A.row(r + 1) = pixels[i].y() * P.row(2) - P.row(1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d X = svd.matrixV().col(3);
  return X.head<3>() / X[3];
}

namespace {

double track_distance(const Track& a, const Track& b, double cutoff,
                      const std::vector<FrameIndex>& frames) {
  double total = 0.0;
  int count = 0;
  for (FrameIndex f : frames) {
    const TrackEntry* x = a.at(f);
    const TrackEntry* y = b.at(f);
    if (!x && !y) continue;
    ++count;
    total += (x && y) ? std::min(cutoff, (x->position - y->position).norm())
                      : cutoff;
  }
  return count ? total / count : 0.0;
}

}  // namespace

double ospa2_by_definition(const TrackSet& a, const TrackSet& b, double cutoff,
                           double order) {
  std::vector<const Track*> small, large;
  for (const auto& [id, t] : a) small.push_back(&t);
  for (const auto& [id, t] : b) large.push_back(&t);
  if (small.size() > large.size()) std::swap(small, large);
  const std::size_t m = small.size();
  const std::size_t n = large.size();
  if (n == 0) return 0.0;
  std::vector<FrameIndex> frames = frame_union(a, b);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      total += std::pow(
          std::min(cutoff,
                   track_distance(*small[i], *large[perm[i]], cutoff, frames)),
          order);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double penalty =
      std::pow(cutoff, order) * static_cast<double>(n - m);
  return std::pow((best + penalty) / static_cast<double>(n), 1.0 / order);
}

CameraModel random_camera(std::mt19937_64& rng, CameraId id) {
  std::uniform_real_distribution<double> radius(4.0, 15.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> height(1.0, 10.0);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uniform_real_distribution<double> focal(500.0, 2000.0);
  const double r = radius(rng);
  const double a = angle(rng);
  const Eigen::Vector3d center(r * std::cos(a), r * std::sin(a), height(rng));
  const Eigen::Vector3d target(jitter(rng), jitter(rng), 0.5 + 0.5 * jitter(rng));
  return CameraModel::look_at(id, center, target, focal(rng), 1920, 1080);
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double lo,
                           double hi) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = g(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = eig(rng);
  const Eigen::MatrixXd P = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (P + P.transpose());
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n,
                              double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace mvfuse::testing
