#include "rloc/radar_odometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rloc/rng.hpp"

namespace rloc {

namespace {

// Columns of the reduced ground-mode system: v_body = M(roll, pitch) [vx vy]^T
// with v = [cos(pitch) vx, cos(roll) vy, sin(pitch) vx + sin(roll) vy].
Eigen::Matrix<double, 3, 2> ground_decomposition(double roll, double pitch) {
  Eigen::Matrix<double, 3, 2> m;
  m << std::cos(pitch), 0.0,
       0.0, std::cos(roll),
       std::sin(pitch), std::sin(roll);
  return m;
}

struct LinearSystem {
  Eigen::MatrixXd h;  // N x 3 (aerial) or N x 2 (ground)
  Eigen::VectorXd d;  // dopplers
};

// Maps the solved parameter vector back to a sensor-frame velocity.
Vec3 params_to_sensor_velocity(const Eigen::VectorXd& params, EgoMode mode,
                               double roll, double pitch, const Mat3& sensor_to_body) {
  if (mode == EgoMode::aerial) return params.head<3>();
  const Vec3 v_body = ground_decomposition(roll, pitch) * params.head<2>();
  return sensor_to_body.transpose() * v_body;
}

LinearSystem build_system(const RadarScan& scan, EgoMode mode, double roll,
                          double pitch, const Mat3& sensor_to_body) {
  const int n = static_cast<int>(scan.points.size());
  LinearSystem sys;
  sys.d.resize(n);
  if (mode == EgoMode::aerial) {
    sys.h.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      const Vec3 dir = scan.points[i].position.normalized();
      sys.h.row(i) = dir.transpose();
      sys.d[i] = scan.points[i].doppler;
    }
  } else {
    const Eigen::Matrix<double, 3, 2> m = ground_decomposition(roll, pitch);
    sys.h.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      const Vec3 dir = scan.points[i].position.normalized();
      // h . v_sensor = (R_sb^T h)^T v_body = h_b^T M [vx vy]^T
      const Vec3 h_body = sensor_to_body * dir;
      sys.h.row(i) = (h_body.transpose() * m).row(0);
      sys.d[i] = scan.points[i].doppler;
    }
  }
  return sys;
}

bool solve_subset(const LinearSystem& sys, const std::vector<int>& rows,
                  Eigen::VectorXd& params) {
  const int k = static_cast<int>(sys.h.cols());
  Eigen::MatrixXd a(rows.size(), k);
  Eigen::VectorXd b(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<int>(i)) = sys.h.row(rows[i]);
    b[static_cast<int>(i)] = sys.d[rows[i]];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()[k - 1] < 1e-6 * std::max(svd.singularValues()[0], 1e-12)) {
    return false;
  }
  params = svd.solve(b);
  return true;
}

}  // namespace

EgoVelocity estimate_ego_velocity(const RadarScan& scan, double roll, double pitch,
                                  EgoMode mode, const EgoConfig& config) {
  EgoVelocity out;
  out.mode = mode;
  const int min_points = mode == EgoMode::aerial ? 3 : 2;
  const int n = static_cast<int>(scan.points.size());
  if (n < min_points) {
    out.status = EgoStatus::insufficient_points;
    return out;
  }

  const LinearSystem sys = build_system(scan, mode, roll, pitch, config.sensor_to_body);
  const int k = static_cast<int>(sys.h.cols());

  // Full-set rank check: coplanar (aerial) or collinear (ground) directions
  // leave the velocity unobservable no matter the consensus set.
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.h);
    if (svd.singularValues()[k - 1] < 1e-6 * std::max(svd.singularValues()[0], 1e-12)) {
      out.status = EgoStatus::unobservable;
      return out;
    }
  }

  Rng rng(config.seed);
  std::vector<int> best_inliers;
  Eigen::VectorXd params;
  for (int iter = 0; iter < config.ransac_iterations; ++iter) {
    std::vector<int> sample;
    while (static_cast<int>(sample.size()) < min_points) {
      const int idx = rng.uniform_int(0, n - 1);
      if (std::find(sample.begin(), sample.end(), idx) == sample.end()) {
        sample.push_back(idx);
      }
    }
    Eigen::VectorXd candidate;
    if (!solve_subset(sys, sample, candidate)) continue;
    std::vector<int> inliers;
    for (int i = 0; i < n; ++i) {
      const double r = sys.h.row(i).dot(candidate) - sys.d[i];
      if (std::abs(r) <= config.inlier_threshold) inliers.push_back(i);
    }
    if (inliers.size() > best_inliers.size()) best_inliers = std::move(inliers);
    if (static_cast<int>(best_inliers.size()) == n) break;
  }

  if (static_cast<int>(best_inliers.size()) < min_points) {
    out.status = EgoStatus::unobservable;
    return out;
  }
  if (!solve_subset(sys, best_inliers, params)) {
    out.status = EgoStatus::unobservable;
    return out;
  }

  double ss = 0.0;
  for (int i : best_inliers) {
    const double r = sys.h.row(i).dot(params) - sys.d[i];
    ss += r * r;
  }
  out.v = params_to_sensor_velocity(params, mode, roll, pitch, config.sensor_to_body);
  out.inlier_count = static_cast<int>(best_inliers.size());
  out.residual_rms = std::sqrt(ss / best_inliers.size());
  return out;
}

RadarScan filter_scan(const RadarScan& scan, const EgoVelocity& velocity,
                      double threshold) {
  if (!velocity.valid()) {
    throw std::invalid_argument("filter_scan: invalid ego velocity");
  }
  RadarScan out;
  out.time = scan.time;
  for (const auto& p : scan.points) {
    const double predicted = p.position.normalized().dot(velocity.v);
    if (std::abs(p.doppler - predicted) <= threshold) out.points.push_back(p);
  }
  return out;
}

ScanMatchResult scan_match(const RadarScan& prev, const RadarScan& curr,
                           const SE3Transform& initial_guess,
                           const ScanMatchConfig& config) {
  ScanMatchResult result;
  if (static_cast<int>(prev.points.size()) < config.min_points ||
      static_cast<int>(curr.points.size()) < config.min_points) {
    throw std::invalid_argument("scan_match: fewer points than the minimum");
  }

  // The transform mapping curr-frame coordinates into prev-frame coordinates
  // is the relative sensor pose prev -> curr.
  SE3Transform T = initial_guess;
  std::vector<int> last_assoc(curr.points.size(), -1);
  std::vector<int> second_last_assoc;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    result.iterations = iter + 1;

    std::vector<Vec3> moved(curr.points.size());
    for (size_t i = 0; i < curr.points.size(); ++i) {
      moved[i] = T * curr.points[i].position;
    }

    // Nearest neighbor in prev for every moved curr point.
    std::vector<int> assoc(curr.points.size(), -1);
    std::vector<double> dist(curr.points.size(), 0.0);
    std::vector<double> sorted_dist;
    for (size_t i = 0; i < curr.points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_j = -1;
      for (size_t j = 0; j < prev.points.size(); ++j) {
        const double d2 = (moved[i] - prev.points[j].position).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_j = static_cast<int>(j);
        }
      }
      assoc[i] = best_j;
      dist[i] = std::sqrt(best);
      sorted_dist.push_back(dist[i]);
    }
    std::nth_element(sorted_dist.begin(), sorted_dist.begin() + sorted_dist.size() / 2,
                     sorted_dist.end());
    const double median = sorted_dist[sorted_dist.size() / 2];
    const double gate = std::max(config.base_gate, config.gate_median_factor * median);

    Vec3 centroid_curr = Vec3::Zero(), centroid_prev = Vec3::Zero();
    int used = 0;
    for (size_t i = 0; i < curr.points.size(); ++i) {
      if (dist[i] > gate) {
        assoc[i] = -1;
        continue;
      }
      centroid_curr += moved[i];
      centroid_prev += prev.points[assoc[i]].position;
      ++used;
    }
    result.correspondences = used;
    if (used < config.min_points) {
      result.converged = false;
      result.relative = T;
      result.fitness = std::numeric_limits<double>::infinity();
      return result;
    }
    centroid_curr /= used;
    centroid_prev /= used;

    Mat3 w = Mat3::Zero();
    double fitness = 0.0;
    for (size_t i = 0; i < curr.points.size(); ++i) {
      if (assoc[i] < 0) continue;
      const Vec3 a = moved[i] - centroid_curr;
      const Vec3 b = prev.points[assoc[i]].position - centroid_prev;
      w += b * a.transpose();
      fitness += (moved[i] - prev.points[assoc[i]].position).squaredNorm();
    }
    result.fitness = fitness / used;

    Eigen::JacobiSVD<Mat3> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
      Mat3 flip = Mat3::Identity();
      flip(2, 2) = -1.0;
      r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    const Vec3 t = centroid_prev - r * centroid_curr;

    // Incremental correction applied on the left of the running transform.
    const SE3Transform delta{r, t};
    T = delta * T;

    const double rot_step = delta.rotation_angle();
    const double trans_step = t.norm();
    const bool fixpoint = assoc == last_assoc;
    // Noise can flip a correspondence back and forth forever; a period-2
    // cycle is as converged as a fixpoint.
    const bool cycling = assoc == second_last_assoc;
    const bool settled = rot_step < config.rotation_tolerance &&
                         trans_step < config.translation_tolerance;
    if (fixpoint || cycling || settled) {
      result.converged = result.fitness < config.converged_fitness;
      break;
    }
    second_last_assoc = std::move(last_assoc);
    last_assoc = std::move(assoc);
  }

  result.relative = T;
  return result;
}

RadarOdometryFactor make_odometry_factor(const ScanMatchResult& result,
                                         const EgoVelocity& /*ego*/,
                                         const SE3Transform& extrinsic,
                                         const OdometryFactorConfig& config) {
  if (!result.converged) {
    throw std::invalid_argument("make_odometry_factor: scan match did not converge");
  }
  // Sensor-frame relative motion to body-frame relative motion.
  const SE3Transform mount = extrinsic.inverse();  // sensor pose in body
  const SE3Transform body_rel = mount * result.relative * mount.inverse();

  RadarOdometryFactor factor;
  factor.relative = se3_to_pose4(body_rel);

  const double scale = 1.0 + std::max(result.fitness, 0.0) / config.fitness_reference;
  const double var_t = config.base_translation_sigma * config.base_translation_sigma * scale;
  const double var_yaw = config.base_yaw_sigma * config.base_yaw_sigma * scale;
  factor.covariance = Mat4::Zero();
  factor.covariance(0, 0) = var_t;
  factor.covariance(1, 1) = var_t;
  factor.covariance(2, 2) = var_t * config.vertical_inflation;
  factor.covariance(3, 3) = var_yaw;
  return factor;
}

}  // namespace rloc
