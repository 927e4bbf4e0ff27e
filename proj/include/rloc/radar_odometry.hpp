#pragma once

#include <cstdint>
#include <optional>

#include "rloc/geometry.hpp"
#include "rloc/sim_world.hpp"

namespace rloc {

enum class EgoMode { ground, aerial };

enum class EgoStatus { ok, insufficient_points, unobservable };

/// Sensor-frame linear velocity recovered from per-point Doppler readings.
struct EgoVelocity {
  Vec3 v = Vec3::Zero();  // sensor frame, m/s
  int inlier_count = 0;
  double residual_rms = 0.0;  // m/s over the inlier set
  EgoMode mode = EgoMode::aerial;
  EgoStatus status = EgoStatus::ok;

  bool valid() const { return status == EgoStatus::ok; }
};

struct EgoConfig {
  int ransac_iterations = 100;
  double inlier_threshold = 0.15;  // m/s
  uint64_t seed = 1;
  /// Rotation taking sensor-frame vectors into the body frame (used by the
  /// ground-mode attitude substitution).
  Mat3 sensor_to_body = Mat3::Identity();
};

/// Least-squares Doppler ego-motion with RANSAC over point subsets. Aerial
/// mode solves all three components; ground mode substitutes the roll/pitch
/// velocity decomposition so only (vx, vy) remain, with vz implied.
EgoVelocity estimate_ego_velocity(const RadarScan& scan, double roll, double pitch,
                                  EgoMode mode, const EgoConfig& config = {});

/// Retains points whose Doppler reading is consistent with the estimated ego
/// velocity: |doppler - h . v| <= threshold.
RadarScan filter_scan(const RadarScan& scan, const EgoVelocity& velocity,
                      double threshold);

struct ScanMatchResult {
  SE3Transform relative;  // prev sensor frame -> curr sensor frame
  double fitness = 0.0;   // mean squared correspondence distance
  int iterations = 0;
  bool converged = false;
  int correspondences = 0;
};

struct ScanMatchConfig {
  int max_iterations = 50;
  double base_gate = 0.5;         // meters
  double gate_median_factor = 3.0;
  double translation_tolerance = 1e-6;
  double rotation_tolerance = 1e-6;
  double converged_fitness = 1.0;  // m^2
  int min_points = 10;
};

/// Point-to-point ICP with a distance-gated nearest-neighbor correspondence
/// set and closed-form SVD alignment per iteration. The initial guess is
/// typically exp of the ego-velocity twist over the scan interval.
ScanMatchResult scan_match(const RadarScan& prev, const RadarScan& curr,
                           const SE3Transform& initial_guess,
                           const ScanMatchConfig& config = {});

struct OdometryFactorConfig {
  double base_translation_sigma = 0.006;  // meters
  double base_yaw_sigma = 0.002;          // radians
  double vertical_inflation = 25.0;       // multiplies the z variance
  double fitness_reference = 0.02;        // m^2; scales covariance with fitness
};

/// Relative-pose measurement for the pose graph: body-frame transform in
/// Pose4 coordinates plus a 4x4 covariance with the vertical variance
/// inflated (radar height estimates are unreliable).
struct RadarOdometryFactor {
  Pose4 relative;
  Mat4 covariance = Mat4::Identity();
};

/// Throws std::invalid_argument when the scan match did not converge.
/// `extrinsic` maps body-frame coordinates to sensor-frame coordinates.
RadarOdometryFactor make_odometry_factor(const ScanMatchResult& result,
                                         const EgoVelocity& ego,
                                         const SE3Transform& extrinsic,
                                         const OdometryFactorConfig& config = {});

}  // namespace rloc
