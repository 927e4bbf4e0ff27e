#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/sim_world.hpp"
#include "rloc/solver.hpp"
#include "rloc/trajectory.hpp"

namespace rloc {

/// Result of one relative-transform solve: the 4-DOF transform taking
/// UGV-odometry-frame coordinates into the UAV odometry frame, with its
/// Gauss-Newton covariance.
struct Transform4Estimate {
  Pose4 transform;
  Mat4 covariance = Mat4::Identity();
  double window_span_uav = 0.0;  // meters of trajectory in the window
  double window_span_ugv = 0.0;
  int residual_count = 0;
  double timestamp = 0.0;
  bool rank_deficient = false;
};

/// One solve's input: ranges plus the odometry needed to place every tag and
/// anchor, with per-robot window trajectory lengths.
struct MeasurementWindow {
  std::vector<RangeMeasurement> ranges;
  Trajectory odom_uav;
  Trajectory odom_ugv;
  double span_uav = 0.0;
  double span_ugv = 0.0;
};

struct RtePrior {
  Pose4 transform;
  Mat4 covariance =
      (Vec4(0.25, 0.25, 0.25, 0.030461741978670857) /* (10 deg)^2 */).asDiagonal();
};

struct RteConfig {
  double min_window_m = 2.0;
  double max_window_m = 10.0;
  double cadence_hz = 1.0;
  int min_residuals = 20;
  // Outlier gate once an estimate exists: |d - d_hat| > 5 sigma + 0.5 m.
  bool gating_enabled = true;
  double gate_sigma_factor = 5.0;
  double gate_slack_m = 0.5;
  // Multi-start: four yaw seeds, each also mirrored in z (near-planar motion
  // makes the z branch a deep local minimum).
  int yaw_seeds = 4;
  bool z_mirror_seeds = true;
  double tie_break_fraction = 0.01;
  SolverOptions solver;
};

/// Predicted anchor-tag distance || p_tag - T * p_anchor ||.
double predict_range(const SE3Transform& T, const Vec3& tag_in_o1,
                     const Vec3& anchor_in_o2);

/// Solves the windowed range NLS over the Pose4 state. Returns nullopt when
/// the window has fewer than config.min_residuals usable ranges or the solve
/// diverges.
std::optional<Transform4Estimate> estimate(
    const MeasurementWindow& window, const SensorRig& rig,
    const RteConfig& config, const std::optional<RtePrior>& prior = {},
    const std::optional<Transform4Estimate>& previous = {});

/// Streaming front-end: feeds odometry and ranges, maintains the
/// distance-based sliding window and re-estimates at the configured cadence.
class RteEstimator {
 public:
  RteEstimator(const SensorRig& rig, const RteConfig& config)
      : rig_(rig), config_(config) {}

  void feed_odometry_uav(const TrajectorySample& s) { odom_uav_.push_back(s); }
  void feed_odometry_ugv(const TrajectorySample& s) { odom_ugv_.push_back(s); }
  void feed_range(const RangeMeasurement& m) { ranges_.push_back(m); }

  /// Newest window whose per-robot trajectory length is at least
  /// min_window_m, trimmed to max_window_m. nullopt while either robot has
  /// not moved enough.
  std::optional<MeasurementWindow> build_window() const;

  /// Runs a solve if a window is ready; remembers the estimate for warm
  /// starts and gating.
  std::optional<Transform4Estimate> update(double now,
                                           const std::optional<RtePrior>& prior = {});

  const std::optional<Transform4Estimate>& last_estimate() const { return last_; }

 private:
  SensorRig rig_;
  RteConfig config_;
  Trajectory odom_uav_;
  Trajectory odom_ugv_;
  std::deque<RangeMeasurement> ranges_;
  std::optional<Transform4Estimate> last_;
};

}  // namespace rloc
