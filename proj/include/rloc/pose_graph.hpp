#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/rte.hpp"
#include "rloc/solver.hpp"

namespace rloc {

/// Keyframed 4-DOF node in the owning robot's odometry frame.
struct KeyframeNode {
  int robot = 0;
  int index = 0;
  Pose4 state;       // optimized
  Pose4 odom_pose;   // odometry pose at creation (the measurement source)
  double timestamp = 0.0;
  double arc_length = 0.0;  // traversed arc at creation
};

/// Transformation from a robot's odometry frame to the common frame. The
/// gauge robot's anchor is held at identity by a strong prior.
struct AnchorNode {
  int robot = 0;
  Pose4 state;
  bool observed = false;  // true once an encounter references it
};

enum class FactorKind { prior, odometry, encounter };

struct NodeRef {
  enum class Type { keyframe, anchor };
  Type type = Type::keyframe;
  int robot = 0;
  int index = 0;  // keyframes only
};

struct Factor {
  FactorKind kind = FactorKind::odometry;
  std::vector<NodeRef> nodes;
  Pose4 measurement;
  Mat4 sqrt_information = Mat4::Identity();
};

struct GraphConfig {
  double keyframe_spacing_m = 0.5;
  int window_keyframes = 40;  // per robot; <= 0 means full graph
  double encounter_max_dt = 0.25;
  double start_prior_sigma = 1e-3;
  double gauge_prior_weight = 1e6;            // sqrt-information
  double anchor_regularization_sigma = 100.0;  // until the first encounter
  double encounter_covariance_inflation = 100.0;
  // Odometry factor model per step: sigma_t = odom_sigma_scale * step length,
  // sigma_yaw = odom_yaw_sigma_base + odom_yaw_sigma_scale * |dtheta|.
  double odom_sigma_scale = 0.02;
  double odom_yaw_sigma_base = 0.01;
  double odom_yaw_sigma_scale = 0.02;
  double odom_sigma_floor = 1e-4;
  SolverOptions solver;
};

struct OptimizeResult {
  bool applied = false;
  SolverReport report;
};

struct GlobalPose {
  double time = 0.0;
  Pose4 pose;  // common frame
};

/// Multi-robot pose graph: per-robot keyframe chains, anchor nodes mapping
/// odometry frames to the common frame, odometry and encounter factors, and
/// windowed batch optimization. Single-writer: keyframe insertion, encounter
/// insertion and optimization must not run concurrently.
class MultiRobotGraph {
 public:
  MultiRobotGraph(int num_robots, const GraphConfig& config);

  /// Feed one odometry pose; creates a keyframe (plus the odometry factor
  /// from the previous keyframe) once the robot has traversed
  /// keyframe_spacing_m since the last one. The first call per robot creates
  /// keyframe 0 with its start prior.
  std::optional<KeyframeNode> add_keyframe(int robot, const Pose4& odom_pose,
                                           double timestamp);

  /// Extra relative-pose constraint between two existing keyframes of one
  /// robot (radar scan matching).
  void add_relative_factor(int robot, int kf_a, int kf_b, const Pose4& measurement,
                           const Mat4& covariance);

  /// Encounter from an RTE estimate (UGV-odometry -> UAV-odometry transform).
  /// Returns false and logs a drop when either robot lacks a keyframe within
  /// encounter_max_dt of the estimate timestamp.
  bool add_encounter(const Transform4Estimate& estimate, int robot_uav,
                     int robot_ugv);

  /// Windowed batch solve over the newest `window_keyframes` per robot plus
  /// all anchors; older keyframes stay fixed. window_keyframes <= 0 optimizes
  /// the full graph. States are replaced only when the solve succeeds.
  OptimizeResult optimize(int window_keyframes);
  OptimizeResult optimize() { return optimize(config_.window_keyframes); }

  /// anchor * keyframe for every keyframe, in creation order.
  std::vector<GlobalPose> export_global_trajectories(int robot) const;

  const std::vector<KeyframeNode>& keyframes(int robot) const;
  const AnchorNode& anchor(int robot) const;
  const std::vector<Factor>& factors() const { return factors_; }
  int encounter_count() const { return encounter_count_; }
  int dropped_encounters() const { return dropped_encounters_; }

  /// Line-oriented text dump (KF / ANCHOR / FACTOR records).
  void dump(std::ostream& os) const;

 private:
  struct RobotState {
    std::vector<KeyframeNode> keyframes;
    AnchorNode anchor;
    bool have_last_odom = false;
    Pose4 last_odom;
    double arc = 0.0;
    double arc_at_last_keyframe = 0.0;
  };

  const KeyframeNode* nearest_keyframe(int robot, double time) const;
  Mat4 odometry_sqrt_information(double step_length, double dtheta) const;

  GraphConfig config_;
  std::vector<RobotState> robots_;
  std::vector<Factor> factors_;
  int encounter_count_ = 0;
  int dropped_encounters_ = 0;
};

}  // namespace rloc
