#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/trajectory.hpp"

namespace rloc {

/// UWB transceiver placement (body frames) and radar mounting.
struct SensorRig {
  struct Node {
    int id = 0;
    Vec3 position = Vec3::Zero();  // body frame, meters
  };
  std::vector<Node> tags;     // on the UAV (robot 1)
  std::vector<Node> anchors;  // on the UGV (robot 2)
  SE3Transform radar_extrinsic_uav;  // body -> sensor mount pose (in body frame)
  SE3Transform radar_extrinsic_ugv;

  static SensorRig default_rig();
};

struct UwbNoiseModel {
  double sigma = 0.12;            // meters
  double bias = 0.0;              // meters
  double dropout_probability = 0.05;
};

struct RangeMeasurement {
  double time = 0.0;
  int tag_id = 0;
  int anchor_id = 0;
  double distance = 0.0;  // meters
  double sigma = 0.12;    // reported weight, > 0
};

struct RadarPoint {
  Vec3 position = Vec3::Zero();  // sensor frame, meters
  double doppler = 0.0;          // m/s, positive toward the detection
  bool is_dynamic = false;       // set by the simulator, used only by tests
};

struct RadarScan {
  double time = 0.0;
  std::vector<RadarPoint> points;
};

enum class MissionKind { coordinated, divergent, custom_waypoints };

struct Waypoint {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Mission geometry. Defaults describe the coordinated survey: the UGV walks
/// a staircase sweep (alternating east/north legs, so odometry scale drift
/// accumulates instead of cancelling) and the UAV flies the same path
/// laterally offset with a slow altitude oscillation, 1-2.5 m away.
struct MissionSpec {
  MissionKind kind = MissionKind::coordinated;
  double duration_s = 180.0;

  // UGV path parameters.
  double ugv_speed = 0.35;      // m/s
  double survey_leg = 16.0;     // m, straight segment length
  double survey_turn_radius = 2.5;
  Vec3 survey_start = {-18.0, -14.0, 0.0};
  double circle_radius = 5.0;   // divergent mission
  double divergent_ugv_speed = 0.3;

  // UAV offsets relative to the UGV.
  double uav_lateral_offset = 0.4;
  double uav_base_altitude = 1.5;
  double uav_altitude_amplitude = 0.6;
  double uav_altitude_period_s = 45.0;

  // Divergent mission separation profile (horizontal, meters).
  double divergent_min_separation = 0.6;
  double divergent_max_separation = 9.0;
  double divergent_altitude = 1.2;
  double divergent_altitude_amplitude = 0.4;

  // Custom missions.
  std::vector<Waypoint> ugv_waypoints;
  std::vector<Waypoint> uav_waypoints;
};

struct MissionTrajectories {
  Trajectory uav;
  Trajectory ugv;
};

/// Samples ground-truth trajectories for both robots every dt seconds.
/// Throws std::invalid_argument on bad spec fields.
MissionTrajectories generate_mission(const MissionSpec& spec, double dt);

/// Anchor-tag range stream per the characterized measurement model: true 3D
/// distance + bias + N(0, sigma^2), each sample independently dropped with
/// the configured probability. Pure function of the seed.
std::vector<RangeMeasurement> synthesize_uwb(const Trajectory& uav_traj,
                                             const Trajectory& ugv_traj,
                                             const SensorRig& rig,
                                             const UwbNoiseModel& model,
                                             double rate_hz, uint64_t seed);

/// Accumulated odometry error: per-step multiplicative scale on translation
/// increments (mean 1 + rate * sign with small per-step jitter) plus a yaw
/// random walk with per-step sigma = rate * (|step yaw| + 0.01 rad/m * step
/// length). Roll and pitch pass through unchanged. rate == 0 returns the
/// input exactly.
Trajectory apply_odometry_drift(const Trajectory& traj, double drift_rate,
                                uint64_t seed);

struct RadarEnvironment {
  std::vector<Vec3> static_points;
  struct DynamicPoint {
    Vec3 position0 = Vec3::Zero();  // world position at t = 0
    Vec3 velocity = Vec3::Zero();   // world, m/s
  };
  std::vector<DynamicPoint> dynamic_points;

  /// 500 points uniform over a 40x40x10 m box plus a ground-plane grid.
  static RadarEnvironment default_environment(uint64_t seed);
};

struct RadarSimConfig {
  double fov_azimuth_deg = 120.0;
  double fov_elevation_deg = 30.0;
  double max_range = 50.0;
  double position_noise = 0.05;   // meters, per axis
  double doppler_noise = 0.05;    // m/s
  double rate_hz = 5.0;
};

/// Per tick, includes environment points inside the sensor frustum; static
/// points carry doppler = h . v_sensor (sensor-frame linear velocity),
/// dynamic points subtract their own velocity projection.
std::vector<RadarScan> synthesize_radar(const Trajectory& traj,
                                        const RadarEnvironment& environment,
                                        const SE3Transform& extrinsic,
                                        const RadarSimConfig& config,
                                        uint64_t seed);

}  // namespace rloc
