#include "rloc/sim_world.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rloc/rng.hpp"

namespace rloc {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("mission spec: " + what);
}

// Arc-length walker for the staircase survey: straight legs joined by
// alternating left/right quarter turns, so the heading alternates between
// east and north.
struct SurveyWalker {
  double leg, radius;
  Vec3 position{0, 0, 0};
  double heading = 0.0;
  double segment_s = 0.0;
  int segment = 0;  // 0 leg, 1 left turn, 2 leg, 3 right turn, repeat

  void advance(double ds) {
    while (ds > 0.0) {
      const bool turning = (segment % 2) == 1;
      const double seg_len = turning ? 0.5 * kPi * radius : leg;
      const double take = std::min(ds, seg_len - segment_s);
      const double kappa =
          turning ? ((segment % 4) == 1 ? 1.0 : -1.0) / radius : 0.0;
      if (kappa == 0.0) {
        position += take * Vec3(std::cos(heading), std::sin(heading), 0.0);
      } else {
        const double dh = take * kappa;
        position += Vec3((std::sin(heading + dh) - std::sin(heading)) / kappa,
                         (std::cos(heading) - std::cos(heading + dh)) / kappa,
                         0.0);
        heading += dh;
      }
      segment_s += take;
      ds -= take;
      if (segment_s >= seg_len - 1e-12) {
        segment_s = 0.0;
        segment = (segment + 1) % 4;
      }
    }
  }
};

TrajectorySample make_sample(double t, const Vec3& p, double yaw) {
  TrajectorySample s;
  s.time = t;
  s.yaw = wrap_angle(yaw);
  s.pose = SE3Transform::from_rpy(0.0, 0.0, s.yaw, p);
  return s;
}

// Body-frame velocities from central differences of the sampled positions.
void fill_velocities(std::vector<TrajectorySample>& samples) {
  const size_t n = samples.size();
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i > 0 ? i - 1 : i;
    const size_t hi = i + 1 < n ? i + 1 : i;
    const double span = samples[hi].time - samples[lo].time;
    Vec3 v_world = Vec3::Zero();
    if (span > 0.0) {
      v_world = (samples[hi].pose.translation - samples[lo].pose.translation) / span;
    }
    samples[i].velocity = samples[i].pose.rotation.transpose() * v_world;
  }
}

Vec3 piecewise_linear(const std::vector<Waypoint>& wps, double t) {
  if (wps.empty()) return Vec3::Zero();
  if (t <= wps.front().time) return wps.front().position;
  for (size_t i = 1; i < wps.size(); ++i) {
    if (t <= wps[i].time) {
      const double span = wps[i].time - wps[i - 1].time;
      const double u = span > 0.0 ? (t - wps[i - 1].time) / span : 1.0;
      return (1.0 - u) * wps[i - 1].position + u * wps[i].position;
    }
  }
  return wps.back().position;
}

double heading_of(const Vec3& from, const Vec3& to, double fallback) {
  const Vec3 d = to - from;
  if (d.head<2>().norm() < 1e-9) return fallback;
  return std::atan2(d.y(), d.x());
}

}  // namespace

SensorRig SensorRig::default_rig() {
  SensorRig rig;
  rig.tags = {{0, {0.2, 0.0, 0.05}}, {1, {-0.2, 0.0, -0.03}}};
  // Anchor plate: 0.8 x 0.6 m, two mounting heights for geometry.
  rig.anchors = {{0, {0.4, 0.3, 0.30}},
                 {1, {0.4, -0.3, 0.42}},
                 {2, {-0.4, 0.3, 0.42}},
                 {3, {-0.4, -0.3, 0.30}}};
  // UGV radar looks forward; UAV radar looks backward, tilted 15 deg down so
  // the upper beam edge stays near the horizon and keeps distant returns.
  const SE3Transform ugv_mount{Mat3::Identity(), {0.3, 0.0, 0.2}};
  const Mat3 uav_rot = (Eigen::AngleAxisd(kPi, Vec3::UnitZ()) *
                        Eigen::AngleAxisd(15.0 * kPi / 180.0, Vec3::UnitY()))
                           .toRotationMatrix();
  const SE3Transform uav_mount{uav_rot, {-0.15, 0.0, -0.05}};
  rig.radar_extrinsic_ugv = ugv_mount.inverse();
  rig.radar_extrinsic_uav = uav_mount.inverse();
  return rig;
}

MissionTrajectories generate_mission(const MissionSpec& spec, double dt) {
  require(dt > 0.0, "dt must be > 0");
  require(spec.duration_s >= 0.0, "duration_s must be >= 0");

  std::vector<TrajectorySample> ugv, uav;
  // Samples cover [0, duration); a zero-duration mission still yields the
  // start pose.
  const int count =
      std::max(1, static_cast<int>(std::floor(spec.duration_s / dt + 1e-9)));

  switch (spec.kind) {
    case MissionKind::coordinated: {
      require(spec.ugv_speed > 0.0, "ugv_speed must be > 0");
      require(spec.survey_leg > 0.0, "survey_leg must be > 0");
      require(spec.survey_turn_radius > 0.0, "survey_turn_radius must be > 0");
      SurveyWalker walker{spec.survey_leg, spec.survey_turn_radius};
      walker.position = spec.survey_start;
      for (int k = 0; k < count; ++k) {
        const double t = k * dt;
        if (k > 0) walker.advance(spec.ugv_speed * dt);
        ugv.push_back(make_sample(t, walker.position, wrap_angle(walker.heading)));
        const double alt = spec.uav_base_altitude +
                           spec.uav_altitude_amplitude *
                               std::sin(2.0 * kPi * t / spec.uav_altitude_period_s);
        const Vec3 offset =
            rot_z(walker.heading) * Vec3(0.0, spec.uav_lateral_offset, 0.0);
        uav.push_back(make_sample(t, walker.position + offset + Vec3(0, 0, alt),
                                  wrap_angle(walker.heading)));
      }
      break;
    }
    case MissionKind::divergent: {
      require(spec.circle_radius > 0.0, "circle_radius must be > 0");
      require(spec.divergent_ugv_speed > 0.0, "divergent_ugv_speed must be > 0");
      require(spec.divergent_max_separation > spec.divergent_min_separation,
              "divergent separations must satisfy max > min");
      const double omega = spec.divergent_ugv_speed / spec.circle_radius;
      const double total = std::max(spec.duration_s, dt);
      for (int k = 0; k < count; ++k) {
        const double t = k * dt;
        const double phi = omega * t;
        const Vec3 p_ugv{spec.circle_radius * std::cos(phi),
                         spec.circle_radius * std::sin(phi), 0.0};
        const double yaw = wrap_angle(phi + kPi / 2.0);
        ugv.push_back(make_sample(t, p_ugv, yaw));
        const double s = spec.divergent_min_separation +
                         (spec.divergent_max_separation - spec.divergent_min_separation) *
                             std::pow(std::sin(kPi * t / total), 2);
        const Vec3 radial{std::cos(phi), std::sin(phi), 0.0};
        const double alt = spec.divergent_altitude +
                           spec.divergent_altitude_amplitude *
                               std::sin(2.0 * kPi * t / 40.0);
        uav.push_back(make_sample(t, p_ugv + s * radial + Vec3(0, 0, alt), yaw));
      }
      break;
    }
    case MissionKind::custom_waypoints: {
      require(!spec.ugv_waypoints.empty(), "ugv_waypoints must be non-empty");
      require(!spec.uav_waypoints.empty(), "uav_waypoints must be non-empty");
      double yaw_ugv = 0.0, yaw_uav = 0.0;
      for (int k = 0; k < count; ++k) {
        const double t = k * dt;
        const Vec3 pg = piecewise_linear(spec.ugv_waypoints, t);
        const Vec3 pa = piecewise_linear(spec.uav_waypoints, t);
        yaw_ugv = heading_of(pg, piecewise_linear(spec.ugv_waypoints, t + dt), yaw_ugv);
        yaw_uav = heading_of(pa, piecewise_linear(spec.uav_waypoints, t + dt), yaw_uav);
        ugv.push_back(make_sample(t, pg, yaw_ugv));
        uav.push_back(make_sample(t, pa, yaw_uav));
      }
      break;
    }
  }

  fill_velocities(ugv);
  fill_velocities(uav);
  return {Trajectory(std::move(uav)), Trajectory(std::move(ugv))};
}

std::vector<RangeMeasurement> synthesize_uwb(const Trajectory& uav_traj,
                                             const Trajectory& ugv_traj,
                                             const SensorRig& rig,
                                             const UwbNoiseModel& model,
                                             double rate_hz, uint64_t seed) {
  if (rate_hz <= 0.0) throw std::invalid_argument("synthesize_uwb: rate must be > 0");
  const double t0 = std::max(uav_traj.start_time(), ugv_traj.start_time());
  const double t1 = std::min(uav_traj.end_time(), ugv_traj.end_time());
  if (t1 < t0) throw std::invalid_argument("synthesize_uwb: trajectories do not overlap");

  Rng rng = Rng(seed).fork(0x75776200);  // "uwb"
  std::vector<RangeMeasurement> out;
  const double reported_sigma = std::max(model.sigma, 1e-3);
  // Ticks cover [t0, t1).
  for (int k = 0;; ++k) {
    const double t = t0 + k / rate_hz;
    if (t >= t1 - 1e-9) break;
    const SE3Transform pose_uav = uav_traj.interpolate(t);
    const SE3Transform pose_ugv = ugv_traj.interpolate(t);
    for (const auto& tag : rig.tags) {
      const Vec3 p_t = pose_uav * tag.position;
      for (const auto& anchor : rig.anchors) {
        if (model.dropout_probability > 0.0 && rng.bernoulli(model.dropout_probability)) {
          continue;
        }
        const Vec3 p_a = pose_ugv * anchor.position;
        double d = (p_t - p_a).norm() + model.bias;
        if (model.sigma > 0.0) d += model.sigma * rng.normal();
        RangeMeasurement m;
        m.time = t;
        m.tag_id = tag.id;
        m.anchor_id = anchor.id;
        m.distance = std::max(d, 1e-6);
        m.sigma = reported_sigma;
        out.push_back(m);
      }
    }
  }
  return out;
}

Trajectory apply_odometry_drift(const Trajectory& traj, double drift_rate,
                                uint64_t seed) {
  if (drift_rate < 0.0) throw std::invalid_argument("drift rate must be >= 0");
  if (drift_rate == 0.0 || traj.size() < 2) return traj;

  Rng rng = Rng(seed).fork(0x64726674);  // "drft"
  const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;

  const auto& in = traj.samples();
  Trajectory out;
  out.push_back(in.front());
  double yaw_prev_true = in.front().yaw;
  double yaw_prev = yaw_prev_true;
  Vec3 p_prev = in.front().pose.translation;
  double roll_prev = in.front().roll, pitch_prev = in.front().pitch;

  for (size_t k = 1; k < in.size(); ++k) {
    const auto& prev_true = in[k - 1];
    const auto& cur = in[k];
    const Vec3 delta_body =
        prev_true.pose.rotation.transpose() * (cur.pose.translation - prev_true.pose.translation);
    const double yaw_true = cur.yaw;
    const double delta_yaw = wrap_angle(yaw_true - yaw_prev_true);

    const double scale = 1.0 + drift_rate * sign + drift_rate * 0.25 * rng.normal();
    const double yaw_noise =
        drift_rate * (std::abs(delta_yaw) + 0.01 * delta_body.norm()) * rng.normal();

    const Mat3 r_prev = SE3Transform::from_rpy(roll_prev, pitch_prev, yaw_prev, Vec3::Zero()).rotation;
    const Vec3 p = p_prev + r_prev * (scale * delta_body);
    const double yaw = yaw_prev + delta_yaw + yaw_noise;

    TrajectorySample s;
    s.time = cur.time;
    s.roll = cur.roll;
    s.pitch = cur.pitch;
    s.yaw = wrap_angle(yaw);
    s.pose = SE3Transform::from_rpy(cur.roll, cur.pitch, s.yaw, p);
    s.velocity = scale * cur.velocity;
    out.push_back(s);

    yaw_prev_true = yaw_true;
    yaw_prev = yaw;
    p_prev = p;
    roll_prev = cur.roll;
    pitch_prev = cur.pitch;
  }
  return out;
}

RadarEnvironment RadarEnvironment::default_environment(uint64_t seed) {
  Rng rng = Rng(seed).fork(0x656e7600);  // "env"
  RadarEnvironment env;
  env.static_points.reserve(500 + 17 * 17);
  for (int i = 0; i < 500; ++i) {
    env.static_points.emplace_back(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0),
                                   rng.uniform(0.0, 10.0));
  }
  for (int ix = 0; ix < 17; ++ix) {
    for (int iy = 0; iy < 17; ++iy) {
      env.static_points.emplace_back(-20.0 + 2.5 * ix, -20.0 + 2.5 * iy, 0.0);
    }
  }
  return env;
}

std::vector<RadarScan> synthesize_radar(const Trajectory& traj,
                                        const RadarEnvironment& environment,
                                        const SE3Transform& extrinsic,
                                        const RadarSimConfig& config,
                                        uint64_t seed) {
  if (environment.static_points.empty() && environment.dynamic_points.empty()) {
    throw std::invalid_argument("synthesize_radar: empty environment");
  }
  if (config.max_range <= 0.0 || config.fov_azimuth_deg <= 0.0 ||
      config.fov_elevation_deg <= 0.0 || config.rate_hz <= 0.0) {
    throw std::invalid_argument("synthesize_radar: fov, max_range and rate must be > 0");
  }

  Rng rng = Rng(seed).fork(0x72616461);  // "rada"
  const SE3Transform mount = extrinsic.inverse();  // sensor pose in body frame
  const double half_az = 0.5 * config.fov_azimuth_deg * kPi / 180.0;
  const double half_el = 0.5 * config.fov_elevation_deg * kPi / 180.0;
  const double dt = 1.0 / config.rate_hz;

  std::vector<RadarScan> scans;
  for (double t = traj.start_time(); t <= traj.end_time() + 1e-9; t += dt) {
    const SE3Transform sensor_pose = traj.interpolate(t) * mount;

    // Sensor linear velocity from a symmetric difference of its world path.
    const double h = 0.02;
    const double t_lo = std::max(t - h, traj.start_time());
    const double t_hi = std::min(t + h, traj.end_time());
    Vec3 v_world = Vec3::Zero();
    if (t_hi > t_lo) {
      const Vec3 p_hi = (traj.interpolate(t_hi) * mount).translation;
      const Vec3 p_lo = (traj.interpolate(t_lo) * mount).translation;
      v_world = (p_hi - p_lo) / (t_hi - t_lo);
    }
    const Vec3 v_sensor = sensor_pose.rotation.transpose() * v_world;

    RadarScan scan;
    scan.time = t;
    auto consider = [&](const Vec3& p_world, const Vec3& vel_world, bool dynamic) {
      const Vec3 p_s = sensor_pose.rotation.transpose() * (p_world - sensor_pose.translation);
      const double range = p_s.norm();
      if (range < 0.2 || range > config.max_range) return;
      const double az = std::atan2(p_s.y(), p_s.x());
      const double el = std::atan2(p_s.z(), p_s.head<2>().norm());
      if (std::abs(az) > half_az || std::abs(el) > half_el) return;
      const Vec3 dir = p_s / range;
      double doppler = dir.dot(v_sensor - sensor_pose.rotation.transpose() * vel_world);
      RadarPoint pt;
      pt.position = p_s + config.position_noise * Vec3(rng.normal(), rng.normal(), rng.normal());
      pt.doppler = doppler + config.doppler_noise * rng.normal();
      pt.is_dynamic = dynamic;
      scan.points.push_back(pt);
    };

    for (const auto& p : environment.static_points) consider(p, Vec3::Zero(), false);
    for (const auto& d : environment.dynamic_points) {
      consider(d.position0 + t * d.velocity, d.velocity, true);
    }
    scans.push_back(std::move(scan));
  }
  return scans;
}

}  // namespace rloc
