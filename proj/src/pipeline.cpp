#include "rloc/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rloc/csv.hpp"
#include "rloc/pose_graph.hpp"
#include "rloc/radar_odometry.hpp"
#include "rloc/rte.hpp"

namespace rloc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kUgv = 0;  // gauge robot: the common frame is its odometry frame
constexpr int kUav = 1;

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::stringstream ss;
  ss << in.rdbuf();
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  CsvWriter w(path, {"time", "x", "y", "z", "roll", "pitch", "yaw", "vx", "vy", "vz"});
  for (const auto& s : traj.samples()) {
    w.write_row({s.time, s.pose.translation.x(), s.pose.translation.y(),
                 s.pose.translation.z(), s.roll, s.pitch, s.yaw, s.velocity.x(),
                 s.velocity.y(), s.velocity.z()});
  }
}

Trajectory read_trajectory_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  Trajectory out;
  for (const auto& r : t.rows) {
    TrajectorySample s;
    s.time = r[0];
    s.roll = r[4];
    s.pitch = r[5];
    s.yaw = r[6];
    s.pose = SE3Transform::from_rpy(s.roll, s.pitch, s.yaw, {r[1], r[2], r[3]});
    s.velocity = {r[7], r[8], r[9]};
    out.push_back(s);
  }
  return out;
}

void write_radar_csv(const fs::path& path, const std::vector<RadarScan>& scans) {
  CsvWriter w(path, {"time", "x", "y", "z", "doppler", "is_dynamic"});
  for (const auto& scan : scans) {
    for (const auto& p : scan.points) {
      w.write_row({scan.time, p.position.x(), p.position.y(), p.position.z(),
                   p.doppler, p.is_dynamic ? 1.0 : 0.0});
    }
  }
}

std::vector<RadarScan> read_radar_csv(const fs::path& path) {
  std::vector<RadarScan> scans;
  if (!fs::exists(path)) return scans;
  const CsvTable t = read_csv(path);
  for (const auto& r : t.rows) {
    if (scans.empty() || scans.back().time != r[0]) {
      scans.push_back({r[0], {}});
    }
    RadarPoint p;
    p.position = {r[1], r[2], r[3]};
    p.doppler = r[4];
    p.is_dynamic = r[5] != 0.0;
    scans.back().points.push_back(p);
  }
  return scans;
}

std::vector<TimedPose> to_timed_poses(const Trajectory& traj) {
  std::vector<TimedPose> out;
  out.reserve(traj.size());
  for (const auto& s : traj.samples()) out.push_back({s.time, s.pose4()});
  return out;
}

// Instantaneous true UGV-odometry -> UAV-odometry transform: each odometry
// frame is realigned to the world through the robot's current true pose.
std::vector<TimedPose> true_relative_series(const SimStreams& streams, double step) {
  std::vector<TimedPose> out;
  const double t0 = std::max(streams.truth_uav.start_time(), streams.truth_ugv.start_time());
  const double t1 = std::min(streams.truth_uav.end_time(), streams.truth_ugv.end_time());
  for (double t = t0; t <= t1 + 1e-9; t += step) {
    const SE3Transform rel = streams.odom_uav.interpolate(t) *
                             streams.truth_uav.interpolate(t).inverse() *
                             streams.truth_ugv.interpolate(t) *
                             streams.odom_ugv.interpolate(t).inverse();
    out.push_back({t, se3_to_pose4(rel)});
  }
  return out;
}

struct SolveTimes {
  std::vector<double> samples;
  void add(double t) { samples.push_back(t); }
  double mean() const {
    if (samples.empty()) return 0.0;
    double s = 0.0;
    for (double v : samples) s += v;
    return s / samples.size();
  }
  double stddev() const {
    if (samples.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : samples) s += (v - m) * (v - m);
    return std::sqrt(s / (samples.size() - 1));
  }
};

// Tracks the radar stream of one robot across keyframes.
struct RadarTracker {
  const std::vector<RadarScan>* scans = nullptr;
  std::vector<EgoVelocity> ego;  // per scan
  const Trajectory* odom = nullptr;
  SE3Transform extrinsic;
  EgoMode mode = EgoMode::aerial;

  bool have_prev = false;
  int prev_scan = -1;
  int prev_kf_index = -1;
  RadarScan prev_filtered;

  int nearest_usable_scan(double time, double tolerance, int min_points) const {
    if (!scans) return -1;
    int best = -1;
    double best_dt = tolerance;
    for (size_t i = 0; i < scans->size(); ++i) {
      if (static_cast<int>((*scans)[i].points.size()) < min_points) continue;
      const double dt = std::abs((*scans)[i].time - time);
      if (dt <= best_dt) {
        best_dt = dt;
        best = static_cast<int>(i);
      }
    }
    return best;
  }
};

uint64_t scan_seed(uint64_t base, double time, int robot) {
  return base ^ (std::bit_cast<uint64_t>(time) * 0x9e3779b97f4a7c15ULL) ^
         static_cast<uint64_t>(robot + 1);
}

// Moving average over the previous `window` entries (reporting only).
std::vector<Vec3> smooth_series(const std::vector<Vec3>& raw, int window) {
  std::vector<Vec3> out(raw.size(), Vec3::Zero());
  for (size_t i = 0; i < raw.size(); ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(window) ? i + 1 - window : 0;
    Vec3 acc = Vec3::Zero();
    for (size_t k = lo; k <= i; ++k) acc += raw[k];
    out[i] = acc / static_cast<double>(i - lo + 1);
  }
  return out;
}

void flatten_json(const json& j, const std::string& prefix, std::ostream& os) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten_json(*it, key, os);
    } else if (it->is_string()) {
      os << key << " = " << it->get<std::string>() << "\n";
    } else {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.9g", it->get<double>());
      os << key << " = " << buf << "\n";
    }
  }
}

RunSummary process(const SimStreams& streams, const RunConfig& config,
                   const PipelineOptions& options, const fs::path& out_dir,
                   const fs::path& measurement_dir) {
  const bool radar_on = config.radar.enabled && !options.no_radar;
  const bool rte_on = !options.no_rte;

  RteEstimator rte(config.rig, config.rte);
  MultiRobotGraph graph(2, config.graph);

  // Per-scan ego velocities (also the Fig. 8-style trace artifact).
  RadarTracker trackers[2];
  if (radar_on) {
    trackers[kUgv].scans = &streams.radar_ugv;
    trackers[kUgv].odom = &streams.odom_ugv;
    trackers[kUgv].extrinsic = config.rig.radar_extrinsic_ugv;
    trackers[kUgv].mode = EgoMode::ground;
    trackers[kUav].scans = &streams.radar_uav;
    trackers[kUav].odom = &streams.odom_uav;
    trackers[kUav].extrinsic = config.rig.radar_extrinsic_uav;
    trackers[kUav].mode = EgoMode::aerial;
    for (int r : {kUgv, kUav}) {
      RadarTracker& tracker = trackers[r];
      tracker.ego.resize(tracker.scans->size());
      for (size_t i = 0; i < tracker.scans->size(); ++i) {
        const RadarScan& scan = (*tracker.scans)[i];
        EgoConfig ego_config;
        ego_config.ransac_iterations = config.radar.ransac_iterations;
        ego_config.inlier_threshold = config.radar.inlier_threshold;
        ego_config.seed = scan_seed(config.seed, scan.time, r);
        ego_config.sensor_to_body = tracker.extrinsic.inverse().rotation;
        const TrajectorySample at = tracker.odom->sample_at(scan.time);
        tracker.ego[i] =
            estimate_ego_velocity(scan, at.roll, at.pitch, tracker.mode, ego_config);
      }
    }
  }

  // Time-ordered event stream.
  struct Event {
    double time;
    int priority;  // 0 odom_ugv, 1 odom_uav, 2 range, 3 rte tick
    int index;
  };
  std::vector<Event> events;
  for (size_t i = 0; i < streams.odom_ugv.size(); ++i) {
    events.push_back({streams.odom_ugv.samples()[i].time, 0, static_cast<int>(i)});
  }
  for (size_t i = 0; i < streams.odom_uav.size(); ++i) {
    events.push_back({streams.odom_uav.samples()[i].time, 1, static_cast<int>(i)});
  }
  for (size_t i = 0; i < streams.ranges.size(); ++i) {
    events.push_back({streams.ranges[i].time, 2, static_cast<int>(i)});
  }
  if (rte_on) {
    const double t0 = std::max(streams.odom_uav.start_time(), streams.odom_ugv.start_time());
    const double t1 = std::min(streams.odom_uav.end_time(), streams.odom_ugv.end_time());
    int k = 0;
    for (double t = t0; t <= t1 + 1e-9; t += 1.0 / config.rte.cadence_hz) {
      events.push_back({t, 3, k++});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.index < b.index;
  });

  std::vector<Transform4Estimate> estimates;
  SolveTimes rte_times, graph_times;
  int optimizations = 0;
  int radar_factors[2] = {0, 0};

  auto run_optimize = [&]() {
    const OptimizeResult r = graph.optimize();
    graph_times.add(r.report.wall_time_s);
    ++optimizations;
  };

  auto on_keyframe = [&](int robot, const KeyframeNode& node) {
    if (radar_on && trackers[robot].scans) {
      RadarTracker& tracker = trackers[robot];
      const double tol = 1.0 / config.radar.sim.rate_hz;
      const int scan_idx =
          tracker.nearest_usable_scan(node.timestamp, tol, config.radar.scan_match.min_points);
      if (scan_idx >= 0 && tracker.ego[scan_idx].valid()) {
        const RadarScan& scan = (*tracker.scans)[scan_idx];
        const EgoVelocity& ego = tracker.ego[scan_idx];
        RadarScan filtered = filter_scan(scan, ego, config.radar.filter_threshold);
        if (tracker.have_prev && tracker.prev_kf_index == node.index - 1 &&
            static_cast<int>(filtered.points.size()) >= config.radar.scan_match.min_points) {
          const RadarScan& prev_scan = (*tracker.scans)[tracker.prev_scan];
          const double dt = scan.time - prev_scan.time;
          // Rotation seeded from odometry, translation from Doppler velocity.
          const SE3Transform body_rel = tracker.odom->interpolate(prev_scan.time).inverse() *
                                        tracker.odom->interpolate(scan.time);
          const Mat3 xr = tracker.extrinsic.rotation;
          SE3Transform init;
          init.rotation = xr * body_rel.rotation * xr.transpose();
          init.translation = tracker.ego[tracker.prev_scan].v * dt;
          const ScanMatchResult match =
              scan_match(tracker.prev_filtered, filtered, init, config.radar.scan_match);
          if (match.converged) {
            const RadarOdometryFactor factor = make_odometry_factor(
                match, ego, tracker.extrinsic, config.radar.factor);
            // Scan times rarely coincide with keyframe times; bridge the
            // boundaries with odometry.
            const KeyframeNode& prev_kf = graph.keyframes(robot)[node.index - 1];
            const Pose4 lead = relative(tracker.odom->sample_at(prev_kf.timestamp).pose4(),
                                        tracker.odom->sample_at(prev_scan.time).pose4());
            const Pose4 tail = relative(tracker.odom->sample_at(scan.time).pose4(),
                                        tracker.odom->sample_at(node.timestamp).pose4());
            const Pose4 z = compose(compose(lead, factor.relative), tail);
            graph.add_relative_factor(robot, node.index - 1, node.index, z, factor.covariance);
            ++radar_factors[robot];
          }
        }
        tracker.have_prev = true;
        tracker.prev_scan = scan_idx;
        tracker.prev_kf_index = node.index;
        tracker.prev_filtered = std::move(filtered);
      }
    }
    run_optimize();
  };

  const auto wall_start = std::chrono::steady_clock::now();
  const double first_event_time = events.empty() ? 0.0 : events.front().time;

  for (const Event& event : events) {
    if (options.paced) {
      const auto target = wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(event.time - first_event_time));
      std::this_thread::sleep_until(target);
    }
    switch (event.priority) {
      case 0: {
        const TrajectorySample& s = streams.odom_ugv.samples()[event.index];
        rte.feed_odometry_ugv(s);
        if (auto node = graph.add_keyframe(kUgv, s.pose4(), s.time)) on_keyframe(kUgv, *node);
        break;
      }
      case 1: {
        const TrajectorySample& s = streams.odom_uav.samples()[event.index];
        rte.feed_odometry_uav(s);
        if (auto node = graph.add_keyframe(kUav, s.pose4(), s.time)) on_keyframe(kUav, *node);
        break;
      }
      case 2:
        rte.feed_range(streams.ranges[event.index]);
        break;
      case 3: {
        const auto t_begin = std::chrono::steady_clock::now();
        std::optional<RtePrior> prior;
        if (config.rte_use_prior) prior = config.rte_prior;
        auto est = rte.update(event.time, prior);
        if (est) {
          rte_times.add(std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
                            .count());
          estimates.push_back(*est);
          if (graph.add_encounter(*est, kUav, kUgv)) run_optimize();
        }
        break;
      }
    }
  }
  if (!graph.keyframes(kUgv).empty() || !graph.keyframes(kUav).empty()) run_optimize();

  // ----- artifacts -----
  fs::create_directories(out_dir);

  {
    CsvWriter w(out_dir / "rte_estimates.csv",
                {"time", "x", "y", "z", "yaw", "cov_xx", "cov_yy", "cov_zz", "cov_tt",
                 "residuals", "span_uav", "span_ugv"});
    for (const auto& e : estimates) {
      w.write_row({e.timestamp, e.transform.x, e.transform.y, e.transform.z,
                   e.transform.theta, e.covariance(0, 0), e.covariance(1, 1),
                   e.covariance(2, 2), e.covariance(3, 3),
                   static_cast<double>(e.residual_count), e.window_span_uav,
                   e.window_span_ugv});
    }
  }

  if (radar_on) {
    for (int r : {kUgv, kUav}) {
      const RadarTracker& tracker = trackers[r];
      std::vector<Vec3> raw;
      for (const auto& e : tracker.ego) raw.push_back(e.valid() ? e.v : Vec3::Zero());
      const std::vector<Vec3> smooth = smooth_series(raw, 10);
      CsvWriter w(out_dir / (r == kUgv ? "ego_velocity_ugv.csv" : "ego_velocity_uav.csv"),
                  {"time", "vx", "vy", "vz", "inliers", "vx_smooth", "vy_smooth", "vz_smooth"});
      for (size_t i = 0; i < tracker.ego.size(); ++i) {
        w.write_row({(*tracker.scans)[i].time, raw[i].x(), raw[i].y(), raw[i].z(),
                     static_cast<double>(tracker.ego[i].inlier_count), smooth[i].x(),
                     smooth[i].y(), smooth[i].z()});
      }
    }
  }

  for (int r : {kUgv, kUav}) {
    CsvWriter w(out_dir / (r == kUgv ? "optimized_ugv.csv" : "optimized_uav.csv"),
                {"time", "x", "y", "z", "yaw"});
    for (const auto& g : graph.export_global_trajectories(r)) {
      w.write_row({g.time, g.pose.x, g.pose.y, g.pose.z, g.pose.theta});
    }
  }

  {
    std::ofstream g(out_dir / "graph.txt", std::ios::trunc);
    graph.dump(g);
  }

  // ----- metrics -----
  json metrics;
  metrics["mission"] = {{"kind", config.mission.kind == MissionKind::coordinated ? "coordinated"
                                 : config.mission.kind == MissionKind::divergent
                                     ? "divergent"
                                     : "custom_waypoints"},
                        {"duration_s", config.mission.duration_s},
                        {"seed", static_cast<double>(config.seed)}};

  {
    std::vector<double> measured, truth;
    for (const auto& m : streams.ranges) {
      const Vec3* tag = nullptr;
      const Vec3* anchor = nullptr;
      for (const auto& t : config.rig.tags)
        if (t.id == m.tag_id) tag = &t.position;
      for (const auto& a : config.rig.anchors)
        if (a.id == m.anchor_id) anchor = &a.position;
      if (!tag || !anchor) continue;
      if (!streams.truth_uav.covers(m.time) || !streams.truth_ugv.covers(m.time)) continue;
      measured.push_back(m.distance);
      truth.push_back((streams.truth_uav.interpolate(m.time) * (*tag) -
                       streams.truth_ugv.interpolate(m.time) * (*anchor))
                          .norm());
    }
    if (measured.size() >= 2) {
      const RangeStats stats = range_stats(measured, truth);
      metrics["uwb"] = {{"count", static_cast<double>(stats.count)},
                        {"mbe_m", stats.mbe},
                        {"sigma_m", stats.sigma},
                        {"rmse_m", stats.rmse}};
    }
  }

  {
    const std::vector<TimedPose> truth_rel = true_relative_series(streams, 0.5);
    const TransformErrorTrace trace = transform_rmse_trace(estimates, truth_rel);
    {
      CsvWriter w(out_dir / "rte_error_trace.csv",
                  {"time", "translation_error_m", "rotation_error_deg"});
      for (size_t i = 0; i < trace.times.size(); ++i) {
        w.write_row({trace.times[i], trace.translation_m[i], trace.rotation_deg[i]});
      }
    }
    const double duration = config.mission.duration_s;
    const double steady_from =
        first_event_time + (1.0 - config.metrics.steady_state_fraction) * duration;
    const double settle = settle_time(trace.times, trace.translation_m,
                                      config.metrics.convergence_threshold_m);
    const double first_t = trace.times.empty() ? -1.0 : trace.times.front();
    double mean_t = 0.0, mean_r = 0.0;
    for (size_t i = 0; i < trace.times.size(); ++i) {
      mean_t += trace.translation_m[i];
      mean_r += trace.rotation_deg[i];
    }
    if (!trace.times.empty()) {
      mean_t /= trace.times.size();
      mean_r /= trace.times.size();
    }
    metrics["rte"] = {
        {"enabled", rte_on ? 1.0 : 0.0},
        {"estimate_count", static_cast<double>(estimates.size())},
        {"first_estimate_time_s", first_t},
        {"settle_time_s", std::isfinite(settle) ? settle : -1.0},
        {"convergence_threshold_m", config.metrics.convergence_threshold_m},
        {"converged_within_quarter",
         (std::isfinite(settle) && first_t >= 0.0 && settle - first_t <= 0.25 * duration)
             ? 1.0
             : 0.0},
        {"steady_state_from_s", steady_from},
        {"steady_state_translation_rmse_m",
         rms_after(trace.times, trace.translation_m, steady_from)},
        {"steady_state_yaw_rmse_deg", rms_after(trace.times, trace.rotation_deg, steady_from)},
        {"mean_translation_error_m", mean_t},
        {"mean_rotation_error_deg", mean_r}};
  }

  {
    json ate;
    const std::vector<TimedPose> truth_series[2] = {to_timed_poses(streams.truth_ugv),
                                                    to_timed_poses(streams.truth_uav)};
    const std::vector<TimedPose> odom_series[2] = {to_timed_poses(streams.odom_ugv),
                                                   to_timed_poses(streams.odom_uav)};
    for (int r : {kUgv, kUav}) {
      const char* name = r == kUgv ? "ugv" : "uav";
      json entry;
      const TrajectoryError odo = trajectory_error(odom_series[r], truth_series[r]);
      entry["odometry_m"] = odo.ate_translation;
      entry["odometry_yaw_rmse_deg"] = odo.yaw_rmse_deg;
      std::vector<TimedPose> optimized;
      for (const auto& g : graph.export_global_trajectories(r)) {
        optimized.push_back({g.time, g.pose});
      }
      if (!optimized.empty()) {
        const TrajectoryError opt = trajectory_error(optimized, truth_series[r]);
        entry["optimized_m"] = opt.ate_translation;
        entry["optimized_yaw_rmse_deg"] = opt.yaw_rmse_deg;
      }
      ate[name] = entry;
    }
    metrics["ate"] = ate;
  }

  metrics["graph"] = {
      {"keyframes_ugv", static_cast<double>(graph.keyframes(kUgv).size())},
      {"keyframes_uav", static_cast<double>(graph.keyframes(kUav).size())},
      {"encounters", static_cast<double>(graph.encounter_count())},
      {"encounters_dropped", static_cast<double>(graph.dropped_encounters())},
      {"optimizations", static_cast<double>(optimizations)},
      {"radar_factors_ugv", static_cast<double>(radar_factors[kUgv])},
      {"radar_factors_uav", static_cast<double>(radar_factors[kUav])}};

  {
    json inputs;
    inputs["uwb_hash"] = hash_file(measurement_dir / "uwb_ranges.csv");
    if (radar_on) {
      inputs["radar_ugv_hash"] = hash_file(measurement_dir / "radar_ugv.csv");
      inputs["radar_uav_hash"] = hash_file(measurement_dir / "radar_uav.csv");
    }
    metrics["inputs"] = inputs;
  }

  RunSummary summary;
  summary.artifact_dir = out_dir;
  summary.metrics_json = metrics.dump(2) + "\n";
  {
    std::ofstream mj(out_dir / "metrics.json", std::ios::trunc);
    mj << summary.metrics_json;
    std::ofstream mt(out_dir / "metrics.txt", std::ios::trunc);
    flatten_json(metrics, "", mt);
  }

  summary.timing.rte_mean_s = rte_times.mean();
  summary.timing.rte_std_s = rte_times.stddev();
  summary.timing.rte_count = static_cast<int>(rte_times.samples.size());
  summary.timing.graph_mean_s = graph_times.mean();
  summary.timing.graph_std_s = graph_times.stddev();
  summary.timing.graph_count = static_cast<int>(graph_times.samples.size());
  {
    std::ofstream tt(out_dir / "timing.txt", std::ios::trunc);
    tt << "rte_solve_mean_s = " << summary.timing.rte_mean_s << "\n"
       << "rte_solve_std_s = " << summary.timing.rte_std_s << "\n"
       << "rte_solve_count = " << summary.timing.rte_count << "\n"
       << "graph_solve_mean_s = " << summary.timing.graph_mean_s << "\n"
       << "graph_solve_std_s = " << summary.timing.graph_std_s << "\n"
       << "graph_solve_count = " << summary.timing.graph_count << "\n";
  }
  return summary;
}

}  // namespace

double RunSummary::metric(const std::string& dotted_key) const {
  json j = json::parse(metrics_json);
  const json* node = &j;
  std::stringstream ss(dotted_key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw std::runtime_error("metric not found: " + dotted_key);
    }
    node = &node->at(part);
  }
  if (!node->is_number()) throw std::runtime_error("metric is not numeric: " + dotted_key);
  return node->get<double>();
}

bool RunSummary::has_metric(const std::string& dotted_key) const {
  try {
    metric(dotted_key);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

SimStreams simulate(const RunConfig& config) {
  SimStreams streams;
  const MissionTrajectories mission = generate_mission(config.mission, config.sim_dt);
  streams.truth_uav = mission.uav;
  streams.truth_ugv = mission.ugv;
  streams.odom_uav = apply_odometry_drift(mission.uav, config.drift_rate, config.seed ^ 0x11);
  streams.odom_ugv = apply_odometry_drift(mission.ugv, config.drift_rate, config.seed ^ 0x22);
  streams.ranges = synthesize_uwb(mission.uav, mission.ugv, config.rig, config.uwb,
                                  config.uwb_rate_hz, config.seed ^ 0x33);
  if (config.radar.enabled) {
    const RadarEnvironment env = RadarEnvironment::default_environment(config.seed ^ 0x44);
    streams.radar_uav = synthesize_radar(mission.uav, env, config.rig.radar_extrinsic_uav,
                                         config.radar.sim, config.seed ^ 0x55);
    streams.radar_ugv = synthesize_radar(mission.ugv, env, config.rig.radar_extrinsic_ugv,
                                         config.radar.sim, config.seed ^ 0x66);
  }
  return streams;
}

RunSummary run_simulation(const RunConfig& config, const PipelineOptions& options) {
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  const SimStreams streams = simulate(config);
  {
    std::ofstream c(out_dir / "config.json", std::ios::trunc);
    c << config_to_json(config);
  }
  write_trajectory_csv(out_dir / "truth_uav.csv", streams.truth_uav);
  write_trajectory_csv(out_dir / "truth_ugv.csv", streams.truth_ugv);
  write_trajectory_csv(out_dir / "odometry_uav.csv", streams.odom_uav);
  write_trajectory_csv(out_dir / "odometry_ugv.csv", streams.odom_ugv);
  {
    CsvWriter w(out_dir / "uwb_ranges.csv", {"time", "tag_id", "anchor_id", "distance", "sigma"});
    for (const auto& m : streams.ranges) {
      w.write_row({m.time, static_cast<double>(m.tag_id), static_cast<double>(m.anchor_id),
                   m.distance, m.sigma});
    }
  }
  if (config.radar.enabled) {
    write_radar_csv(out_dir / "radar_uav.csv", streams.radar_uav);
    write_radar_csv(out_dir / "radar_ugv.csv", streams.radar_ugv);
  }
  return process(streams, config, options, out_dir, out_dir);
}

RunSummary run_replay(const std::filesystem::path& measurements_dir,
                      const RunConfig& config, const PipelineOptions& options) {
  auto need = [&](const char* name) {
    const fs::path p = measurements_dir / name;
    if (!fs::exists(p)) {
      throw std::runtime_error("replay: missing input file: " + p.string());
    }
    return p;
  };
  SimStreams streams;
  streams.truth_uav = read_trajectory_csv(need("truth_uav.csv"));
  streams.truth_ugv = read_trajectory_csv(need("truth_ugv.csv"));
  streams.odom_uav = read_trajectory_csv(need("odometry_uav.csv"));
  streams.odom_ugv = read_trajectory_csv(need("odometry_ugv.csv"));
  {
    const CsvTable t = read_csv(need("uwb_ranges.csv"));
    for (const auto& r : t.rows) {
      streams.ranges.push_back({r[0], static_cast<int>(r[1]), static_cast<int>(r[2]), r[3], r[4]});
    }
  }
  if (config.radar.enabled && !options.no_radar) {
    streams.radar_uav = read_radar_csv(measurements_dir / "radar_uav.csv");
    streams.radar_ugv = read_radar_csv(measurements_dir / "radar_ugv.csv");
  }
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  return process(streams, config, options, out_dir, measurements_dir);
}

std::vector<std::string> check_assertions(const RunConfig& config,
                                          const RunSummary& summary) {
  std::vector<std::string> failures;
  for (const auto& [key, bound] : config.assertions) {
    double value = 0.0;
    try {
      value = summary.metric(key);
    } catch (const std::exception& e) {
      failures.push_back(e.what());
      continue;
    }
    if (value < bound.min || value > bound.max) {
      std::ostringstream os;
      os << key << " = " << value << " outside [" << bound.min << ", " << bound.max << "]";
      failures.push_back(os.str());
    }
  }
  return failures;
}

}  // namespace rloc
