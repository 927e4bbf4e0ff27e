#include "rloc/config.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rloc {

namespace {

using nlohmann::json;

constexpr double kDeg2Rad = std::numbers::pi / 180.0;

// Tracks which keys of one JSON object were consumed so leftovers can be
// reported as schema errors.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  double number(const std::string& key, double def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    return v.get<int>();
  }

  uint64_t unsigned64(const std::string& key, uint64_t def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      throw ConfigError(field(key) + ": expected an integer");
    }
    return v.get<uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const std::string& key, const Vec3& def) {
    if (!mark(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number()) {
      throw ConfigError(field(key) + ": expected an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  const json* array(const std::string& key) {
    if (!mark(key)) return nullptr;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + ": expected an array");
    return &v;
  }

  const json* object(const std::string& key) {
    if (!mark(key)) return nullptr;
    const json& v = j_.at(key);
    if (!v.is_object()) throw ConfigError(field(key) + ": expected an object");
    return &v;
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(field(it.key()) + ": unknown key");
      }
    }
  }

 private:
  bool mark(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError(field + ": must be > 0");
}

void require_non_negative(double v, const std::string& field) {
  if (v < 0.0) throw ConfigError(field + ": must be >= 0");
}

std::vector<Waypoint> parse_waypoints(const json* arr, const std::string& path) {
  std::vector<Waypoint> out;
  if (!arr) return out;
  for (size_t i = 0; i < arr->size(); ++i) {
    Section s((*arr)[i], path + "[" + std::to_string(i) + "]");
    Waypoint w;
    w.time = s.number("time_s", 0.0);
    w.position = s.vec3("position", Vec3::Zero());
    s.finish();
    out.push_back(w);
  }
  return out;
}

SE3Transform parse_mount(const json* obj, const std::string& path,
                         const SE3Transform& def_extrinsic) {
  if (!obj) return def_extrinsic;
  Section s(*obj, path);
  const Vec3 t = s.vec3("translation", Vec3::Zero());
  const Vec3 rpy = s.vec3("rpy_deg", Vec3::Zero());
  s.finish();
  const SE3Transform mount = SE3Transform::from_rpy(
      rpy.x() * kDeg2Rad, rpy.y() * kDeg2Rad, rpy.z() * kDeg2Rad, t);
  return mount.inverse();  // stored as body -> sensor
}

json mount_to_json(const SE3Transform& extrinsic) {
  const SE3Transform mount = extrinsic.inverse();
  const double yaw = std::atan2(mount.rotation(1, 0), mount.rotation(0, 0));
  const double pitch = std::asin(std::clamp(-mount.rotation(2, 0), -1.0, 1.0));
  const double roll = std::atan2(mount.rotation(2, 1), mount.rotation(2, 2));
  return {{"translation",
           {mount.translation.x(), mount.translation.y(), mount.translation.z()}},
          {"rpy_deg", {roll / kDeg2Rad, pitch / kDeg2Rad, yaw / kDeg2Rad}}};
}

}  // namespace

RunConfig default_config() {
  RunConfig config;
  config.rig = SensorRig::default_rig();
  config.graph.encounter_max_dt = 1.5;
  // The injected wheel drift is systematic (scale bias), which a random-walk
  // factor model understates; inflate so radar and encounters can correct it.
  config.graph.odom_sigma_scale = 0.05;
  return config;
}

RunConfig parse_config(const std::string& json_text) {
  json root_json;
  try {
    root_json = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig config = default_config();
  Section root(root_json, "config");

  config.seed = root.unsigned64("seed", config.seed);
  config.output_dir = root.text("output_dir", config.output_dir);
  config.sim_dt = root.number("sim_dt_s", config.sim_dt);
  require_positive(config.sim_dt, "config.sim_dt_s");

  if (const json* m = root.object("mission")) {
    Section s(*m, "config.mission");
    const std::string kind = s.text("kind", "coordinated");
    if (kind == "coordinated") {
      config.mission.kind = MissionKind::coordinated;
    } else if (kind == "divergent") {
      config.mission.kind = MissionKind::divergent;
    } else if (kind == "custom_waypoints") {
      config.mission.kind = MissionKind::custom_waypoints;
    } else {
      throw ConfigError(
          "config.mission.kind: must be coordinated, divergent or custom_waypoints");
    }
    MissionSpec& ms = config.mission;
    ms.duration_s = s.number("duration_s", ms.duration_s);
    require_non_negative(ms.duration_s, "config.mission.duration_s");
    ms.ugv_speed = s.number("ugv_speed_mps", ms.ugv_speed);
    ms.survey_leg = s.number("survey_leg_m", ms.survey_leg);
    ms.survey_turn_radius = s.number("survey_turn_radius_m", ms.survey_turn_radius);
    ms.survey_start = s.vec3("survey_start", ms.survey_start);
    ms.circle_radius = s.number("circle_radius_m", ms.circle_radius);
    ms.divergent_ugv_speed = s.number("divergent_ugv_speed_mps", ms.divergent_ugv_speed);
    ms.uav_lateral_offset = s.number("uav_lateral_offset_m", ms.uav_lateral_offset);
    ms.uav_base_altitude = s.number("uav_base_altitude_m", ms.uav_base_altitude);
    ms.uav_altitude_amplitude = s.number("uav_altitude_amplitude_m", ms.uav_altitude_amplitude);
    ms.uav_altitude_period_s = s.number("uav_altitude_period_s", ms.uav_altitude_period_s);
    ms.divergent_min_separation =
        s.number("divergent_min_separation_m", ms.divergent_min_separation);
    ms.divergent_max_separation =
        s.number("divergent_max_separation_m", ms.divergent_max_separation);
    ms.divergent_altitude = s.number("divergent_altitude_m", ms.divergent_altitude);
    ms.divergent_altitude_amplitude =
        s.number("divergent_altitude_amplitude_m", ms.divergent_altitude_amplitude);
    ms.ugv_waypoints = parse_waypoints(s.array("ugv_waypoints"), "config.mission.ugv_waypoints");
    ms.uav_waypoints = parse_waypoints(s.array("uav_waypoints"), "config.mission.uav_waypoints");
    s.finish();
  }

  if (const json* r = root.object("rig")) {
    Section s(*r, "config.rig");
    auto parse_nodes = [&](const json* arr, const std::string& path,
                           std::vector<SensorRig::Node>& nodes) {
      if (!arr) return;
      nodes.clear();
      std::set<int> ids;
      for (size_t i = 0; i < arr->size(); ++i) {
        Section ns((*arr)[i], path + "[" + std::to_string(i) + "]");
        SensorRig::Node node;
        node.id = ns.integer("id", static_cast<int>(i));
        node.position = ns.vec3("position", Vec3::Zero());
        ns.finish();
        if (!ids.insert(node.id).second) {
          throw ConfigError(path + ": duplicate id " + std::to_string(node.id));
        }
        nodes.push_back(node);
      }
      if (nodes.empty()) throw ConfigError(path + ": must be non-empty");
    };
    parse_nodes(s.array("tags"), "config.rig.tags", config.rig.tags);
    parse_nodes(s.array("anchors"), "config.rig.anchors", config.rig.anchors);
    config.rig.radar_extrinsic_ugv =
        parse_mount(s.object("radar_mount_ugv"), "config.rig.radar_mount_ugv",
                    config.rig.radar_extrinsic_ugv);
    config.rig.radar_extrinsic_uav =
        parse_mount(s.object("radar_mount_uav"), "config.rig.radar_mount_uav",
                    config.rig.radar_extrinsic_uav);
    s.finish();
  }

  if (const json* u = root.object("uwb")) {
    Section s(*u, "config.uwb");
    config.uwb.sigma = s.number("sigma_m", config.uwb.sigma);
    require_non_negative(config.uwb.sigma, "config.uwb.sigma_m");
    config.uwb.bias = s.number("bias_m", config.uwb.bias);
    config.uwb.dropout_probability =
        s.number("dropout_probability", config.uwb.dropout_probability);
    if (config.uwb.dropout_probability < 0.0 || config.uwb.dropout_probability > 1.0) {
      throw ConfigError("config.uwb.dropout_probability: must be in [0, 1]");
    }
    config.uwb_rate_hz = s.number("rate_hz", config.uwb_rate_hz);
    require_positive(config.uwb_rate_hz, "config.uwb.rate_hz");
    s.finish();
  }

  if (const json* o = root.object("odometry")) {
    Section s(*o, "config.odometry");
    config.drift_rate = s.number("drift_rate", config.drift_rate);
    require_non_negative(config.drift_rate, "config.odometry.drift_rate");
    s.finish();
  }

  if (const json* r = root.object("radar")) {
    Section s(*r, "config.radar");
    config.radar.enabled = s.boolean("enabled", config.radar.enabled);
    config.radar.sim.rate_hz = s.number("rate_hz", config.radar.sim.rate_hz);
    config.radar.sim.fov_azimuth_deg =
        s.number("fov_azimuth_deg", config.radar.sim.fov_azimuth_deg);
    config.radar.sim.fov_elevation_deg =
        s.number("fov_elevation_deg", config.radar.sim.fov_elevation_deg);
    config.radar.sim.max_range = s.number("max_range_m", config.radar.sim.max_range);
    config.radar.sim.position_noise =
        s.number("position_noise_m", config.radar.sim.position_noise);
    config.radar.sim.doppler_noise =
        s.number("doppler_noise_mps", config.radar.sim.doppler_noise);
    config.radar.filter_threshold =
        s.number("filter_threshold_mps", config.radar.filter_threshold);
    config.radar.ransac_iterations =
        s.integer("ransac_iterations", config.radar.ransac_iterations);
    config.radar.inlier_threshold =
        s.number("inlier_threshold_mps", config.radar.inlier_threshold);
    if (const json* f = s.object("factor")) {
      Section fs(*f, "config.radar.factor");
      config.radar.factor.base_translation_sigma =
          fs.number("translation_sigma_m", config.radar.factor.base_translation_sigma);
      config.radar.factor.base_yaw_sigma =
          fs.number("yaw_sigma_rad", config.radar.factor.base_yaw_sigma);
      config.radar.factor.vertical_inflation =
          fs.number("vertical_inflation", config.radar.factor.vertical_inflation);
      config.radar.factor.fitness_reference =
          fs.number("fitness_reference", config.radar.factor.fitness_reference);
      fs.finish();
    }
    s.finish();
  }

  if (const json* r = root.object("rte")) {
    Section s(*r, "config.rte");
    RteConfig& rc = config.rte;
    rc.min_window_m = s.number("min_window_m", rc.min_window_m);
    rc.max_window_m = s.number("max_window_m", rc.max_window_m);
    if (!(rc.max_window_m > rc.min_window_m) || !(rc.min_window_m > 0.0)) {
      throw ConfigError("config.rte: window bounds must satisfy 0 < min < max");
    }
    rc.cadence_hz = s.number("cadence_hz", rc.cadence_hz);
    require_positive(rc.cadence_hz, "config.rte.cadence_hz");
    rc.min_residuals = s.integer("min_residuals", rc.min_residuals);
    rc.gating_enabled = s.boolean("gating_enabled", rc.gating_enabled);
    rc.gate_sigma_factor = s.number("gate_sigma_factor", rc.gate_sigma_factor);
    rc.gate_slack_m = s.number("gate_slack_m", rc.gate_slack_m);
    rc.yaw_seeds = s.integer("yaw_seeds", rc.yaw_seeds);
    rc.z_mirror_seeds = s.boolean("z_mirror_seeds", rc.z_mirror_seeds);
    rc.tie_break_fraction = s.number("tie_break_fraction", rc.tie_break_fraction);
    config.rte_use_prior = s.boolean("use_prior", config.rte_use_prior);
    if (const json* p = s.object("prior")) {
      Section ps(*p, "config.rte.prior");
      if (const json* t = ps.array("transform")) {
        if (t->size() != 4) throw ConfigError("config.rte.prior.transform: expected 4 numbers");
        config.rte_prior.transform =
            Pose4{(*t)[0].get<double>(), (*t)[1].get<double>(), (*t)[2].get<double>(),
                  (*t)[3].get<double>()};
      }
      if (const json* sig = ps.array("sigma")) {
        if (sig->size() != 4) throw ConfigError("config.rte.prior.sigma: expected 4 numbers");
        const Vec4 v{(*sig)[0].get<double>(), (*sig)[1].get<double>(),
                     (*sig)[2].get<double>(), (*sig)[3].get<double>()};
        config.rte_prior.covariance = (v.array() * v.array()).matrix().asDiagonal();
      }
      ps.finish();
    }
    s.finish();
  }

  if (const json* g = root.object("graph")) {
    Section s(*g, "config.graph");
    GraphConfig& gc = config.graph;
    gc.keyframe_spacing_m = s.number("keyframe_spacing_m", gc.keyframe_spacing_m);
    require_positive(gc.keyframe_spacing_m, "config.graph.keyframe_spacing_m");
    gc.window_keyframes = s.integer("window_keyframes", gc.window_keyframes);
    gc.encounter_max_dt = s.number("encounter_max_dt_s", gc.encounter_max_dt);
    gc.start_prior_sigma = s.number("start_prior_sigma", gc.start_prior_sigma);
    gc.gauge_prior_weight = s.number("gauge_prior_weight", gc.gauge_prior_weight);
    gc.anchor_regularization_sigma =
        s.number("anchor_regularization_sigma", gc.anchor_regularization_sigma);
    gc.encounter_covariance_inflation =
        s.number("encounter_covariance_inflation", gc.encounter_covariance_inflation);
    gc.odom_sigma_scale = s.number("odom_sigma_scale", gc.odom_sigma_scale);
    gc.odom_yaw_sigma_base = s.number("odom_yaw_sigma_base", gc.odom_yaw_sigma_base);
    gc.odom_yaw_sigma_scale = s.number("odom_yaw_sigma_scale", gc.odom_yaw_sigma_scale);
    s.finish();
  }

  if (const json* so = root.object("solver")) {
    Section s(*so, "config.solver");
    SolverOptions opts;
    opts.max_iterations = s.integer("max_iterations", opts.max_iterations);
    if (opts.max_iterations < 1) throw ConfigError("config.solver.max_iterations: must be >= 1");
    opts.initial_lambda = s.number("initial_lambda", opts.initial_lambda);
    opts.relative_cost_tolerance =
        s.number("relative_cost_tolerance", opts.relative_cost_tolerance);
    opts.gradient_tolerance = s.number("gradient_tolerance", opts.gradient_tolerance);
    opts.use_analytic_jacobians =
        s.boolean("use_analytic_jacobians", opts.use_analytic_jacobians);
    opts.huber_delta = s.number("huber_delta", opts.huber_delta);
    s.finish();
    config.rte.solver = opts;
    config.graph.solver = opts;
  }

  if (const json* m = root.object("metrics")) {
    Section s(*m, "config.metrics");
    config.metrics.steady_state_fraction =
        s.number("steady_state_fraction", config.metrics.steady_state_fraction);
    if (config.metrics.steady_state_fraction <= 0.0 ||
        config.metrics.steady_state_fraction >= 1.0) {
      throw ConfigError("config.metrics.steady_state_fraction: must be in (0, 1)");
    }
    config.metrics.convergence_threshold_m =
        s.number("convergence_threshold_m", config.metrics.convergence_threshold_m);
    s.finish();
  }

  if (const json* a = root.object("assertions")) {
    for (auto it = a->begin(); it != a->end(); ++it) {
      Section s(it.value(), "config.assertions." + it.key());
      AssertionBound bound;
      bound.min = s.number("min", bound.min);
      bound.max = s.number("max", bound.max);
      s.finish();
      config.assertions[it.key()] = bound;
    }
  }

  root.finish();
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["output_dir"] = config.output_dir;
  j["sim_dt_s"] = config.sim_dt;

  const char* kind = config.mission.kind == MissionKind::coordinated ? "coordinated"
                     : config.mission.kind == MissionKind::divergent ? "divergent"
                                                                     : "custom_waypoints";
  json waypoints_ugv = json::array(), waypoints_uav = json::array();
  for (const auto& w : config.mission.ugv_waypoints) {
    waypoints_ugv.push_back(
        {{"time_s", w.time}, {"position", {w.position.x(), w.position.y(), w.position.z()}}});
  }
  for (const auto& w : config.mission.uav_waypoints) {
    waypoints_uav.push_back(
        {{"time_s", w.time}, {"position", {w.position.x(), w.position.y(), w.position.z()}}});
  }
  j["mission"] = {{"kind", kind},
                  {"duration_s", config.mission.duration_s},
                  {"ugv_speed_mps", config.mission.ugv_speed},
                  {"survey_leg_m", config.mission.survey_leg},
                  {"survey_turn_radius_m", config.mission.survey_turn_radius},
                  {"survey_start",
                   {config.mission.survey_start.x(), config.mission.survey_start.y(),
                    config.mission.survey_start.z()}},
                  {"circle_radius_m", config.mission.circle_radius},
                  {"divergent_ugv_speed_mps", config.mission.divergent_ugv_speed},
                  {"uav_lateral_offset_m", config.mission.uav_lateral_offset},
                  {"uav_base_altitude_m", config.mission.uav_base_altitude},
                  {"uav_altitude_amplitude_m", config.mission.uav_altitude_amplitude},
                  {"uav_altitude_period_s", config.mission.uav_altitude_period_s},
                  {"divergent_min_separation_m", config.mission.divergent_min_separation},
                  {"divergent_max_separation_m", config.mission.divergent_max_separation},
                  {"divergent_altitude_m", config.mission.divergent_altitude},
                  {"divergent_altitude_amplitude_m", config.mission.divergent_altitude_amplitude},
                  {"ugv_waypoints", waypoints_ugv},
                  {"uav_waypoints", waypoints_uav}};

  json tags = json::array(), anchors = json::array();
  for (const auto& t : config.rig.tags) {
    tags.push_back({{"id", t.id}, {"position", {t.position.x(), t.position.y(), t.position.z()}}});
  }
  for (const auto& a : config.rig.anchors) {
    anchors.push_back(
        {{"id", a.id}, {"position", {a.position.x(), a.position.y(), a.position.z()}}});
  }
  j["rig"] = {{"tags", tags},
              {"anchors", anchors},
              {"radar_mount_ugv", mount_to_json(config.rig.radar_extrinsic_ugv)},
              {"radar_mount_uav", mount_to_json(config.rig.radar_extrinsic_uav)}};

  j["uwb"] = {{"sigma_m", config.uwb.sigma},
              {"bias_m", config.uwb.bias},
              {"dropout_probability", config.uwb.dropout_probability},
              {"rate_hz", config.uwb_rate_hz}};
  j["odometry"] = {{"drift_rate", config.drift_rate}};
  j["radar"] = {{"enabled", config.radar.enabled},
                {"rate_hz", config.radar.sim.rate_hz},
                {"fov_azimuth_deg", config.radar.sim.fov_azimuth_deg},
                {"fov_elevation_deg", config.radar.sim.fov_elevation_deg},
                {"max_range_m", config.radar.sim.max_range},
                {"position_noise_m", config.radar.sim.position_noise},
                {"doppler_noise_mps", config.radar.sim.doppler_noise},
                {"filter_threshold_mps", config.radar.filter_threshold},
                {"ransac_iterations", config.radar.ransac_iterations},
                {"inlier_threshold_mps", config.radar.inlier_threshold},
                {"factor",
                 {{"translation_sigma_m", config.radar.factor.base_translation_sigma},
                  {"yaw_sigma_rad", config.radar.factor.base_yaw_sigma},
                  {"vertical_inflation", config.radar.factor.vertical_inflation},
                  {"fitness_reference", config.radar.factor.fitness_reference}}}};

  const Vec4 prior_sigma = config.rte_prior.covariance.diagonal().cwiseSqrt();
  j["rte"] = {{"min_window_m", config.rte.min_window_m},
              {"max_window_m", config.rte.max_window_m},
              {"cadence_hz", config.rte.cadence_hz},
              {"min_residuals", config.rte.min_residuals},
              {"gating_enabled", config.rte.gating_enabled},
              {"gate_sigma_factor", config.rte.gate_sigma_factor},
              {"gate_slack_m", config.rte.gate_slack_m},
              {"yaw_seeds", config.rte.yaw_seeds},
              {"z_mirror_seeds", config.rte.z_mirror_seeds},
              {"tie_break_fraction", config.rte.tie_break_fraction},
              {"use_prior", config.rte_use_prior},
              {"prior",
               {{"transform",
                 {config.rte_prior.transform.x, config.rte_prior.transform.y,
                  config.rte_prior.transform.z, config.rte_prior.transform.theta}},
                {"sigma", {prior_sigma[0], prior_sigma[1], prior_sigma[2], prior_sigma[3]}}}}};

  j["graph"] = {{"keyframe_spacing_m", config.graph.keyframe_spacing_m},
                {"window_keyframes", config.graph.window_keyframes},
                {"encounter_max_dt_s", config.graph.encounter_max_dt},
                {"start_prior_sigma", config.graph.start_prior_sigma},
                {"gauge_prior_weight", config.graph.gauge_prior_weight},
                {"anchor_regularization_sigma", config.graph.anchor_regularization_sigma},
                {"encounter_covariance_inflation", config.graph.encounter_covariance_inflation},
                {"odom_sigma_scale", config.graph.odom_sigma_scale},
                {"odom_yaw_sigma_base", config.graph.odom_yaw_sigma_base},
                {"odom_yaw_sigma_scale", config.graph.odom_yaw_sigma_scale}};

  j["solver"] = {{"max_iterations", config.rte.solver.max_iterations},
                 {"initial_lambda", config.rte.solver.initial_lambda},
                 {"relative_cost_tolerance", config.rte.solver.relative_cost_tolerance},
                 {"gradient_tolerance", config.rte.solver.gradient_tolerance},
                 {"use_analytic_jacobians", config.rte.solver.use_analytic_jacobians},
                 {"huber_delta", config.rte.solver.huber_delta}};

  j["metrics"] = {{"steady_state_fraction", config.metrics.steady_state_fraction},
                  {"convergence_threshold_m", config.metrics.convergence_threshold_m}};

  json asserts = json::object();
  for (const auto& [key, bound] : config.assertions) {
    json b = json::object();
    if (std::isfinite(bound.min)) b["min"] = bound.min;
    if (std::isfinite(bound.max)) b["max"] = bound.max;
    asserts[key] = b;
  }
  j["assertions"] = asserts;

  return j.dump(2) + "\n";
}

}  // namespace rloc
