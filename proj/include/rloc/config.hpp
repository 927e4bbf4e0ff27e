#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "rloc/pose_graph.hpp"
#include "rloc/radar_odometry.hpp"
#include "rloc/rte.hpp"
#include "rloc/sim_world.hpp"

namespace rloc {

/// Thrown on schema violations; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RadarPipelineConfig {
  bool enabled = true;
  RadarSimConfig sim;
  double filter_threshold = 0.3;  // m/s
  int ransac_iterations = 100;
  double inlier_threshold = 0.15;  // m/s
  ScanMatchConfig scan_match;
  OdometryFactorConfig factor;
};

struct MetricsConfig {
  double steady_state_fraction = 0.5;   // trace tail used for steady-state RMSE
  double convergence_threshold_m = 1.5;  // settle threshold of the RTE trace
};

struct AssertionBound {
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
};

/// Everything a run needs; a run is reproducible from this plus the seed.
struct RunConfig {
  uint64_t seed = 1;
  std::string output_dir = "out";
  double sim_dt = 0.1;

  MissionSpec mission;
  SensorRig rig;
  UwbNoiseModel uwb;
  double uwb_rate_hz = 10.0;
  double drift_rate = 0.02;

  RadarPipelineConfig radar;

  RteConfig rte;
  bool rte_use_prior = false;
  RtePrior rte_prior;

  GraphConfig graph;
  MetricsConfig metrics;

  std::map<std::string, AssertionBound> assertions;  // dotted metric key
};

RunConfig default_config();

/// Parses and validates a config JSON document. Unknown keys, wrong types
/// and out-of-range values raise ConfigError naming the field.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Serializes the full resolved configuration (every key populated).
std::string config_to_json(const RunConfig& config);

}  // namespace rloc
