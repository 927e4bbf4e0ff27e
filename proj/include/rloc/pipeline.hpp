#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rloc/config.hpp"
#include "rloc/metrics.hpp"
#include "rloc/sim_world.hpp"

namespace rloc {

struct PipelineOptions {
  bool no_rte = false;    // disable encounters
  bool no_radar = false;  // disable radar factors
  bool paced = false;     // pace processing to measurement timestamps
};

/// Per-solver wall-time statistics (the timing artifact; kept out of the
/// metric summary so summaries stay byte-reproducible).
struct TimingSummary {
  double rte_mean_s = 0.0, rte_std_s = 0.0;
  int rte_count = 0;
  double graph_mean_s = 0.0, graph_std_s = 0.0;
  int graph_count = 0;
};

struct RunSummary {
  std::string metrics_json;  // machine-readable metric summary (also on disk)
  TimingSummary timing;
  std::filesystem::path artifact_dir;

  /// Looks up a dotted key ("ate.ugv.optimized_m") in the metric summary.
  double metric(const std::string& dotted_key) const;
  bool has_metric(const std::string& dotted_key) const;
};

/// All sensor streams of a run. Produced by the simulator or parsed back from
/// a recorded artifact directory.
struct SimStreams {
  Trajectory truth_uav, truth_ugv;
  Trajectory odom_uav, odom_ugv;
  std::vector<RangeMeasurement> ranges;
  std::vector<RadarScan> radar_uav, radar_ugv;
};

SimStreams simulate(const RunConfig& config);

/// Full pipeline: simulate, write measurement artifacts, estimate, optimize,
/// evaluate. Artifacts land in config.output_dir.
RunSummary run_simulation(const RunConfig& config, const PipelineOptions& options = {});

/// Estimation/optimization only, from a recorded artifact directory.
RunSummary run_replay(const std::filesystem::path& measurements_dir,
                      const RunConfig& config, const PipelineOptions& options = {});

/// Evaluates config.assertions against a summary; returns failure messages.
std::vector<std::string> check_assertions(const RunConfig& config,
                                          const RunSummary& summary);

}  // namespace rloc
