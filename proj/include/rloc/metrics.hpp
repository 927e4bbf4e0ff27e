#pragma once

#include <vector>

#include "rloc/geometry.hpp"
#include "rloc/rte.hpp"

namespace rloc {

/// Range-error characterization: mean bias error, sample standard deviation
/// and RMSE of (measured - truth).
struct RangeStats {
  double mbe = 0.0;
  double sigma = 0.0;
  double rmse = 0.0;
  int count = 0;
};

RangeStats range_stats(const std::vector<double>& measured,
                       const std::vector<double>& truth);

struct TimedPose {
  double time = 0.0;
  Pose4 pose;
};

/// Translational ATE and yaw RMSE of a pose series against interpolated
/// ground truth, both already expressed in the same frame (no alignment).
struct TrajectoryError {
  double ate_translation = 0.0;  // meters, RMS
  double yaw_rmse_deg = 0.0;
  std::vector<double> times;
  std::vector<double> translation_errors;
  std::vector<double> yaw_errors_deg;
};

struct AssociationConfig {
  double tolerance_s = 0.05;  // estimates outside truth coverage + tol drop
};

TrajectoryError trajectory_error(const std::vector<TimedPose>& estimate,
                                 const std::vector<TimedPose>& truth,
                                 const AssociationConfig& config = {});

/// Per-estimate relative-transform error traces (translation norm and
/// wrapped yaw magnitude) against an interpolated true transform series.
struct TransformErrorTrace {
  std::vector<double> times;
  std::vector<double> translation_m;
  std::vector<double> rotation_deg;
};

TransformErrorTrace transform_rmse_trace(
    const std::vector<Transform4Estimate>& estimates,
    const std::vector<TimedPose>& truth);

/// RMS over the trace entries with time >= t_min.
double rms_after(const std::vector<double>& times,
                 const std::vector<double>& values, double t_min);

/// Earliest time from which every later value stays below the threshold;
/// +inf when the trace never settles.
double settle_time(const std::vector<double>& times,
                   const std::vector<double>& values, double threshold);

}  // namespace rloc
