#include "rloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rloc {

namespace {

constexpr double kRad2Deg = 180.0 / std::numbers::pi;

// Wrap-aware linear interpolation of a Pose4 series.
Pose4 interpolate_pose(const std::vector<TimedPose>& series, double t) {
  auto it = std::lower_bound(
      series.begin(), series.end(), t,
      [](const TimedPose& p, double value) { return p.time < value; });
  if (it == series.begin()) return series.front().pose;
  if (it == series.end()) return series.back().pose;
  const TimedPose& b = *it;
  const TimedPose& a = *(it - 1);
  const double span = b.time - a.time;
  const double u = span > 0.0 ? (t - a.time) / span : 1.0;
  const Vec3 p = (1.0 - u) * a.pose.translation() + u * b.pose.translation();
  const double yaw = a.pose.theta + u * wrap_angle(b.pose.theta - a.pose.theta);
  return {p.x(), p.y(), p.z(), yaw};
}

}  // namespace

RangeStats range_stats(const std::vector<double>& measured,
                       const std::vector<double>& truth) {
  if (measured.size() != truth.size()) {
    throw std::invalid_argument("range_stats: series lengths differ");
  }
  if (measured.size() < 2) {
    throw std::invalid_argument("range_stats: need at least 2 samples");
  }
  const size_t n = measured.size();
  double sum = 0.0, sum_sq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = measured[i] - truth[i];
    sum += e;
    sum_sq += e * e;
  }
  RangeStats stats;
  stats.count = static_cast<int>(n);
  stats.mbe = sum / n;
  stats.rmse = std::sqrt(sum_sq / n);
  const double var = (sum_sq - n * stats.mbe * stats.mbe) / (n - 1);
  stats.sigma = std::sqrt(std::max(var, 0.0));
  return stats;
}

TrajectoryError trajectory_error(const std::vector<TimedPose>& estimate,
                                 const std::vector<TimedPose>& truth,
                                 const AssociationConfig& config) {
  if (estimate.empty() || truth.empty()) {
    throw std::invalid_argument("trajectory_error: empty series");
  }
  TrajectoryError err;
  double sum_t2 = 0.0, sum_y2 = 0.0;
  for (const auto& e : estimate) {
    if (e.time < truth.front().time - config.tolerance_s ||
        e.time > truth.back().time + config.tolerance_s) {
      continue;
    }
    const Pose4 gt = interpolate_pose(truth, e.time);
    const double dt = (e.pose.translation() - gt.translation()).norm();
    const double dyaw = std::abs(wrap_angle(e.pose.theta - gt.theta)) * kRad2Deg;
    err.times.push_back(e.time);
    err.translation_errors.push_back(dt);
    err.yaw_errors_deg.push_back(dyaw);
    sum_t2 += dt * dt;
    sum_y2 += dyaw * dyaw;
  }
  if (err.times.empty()) {
    throw std::invalid_argument("trajectory_error: no temporal overlap");
  }
  err.ate_translation = std::sqrt(sum_t2 / err.times.size());
  err.yaw_rmse_deg = std::sqrt(sum_y2 / err.times.size());
  return err;
}

TransformErrorTrace transform_rmse_trace(
    const std::vector<Transform4Estimate>& estimates,
    const std::vector<TimedPose>& truth) {
  TransformErrorTrace trace;
  if (truth.empty()) return trace;
  for (const auto& est : estimates) {
    const Pose4 gt = interpolate_pose(truth, est.timestamp);
    trace.times.push_back(est.timestamp);
    trace.translation_m.push_back(
        (est.transform.translation() - gt.translation()).norm());
    trace.rotation_deg.push_back(
        std::abs(wrap_angle(est.transform.theta - gt.theta)) * kRad2Deg);
  }
  return trace;
}

double rms_after(const std::vector<double>& times,
                 const std::vector<double>& values, double t_min) {
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    sum += values[i] * values[i];
    ++n;
  }
  return n > 0 ? std::sqrt(sum / n) : 0.0;
}

double settle_time(const std::vector<double>& times,
                   const std::vector<double>& values, double threshold) {
  double settle = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < times.size(); ++i) {
    if (values[i] < threshold) {
      if (!std::isfinite(settle)) settle = times[i];
    } else {
      settle = std::numeric_limits<double>::infinity();
    }
  }
  return settle;
}

}  // namespace rloc
