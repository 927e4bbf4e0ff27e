#pragma once

#include <vector>

#include "rloc/geometry.hpp"

namespace rloc {

/// One time-stamped sample of a robot trajectory. Poses are expressed in the
/// trajectory's own frame (world for ground truth, odometry frame for dead
/// reckoning); velocity is in the body frame. Roll and pitch duplicate the
/// attitude encoded in `pose` for consumers that want them separately.
struct TrajectorySample {
  double time = 0.0;
  SE3Transform pose;
  Vec3 velocity = Vec3::Zero();
  // Attitude duplicated in scalar form; `pose` is always from_rpy of these,
  // so serializing the scalars reconstructs the rotation bit-exactly.
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Pose4 pose4() const {
    return {pose.translation.x(), pose.translation.y(), pose.translation.z(), yaw};
  }
};

class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectorySample> samples);

  const std::vector<TrajectorySample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  const TrajectorySample& front() const { return samples_.front(); }
  const TrajectorySample& back() const { return samples_.back(); }

  void push_back(const TrajectorySample& s);

  double start_time() const { return samples_.front().time; }
  double end_time() const { return samples_.back().time; }
  bool covers(double t) const;

  /// Pose at time t: linear interpolation of translation, roll and pitch;
  /// wrap-aware linear interpolation of yaw. t is clamped to the time range.
  SE3Transform interpolate(double t) const;
  TrajectorySample sample_at(double t) const;

  /// Translational arc length accumulated up to time t.
  double arc_length_at(double t) const;
  double total_arc_length() const;

  /// Earliest time u such that arc(t) - arc(u) <= length (window eviction).
  double time_at_arc_back(double t, double length) const;

 private:
  size_t bracket(double t) const;  // index i with time[i] <= t <= time[i+1]

  std::vector<TrajectorySample> samples_;
  std::vector<double> cumulative_arc_;
};

}  // namespace rloc
