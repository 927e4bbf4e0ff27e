#include "rloc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rloc {

Trajectory::Trajectory(std::vector<TrajectorySample> samples) {
  for (const auto& s : samples) push_back(s);
}

void Trajectory::push_back(const TrajectorySample& s) {
  if (!samples_.empty() && s.time <= samples_.back().time) {
    throw std::invalid_argument("Trajectory: sample times must be strictly increasing");
  }
  double arc = cumulative_arc_.empty() ? 0.0 : cumulative_arc_.back();
  if (!samples_.empty()) {
    arc += (s.pose.translation - samples_.back().pose.translation).norm();
  }
  samples_.push_back(s);
  cumulative_arc_.push_back(arc);
}

bool Trajectory::covers(double t) const {
  return !samples_.empty() && t >= start_time() - 1e-9 && t <= end_time() + 1e-9;
}

size_t Trajectory::bracket(double t) const {
  if (samples_.empty()) throw std::runtime_error("Trajectory: empty");
  auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](double value, const TrajectorySample& s) { return value < s.time; });
  if (it == samples_.begin()) return 0;
  size_t i = static_cast<size_t>(it - samples_.begin()) - 1;
  return std::min(i, samples_.size() >= 2 ? samples_.size() - 2 : size_t{0});
}

TrajectorySample Trajectory::sample_at(double t) const {
  const size_t i = bracket(t);
  const TrajectorySample& a = samples_[i];
  if (samples_.size() == 1) return a;
  const TrajectorySample& b = samples_[std::min(i + 1, samples_.size() - 1)];
  const double span = b.time - a.time;
  double u = span > 0.0 ? (t - a.time) / span : 0.0;
  u = std::clamp(u, 0.0, 1.0);

  TrajectorySample out;
  out.time = a.time + u * span;
  const Vec3 p = (1.0 - u) * a.pose.translation + u * b.pose.translation;
  out.yaw = wrap_angle(a.yaw + u * wrap_angle(b.yaw - a.yaw));
  out.roll = a.roll + u * wrap_angle(b.roll - a.roll);
  out.pitch = a.pitch + u * wrap_angle(b.pitch - a.pitch);
  out.pose = SE3Transform::from_rpy(out.roll, out.pitch, out.yaw, p);
  out.velocity = (1.0 - u) * a.velocity + u * b.velocity;
  return out;
}

SE3Transform Trajectory::interpolate(double t) const { return sample_at(t).pose; }

double Trajectory::arc_length_at(double t) const {
  const size_t i = bracket(t);
  if (samples_.size() == 1) return 0.0;
  const TrajectorySample& a = samples_[i];
  const TrajectorySample& b = samples_[std::min(i + 1, samples_.size() - 1)];
  const double span = b.time - a.time;
  double u = span > 0.0 ? (t - a.time) / span : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  const double seg = (b.pose.translation - a.pose.translation).norm();
  return cumulative_arc_[i] + u * seg;
}

double Trajectory::total_arc_length() const {
  return cumulative_arc_.empty() ? 0.0 : cumulative_arc_.back();
}

double Trajectory::time_at_arc_back(double t, double length) const {
  const double target = arc_length_at(t) - length;
  if (target <= 0.0) return start_time();
  // cumulative_arc_ is non-decreasing; find first sample at or past target.
  auto it = std::lower_bound(cumulative_arc_.begin(), cumulative_arc_.end(), target);
  size_t i = static_cast<size_t>(it - cumulative_arc_.begin());
  if (i == 0) return start_time();
  const double a0 = cumulative_arc_[i - 1], a1 = cumulative_arc_[i];
  const double t0 = samples_[i - 1].time, t1 = samples_[i].time;
  if (a1 <= a0) return t0;
  const double u = (target - a0) / (a1 - a0);
  return t0 + u * (t1 - t0);
}

}  // namespace rloc
