#include "rloc/rte.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace rloc {

namespace {

struct RangeTerm {
  Vec3 tag_o1;
  Vec3 anchor_o2;
  double distance;
  double sigma;
};

// All UWB ranges of a window as one residual block over the 4-DOF state,
// 1/sigma folded into the rows.
ResidualBlock make_range_block(std::vector<RangeTerm> terms) {
  ResidualBlock block;
  block.parameter_indices = {0, 1, 2, 3};
  block.dimension = static_cast<int>(terms.size());
  block.evaluate = [terms = std::move(terms)](const Eigen::VectorXd& params,
                                              Eigen::VectorXd& residual,
                                              Eigen::MatrixXd* jacobian) {
    const Vec3 t = params.head<3>();
    const double theta = params[3];
    const Mat3 r = rot_z(theta);
    for (size_t i = 0; i < terms.size(); ++i) {
      const RangeTerm& term = terms[i];
      const Vec3 rotated = r * term.anchor_o2;
      const Vec3 q = term.tag_o1 - rotated - t;
      const double n = std::max(q.norm(), 1e-12);
      residual[static_cast<int>(i)] = (n - term.distance) / term.sigma;
      if (jacobian) {
        const Vec3 qhat = q / n;
        jacobian->block<1, 3>(static_cast<int>(i), 0) = -qhat.transpose() / term.sigma;
        (*jacobian)(static_cast<int>(i), 3) = -qhat.dot(skew_z() * rotated) / term.sigma;
      }
    }
  };
  return block;
}

ResidualBlock make_prior_block(const RtePrior& prior) {
  ResidualBlock block;
  block.parameter_indices = {0, 1, 2, 3};
  block.dimension = 4;
  block.evaluate = [prior](const Eigen::VectorXd& params, Eigen::VectorXd& residual,
                           Eigen::MatrixXd* jacobian) {
    const Pose4 state{params[0], params[1], params[2], params[3]};
    Mat4 jz;
    residual = error4_between(state, prior.transform, jacobian ? &jz : nullptr);
    if (jacobian) *jacobian = jz;
  };
  const Mat4 info = prior.covariance.inverse();
  block.sqrt_information = Eigen::LLT<Mat4>(info).matrixL().transpose();
  return block;
}

Mat4 covariance_from_hessian(const Mat4& hessian, bool* rank_deficient) {
  Eigen::SelfAdjointEigenSolver<Mat4> eig(hessian);
  const Vec4 lambda = eig.eigenvalues();
  const double lmax = std::max(lambda.maxCoeff(), 1e-300);
  Mat4 cov = Mat4::Zero();
  bool deficient = false;
  for (int i = 0; i < 4; ++i) {
    if (lambda[i] < lmax * 1e-10) deficient = true;
    const double l = std::max(lambda[i], lmax * 1e-14);
    cov += eig.eigenvectors().col(i) * eig.eigenvectors().col(i).transpose() / l;
  }
  if (rank_deficient) *rank_deficient = deficient;
  return cov;
}

}  // namespace

double predict_range(const SE3Transform& T, const Vec3& tag_in_o1,
                     const Vec3& anchor_in_o2) {
  return (tag_in_o1 - T * anchor_in_o2).norm();
}

std::optional<Transform4Estimate> estimate(
    const MeasurementWindow& window, const SensorRig& rig,
    const RteConfig& config, const std::optional<RtePrior>& prior,
    const std::optional<Transform4Estimate>& previous) {
  auto tag_position = [&rig](int id) -> const Vec3* {
    for (const auto& t : rig.tags)
      if (t.id == id) return &t.position;
    return nullptr;
  };
  auto anchor_position = [&rig](int id) -> const Vec3* {
    for (const auto& a : rig.anchors)
      if (a.id == id) return &a.position;
    return nullptr;
  };

  // Place every tag/anchor in its odometry frame at the range timestamp.
  std::vector<RangeTerm> terms;
  terms.reserve(window.ranges.size());
  const SE3Transform gate_T =
      previous ? pose4_to_se3(previous->transform) : SE3Transform::identity();
  for (const auto& m : window.ranges) {
    const Vec3* tag = tag_position(m.tag_id);
    const Vec3* anchor = anchor_position(m.anchor_id);
    if (!tag || !anchor) continue;
    if (!window.odom_uav.covers(m.time) || !window.odom_ugv.covers(m.time)) continue;
    RangeTerm term;
    term.tag_o1 = window.odom_uav.interpolate(m.time) * (*tag);
    term.anchor_o2 = window.odom_ugv.interpolate(m.time) * (*anchor);
    term.distance = m.distance;
    term.sigma = std::max(m.sigma, 1e-6);
    if (config.gating_enabled && previous) {
      const double predicted = predict_range(gate_T, term.tag_o1, term.anchor_o2);
      if (std::abs(m.distance - predicted) >
          config.gate_sigma_factor * term.sigma + config.gate_slack_m) {
        continue;
      }
    }
    terms.push_back(term);
  }

  if (static_cast<int>(terms.size()) < config.min_residuals) return std::nullopt;

  // Centroid-aligned translation seed for a given yaw.
  Vec3 tag_centroid = Vec3::Zero(), anchor_centroid = Vec3::Zero();
  double mean_distance = 0.0;
  for (const auto& term : terms) {
    tag_centroid += term.tag_o1;
    anchor_centroid += term.anchor_o2;
    mean_distance += term.distance;
  }
  tag_centroid /= static_cast<double>(terms.size());
  anchor_centroid /= static_cast<double>(terms.size());
  mean_distance /= static_cast<double>(terms.size());

  std::vector<ResidualBlock> blocks;
  blocks.push_back(make_range_block(std::move(terms)));
  const int scalar_residuals = blocks.back().dimension;
  if (prior) blocks.push_back(make_prior_block(*prior));

  std::vector<Eigen::VectorXd> seeds;
  if (previous) {
    seeds.push_back(previous->transform.vector());
  }
  if (seeds.empty()) {
    const int n_yaw = std::max(config.yaw_seeds, 1);
    for (int i = 0; i < n_yaw; ++i) {
      const double yaw = 2.0 * std::numbers::pi * i / n_yaw;
      const Vec3 t = tag_centroid - rot_z(yaw) * anchor_centroid;
      for (double dz : config.z_mirror_seeds
                           ? std::vector<double>{-0.5 * mean_distance, 0.5 * mean_distance}
                           : std::vector<double>{0.0}) {
        Eigen::VectorXd seed(4);
        seed << t.x(), t.y(), t.z() + dz, yaw;
        seeds.push_back(seed);
      }
    }
  }

  struct Candidate {
    SolveResult result;
    double cost = std::numeric_limits<double>::infinity();
  };
  std::vector<Candidate> candidates;
  for (const auto& seed : seeds) {
    SolveResult r = solve(blocks, seed, config.solver);
    if (!r.state.allFinite() || !std::isfinite(r.report.final_cost)) continue;
    candidates.push_back({std::move(r), 0.0});
    candidates.back().cost = candidates.back().result.report.final_cost;
  }
  // A stale warm start can sit in the wrong basin; fall back to multi-start.
  if (previous && (candidates.empty() || !candidates.front().result.report.converged)) {
    const int n_yaw = std::max(config.yaw_seeds, 1);
    for (int i = 0; i < n_yaw; ++i) {
      const double yaw = 2.0 * std::numbers::pi * i / n_yaw;
      const Vec3 t = tag_centroid - rot_z(yaw) * anchor_centroid;
      Eigen::VectorXd seed(4);
      seed << t.x(), t.y(), t.z(), yaw;
      SolveResult r = solve(blocks, seed, config.solver);
      if (r.state.allFinite() && std::isfinite(r.report.final_cost)) {
        candidates.push_back({std::move(r), 0.0});
        candidates.back().cost = candidates.back().result.report.final_cost;
      }
    }
  }
  if (candidates.empty()) return std::nullopt;

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  size_t pick = 0;
  if (previous && candidates.size() > 1) {
    // Near-ties go to the candidate closest to the previous estimate.
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i].cost >
          candidates[0].cost * (1.0 + config.tie_break_fraction) + 1e-12) {
        break;
      }
      const Eigen::VectorXd& s = candidates[i].result.state;
      const double dist =
          (s.head<3>() - previous->transform.translation()).norm() +
          std::abs(wrap_angle(s[3] - previous->transform.theta));
      if (dist < best_dist) {
        best_dist = dist;
        pick = i;
      }
    }
  }

  const SolveResult& best = candidates[pick].result;
  Transform4Estimate out;
  out.transform = Pose4{best.state[0], best.state[1], best.state[2], best.state[3]};
  const Mat4 hessian =
      gauss_newton_hessian(blocks, best.state, config.solver.use_analytic_jacobians);
  out.covariance = covariance_from_hessian(hessian, &out.rank_deficient);
  out.window_span_uav = window.span_uav;
  out.window_span_ugv = window.span_ugv;
  out.residual_count = scalar_residuals;
  out.timestamp = window.ranges.empty() ? 0.0 : window.ranges.back().time;
  return out;
}

std::optional<MeasurementWindow> RteEstimator::build_window() const {
  if (odom_uav_.size() < 2 || odom_ugv_.size() < 2 || ranges_.empty()) {
    return std::nullopt;
  }
  const double t_end = std::min(odom_uav_.end_time(), odom_ugv_.end_time());
  const double t_start = std::max(
      odom_uav_.time_at_arc_back(t_end, config_.max_window_m),
      odom_ugv_.time_at_arc_back(t_end, config_.max_window_m));

  const double span_uav = odom_uav_.arc_length_at(t_end) - odom_uav_.arc_length_at(t_start);
  const double span_ugv = odom_ugv_.arc_length_at(t_end) - odom_ugv_.arc_length_at(t_start);
  if (span_uav + 1e-9 < config_.min_window_m || span_ugv + 1e-9 < config_.min_window_m) {
    return std::nullopt;
  }

  MeasurementWindow window;
  window.span_uav = span_uav;
  window.span_ugv = span_ugv;
  auto slice = [&](const Trajectory& odom) {
    Trajectory out;
    const auto& samples = odom.samples();
    for (size_t i = 0; i < samples.size(); ++i) {
      const bool inside = samples[i].time >= t_start && samples[i].time <= t_end;
      const bool pad_before =
          i + 1 < samples.size() && samples[i].time < t_start && samples[i + 1].time >= t_start;
      const bool pad_after =
          i > 0 && samples[i].time > t_end && samples[i - 1].time <= t_end;
      if (inside || pad_before || pad_after) out.push_back(samples[i]);
    }
    return out;
  };
  window.odom_uav = slice(odom_uav_);
  window.odom_ugv = slice(odom_ugv_);
  for (const auto& m : ranges_) {
    if (m.time >= t_start - 1e-9 && m.time <= t_end + 1e-9 &&
        window.odom_uav.covers(m.time) && window.odom_ugv.covers(m.time)) {
      window.ranges.push_back(m);
    }
  }
  if (window.ranges.empty()) return std::nullopt;
  return window;
}

std::optional<Transform4Estimate> RteEstimator::update(
    double now, const std::optional<RtePrior>& prior) {
  auto window = build_window();
  if (!window) return std::nullopt;

  auto result = estimate(*window, rig_, config_, prior, last_);
  if (result) {
    result->timestamp = now;
    last_ = result;
  }

  // Ranges older than the largest possible future window are dead weight.
  const double horizon_start = std::min(
      odom_uav_.time_at_arc_back(now, config_.max_window_m + 2.0),
      odom_ugv_.time_at_arc_back(now, config_.max_window_m + 2.0));
  while (!ranges_.empty() && ranges_.front().time < horizon_start) {
    ranges_.pop_front();
  }
  return result;
}

}  // namespace rloc
