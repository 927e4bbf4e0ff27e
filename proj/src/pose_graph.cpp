#include "rloc/pose_graph.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace rloc {

namespace {

Mat4 sqrt_info_from_covariance(const Mat4& covariance) {
  const Mat4 info = covariance.inverse();
  return Eigen::LLT<Mat4>(info).matrixL().transpose();
}

// Residual of one factor given its node poses, with per-node 4x4 Jacobians.
Vec4 factor_residual(const Factor& factor, const std::vector<Pose4>& values,
                     std::vector<Mat4>* jacobians) {
  switch (factor.kind) {
    case FactorKind::prior: {
      Mat4 j;
      const Vec4 e = error4_between(factor.measurement, values[0],
                                    nullptr, jacobians ? &j : nullptr);
      if (jacobians) (*jacobians)[0] = j;
      return e;
    }
    case FactorKind::odometry: {
      Mat4 ja, jb, je;
      const Pose4 zhat = relative_jac(values[0], values[1],
                                      jacobians ? &ja : nullptr,
                                      jacobians ? &jb : nullptr);
      const Vec4 e = error4_between(factor.measurement, zhat, nullptr,
                                    jacobians ? &je : nullptr);
      if (jacobians) {
        (*jacobians)[0] = je * ja;
        (*jacobians)[1] = je * jb;
      }
      return e;
    }
    case FactorKind::encounter: {
      // nodes: {kf_a, kf_b, anchor_a, anchor_b}; measurement is the pose of
      // b's body in a's body frame.
      Mat4 jp_anchor, jp_kf, jq_anchor, jq_kf, jz_p, jz_q, je;
      const bool want = jacobians != nullptr;
      const Pose4 p = compose_jac(values[2], values[0],
                                  want ? &jp_anchor : nullptr,
                                  want ? &jp_kf : nullptr);
      const Pose4 q = compose_jac(values[3], values[1],
                                  want ? &jq_anchor : nullptr,
                                  want ? &jq_kf : nullptr);
      const Pose4 zhat = relative_jac(p, q, want ? &jz_p : nullptr,
                                      want ? &jz_q : nullptr);
      const Vec4 e = error4_between(factor.measurement, zhat, nullptr,
                                    want ? &je : nullptr);
      if (jacobians) {
        (*jacobians)[0] = je * jz_p * jp_kf;
        (*jacobians)[1] = je * jz_q * jq_kf;
        (*jacobians)[2] = je * jz_p * jp_anchor;
        (*jacobians)[3] = je * jz_q * jq_anchor;
      }
      return e;
    }
  }
  return Vec4::Zero();
}

}  // namespace

MultiRobotGraph::MultiRobotGraph(int num_robots, const GraphConfig& config)
    : config_(config), robots_(num_robots) {
  if (num_robots < 1) throw std::invalid_argument("MultiRobotGraph: need >= 1 robot");
  for (int r = 0; r < num_robots; ++r) {
    robots_[r].anchor.robot = r;
  }
  // Gauge prior: the common frame aligns with robot 0's odometry frame.
  Factor gauge;
  gauge.kind = FactorKind::prior;
  gauge.nodes = {{NodeRef::Type::anchor, 0, 0}};
  gauge.measurement = Pose4{};
  gauge.sqrt_information = config_.gauge_prior_weight * Mat4::Identity();
  factors_.push_back(gauge);
}

Mat4 MultiRobotGraph::odometry_sqrt_information(double step_length,
                                                double dtheta) const {
  const double sigma_t =
      std::max(config_.odom_sigma_scale * step_length, config_.odom_sigma_floor);
  const double sigma_yaw = std::max(
      config_.odom_yaw_sigma_base + config_.odom_yaw_sigma_scale * std::abs(dtheta),
      config_.odom_sigma_floor);
  Mat4 w = Mat4::Zero();
  w(0, 0) = w(1, 1) = w(2, 2) = 1.0 / sigma_t;
  w(3, 3) = 1.0 / sigma_yaw;
  return w;
}

std::optional<KeyframeNode> MultiRobotGraph::add_keyframe(int robot,
                                                          const Pose4& odom_pose,
                                                          double timestamp) {
  RobotState& rs = robots_.at(robot);
  if (rs.have_last_odom) {
    rs.arc += (odom_pose.translation() - rs.last_odom.translation()).norm();
  }
  rs.last_odom = odom_pose;
  rs.have_last_odom = true;

  const bool first = rs.keyframes.empty();
  if (!first && rs.arc - rs.arc_at_last_keyframe < config_.keyframe_spacing_m) {
    return std::nullopt;
  }

  KeyframeNode node;
  node.robot = robot;
  node.index = static_cast<int>(rs.keyframes.size());
  node.state = odom_pose;
  node.odom_pose = odom_pose;
  node.timestamp = timestamp;
  node.arc_length = rs.arc;

  if (first) {
    Factor prior;
    prior.kind = FactorKind::prior;
    prior.nodes = {{NodeRef::Type::keyframe, robot, 0}};
    prior.measurement = odom_pose;
    prior.sqrt_information = (1.0 / config_.start_prior_sigma) * Mat4::Identity();
    factors_.push_back(prior);
  } else {
    const KeyframeNode& prev = rs.keyframes.back();
    Factor odom;
    odom.kind = FactorKind::odometry;
    odom.nodes = {{NodeRef::Type::keyframe, robot, prev.index},
                  {NodeRef::Type::keyframe, robot, node.index}};
    odom.measurement = relative(prev.odom_pose, odom_pose);
    odom.sqrt_information = odometry_sqrt_information(
        rs.arc - rs.arc_at_last_keyframe, odom.measurement.theta);
    factors_.push_back(odom);
  }
  rs.arc_at_last_keyframe = rs.arc;
  rs.keyframes.push_back(node);
  return node;
}

void MultiRobotGraph::add_relative_factor(int robot, int kf_a, int kf_b,
                                          const Pose4& measurement,
                                          const Mat4& covariance) {
  const RobotState& rs = robots_.at(robot);
  if (kf_a < 0 || kf_b < 0 || kf_a >= static_cast<int>(rs.keyframes.size()) ||
      kf_b >= static_cast<int>(rs.keyframes.size())) {
    throw std::invalid_argument("add_relative_factor: keyframe index out of range");
  }
  Factor f;
  f.kind = FactorKind::odometry;
  f.nodes = {{NodeRef::Type::keyframe, robot, kf_a},
             {NodeRef::Type::keyframe, robot, kf_b}};
  f.measurement = measurement;
  f.sqrt_information = sqrt_info_from_covariance(covariance);
  factors_.push_back(f);
}

const KeyframeNode* MultiRobotGraph::nearest_keyframe(int robot, double time) const {
  const auto& kfs = robots_.at(robot).keyframes;
  const KeyframeNode* best = nullptr;
  double best_dt = config_.encounter_max_dt;
  for (const auto& kf : kfs) {
    const double dt = std::abs(kf.timestamp - time);
    if (dt <= best_dt) {
      best_dt = dt;
      best = &kf;
    }
  }
  return best;
}

bool MultiRobotGraph::add_encounter(const Transform4Estimate& estimate,
                                    int robot_uav, int robot_ugv) {
  const KeyframeNode* kf_uav = nearest_keyframe(robot_uav, estimate.timestamp);
  const KeyframeNode* kf_ugv = nearest_keyframe(robot_ugv, estimate.timestamp);
  if (!kf_uav || !kf_ugv) {
    ++dropped_encounters_;
    return false;
  }

  // Virtual observation: pose of the UGV body in the UAV body frame, via the
  // estimated UGV-odometry -> UAV-odometry transform.
  Mat4 j_comp_t, j_rel_b;
  const Pose4 mapped = compose_jac(estimate.transform, kf_ugv->odom_pose, &j_comp_t, nullptr);
  const Pose4 z = relative_jac(kf_uav->odom_pose, mapped, nullptr, &j_rel_b);
  const Mat4 j = j_rel_b * j_comp_t;
  Mat4 cov = transform_covariance(
      j, config_.encounter_covariance_inflation * estimate.covariance);
  cov += 1e-8 * Mat4::Identity();

  Factor f;
  f.kind = FactorKind::encounter;
  f.nodes = {{NodeRef::Type::keyframe, robot_uav, kf_uav->index},
             {NodeRef::Type::keyframe, robot_ugv, kf_ugv->index},
             {NodeRef::Type::anchor, robot_uav, 0},
             {NodeRef::Type::anchor, robot_ugv, 0}};
  f.measurement = z;
  f.sqrt_information = sqrt_info_from_covariance(cov);
  factors_.push_back(f);
  ++encounter_count_;

  // First rendezvous: place unobserved anchors consistently with the
  // observation instead of leaving them at their regularized values.
  AnchorNode& a_uav = robots_[robot_uav].anchor;
  AnchorNode& a_ugv = robots_[robot_ugv].anchor;
  const Pose4& x_uav = robots_[robot_uav].keyframes[kf_uav->index].state;
  const Pose4& x_ugv = robots_[robot_ugv].keyframes[kf_ugv->index].state;
  if (!a_uav.observed && robot_uav != 0) {
    const Pose4 q = compose(a_ugv.state, x_ugv);
    a_uav.state = compose(compose(q, inverse(z)), inverse(x_uav));
  }
  if (!a_ugv.observed && robot_ugv != 0) {
    const Pose4 p = compose(a_uav.state, x_uav);
    a_ugv.state = compose(compose(p, z), inverse(x_ugv));
  }
  a_uav.observed = true;
  a_ugv.observed = true;
  return true;
}

OptimizeResult MultiRobotGraph::optimize(int window_keyframes) {
  const int num_robots = static_cast<int>(robots_.size());

  // Free set: all anchors plus the newest window of keyframes per robot.
  std::vector<int> first_free_kf(num_robots, 0);
  for (int r = 0; r < num_robots; ++r) {
    const int count = static_cast<int>(robots_[r].keyframes.size());
    first_free_kf[r] =
        window_keyframes > 0 ? std::max(0, count - window_keyframes) : 0;
  }

  std::vector<int> anchor_offset(num_robots, -1);
  int dim = 0;
  for (int r = 0; r < num_robots; ++r) {
    anchor_offset[r] = dim;
    dim += 4;
  }
  std::vector<std::vector<int>> kf_offset(num_robots);
  for (int r = 0; r < num_robots; ++r) {
    kf_offset[r].assign(robots_[r].keyframes.size(), -1);
    for (size_t i = first_free_kf[r]; i < robots_[r].keyframes.size(); ++i) {
      kf_offset[r][i] = dim;
      dim += 4;
    }
  }

  Eigen::VectorXd state(dim);
  for (int r = 0; r < num_robots; ++r) {
    state.segment<4>(anchor_offset[r]) = robots_[r].anchor.state.vector();
    for (size_t i = first_free_kf[r]; i < robots_[r].keyframes.size(); ++i) {
      state.segment<4>(kf_offset[r][i]) = robots_[r].keyframes[i].state.vector();
    }
  }

  auto node_offset = [&](const NodeRef& n) {
    return n.type == NodeRef::Type::anchor ? anchor_offset[n.robot]
                                           : kf_offset[n.robot][n.index];
  };
  auto node_value = [&](const NodeRef& n) {
    return n.type == NodeRef::Type::anchor ? robots_[n.robot].anchor.state
                                           : robots_[n.robot].keyframes[n.index].state;
  };

  std::vector<ResidualBlock> blocks;
  auto add_factor_block = [&](const Factor& factor) {
    struct Arg {
      bool free = false;
      int slot = -1;  // order among the factor's free nodes
      Pose4 fixed;
    };
    std::vector<Arg> args(factor.nodes.size());
    ResidualBlock block;
    int free_count = 0;
    for (size_t k = 0; k < factor.nodes.size(); ++k) {
      const int offset = node_offset(factor.nodes[k]);
      if (offset >= 0) {
        args[k].free = true;
        args[k].slot = free_count++;
        for (int c = 0; c < 4; ++c) block.parameter_indices.push_back(offset + c);
      } else {
        args[k].fixed = node_value(factor.nodes[k]);
      }
    }
    if (free_count == 0) return;
    block.dimension = 4;
    block.sqrt_information = factor.sqrt_information;
    Factor f = factor;
    block.evaluate = [f, args, free_count](const Eigen::VectorXd& params,
                                           Eigen::VectorXd& residual,
                                           Eigen::MatrixXd* jacobian) {
      std::vector<Pose4> values(f.nodes.size());
      for (size_t k = 0; k < f.nodes.size(); ++k) {
        if (args[k].free) {
          const int o = 4 * args[k].slot;
          values[k] = Pose4{params[o], params[o + 1], params[o + 2], params[o + 3]};
        } else {
          values[k] = args[k].fixed;
        }
      }
      std::vector<Mat4> jacs;
      if (jacobian) jacs.resize(f.nodes.size());
      residual = factor_residual(f, values, jacobian ? &jacs : nullptr);
      if (jacobian) {
        jacobian->setZero(4, 4 * free_count);
        for (size_t k = 0; k < f.nodes.size(); ++k) {
          if (args[k].free) jacobian->block<4, 4>(0, 4 * args[k].slot) = jacs[k];
        }
      }
    };
    blocks.push_back(std::move(block));
  };

  for (const auto& factor : factors_) add_factor_block(factor);

  // Weak prior keeps unobserved anchors (and thus the Hessian) well posed
  // before the first rendezvous.
  for (int r = 1; r < num_robots; ++r) {
    if (robots_[r].anchor.observed) continue;
    Factor reg;
    reg.kind = FactorKind::prior;
    reg.nodes = {{NodeRef::Type::anchor, r, 0}};
    reg.measurement = robots_[r].anchor.state;
    reg.sqrt_information =
        (1.0 / config_.anchor_regularization_sigma) * Mat4::Identity();
    add_factor_block(reg);
  }

  OptimizeResult out;
  try {
    SolveResult solved = solve(blocks, state, config_.solver);
    out.report = solved.report;
    if (solved.state.allFinite() &&
        solved.report.final_cost <= solved.report.initial_cost + 1e-12) {
      for (int r = 0; r < num_robots; ++r) {
        const auto a = solved.state.segment<4>(anchor_offset[r]);
        robots_[r].anchor.state = Pose4{a[0], a[1], a[2], a[3]};
        for (size_t i = first_free_kf[r]; i < robots_[r].keyframes.size(); ++i) {
          const auto k = solved.state.segment<4>(kf_offset[r][i]);
          robots_[r].keyframes[i].state = Pose4{k[0], k[1], k[2], k[3]};
        }
      }
      out.applied = true;
    }
  } catch (const std::exception& e) {
    out.applied = false;
    out.report.message = e.what();
  }
  return out;
}

std::vector<GlobalPose> MultiRobotGraph::export_global_trajectories(int robot) const {
  const RobotState& rs = robots_.at(robot);
  std::vector<GlobalPose> out;
  out.reserve(rs.keyframes.size());
  for (const auto& kf : rs.keyframes) {
    out.push_back({kf.timestamp, compose(rs.anchor.state, kf.state)});
  }
  return out;
}

const std::vector<KeyframeNode>& MultiRobotGraph::keyframes(int robot) const {
  return robots_.at(robot).keyframes;
}

const AnchorNode& MultiRobotGraph::anchor(int robot) const {
  return robots_.at(robot).anchor;
}

void MultiRobotGraph::dump(std::ostream& os) const {
  for (size_t r = 0; r < robots_.size(); ++r) {
    const auto& a = robots_[r].anchor;
    os << "ANCHOR " << r << ' ' << a.state.x << ' ' << a.state.y << ' '
       << a.state.z << ' ' << a.state.theta << ' ' << (a.observed ? 1 : 0) << '\n';
    for (const auto& kf : robots_[r].keyframes) {
      os << "KF " << r << ' ' << kf.index << ' ' << kf.timestamp << ' '
         << kf.arc_length << ' ' << kf.state.x << ' ' << kf.state.y << ' '
         << kf.state.z << ' ' << kf.state.theta << '\n';
    }
  }
  for (const auto& f : factors_) {
    const char* kind = f.kind == FactorKind::prior      ? "PRIOR"
                       : f.kind == FactorKind::odometry ? "ODOM"
                                                        : "ENC";
    os << "FACTOR " << kind;
    for (const auto& n : f.nodes) {
      os << ' ' << (n.type == NodeRef::Type::anchor ? "A" : "K") << n.robot;
      if (n.type == NodeRef::Type::keyframe) os << ':' << n.index;
    }
    os << ' ' << f.measurement.x << ' ' << f.measurement.y << ' '
       << f.measurement.z << ' ' << f.measurement.theta << '\n';
  }
}

}  // namespace rloc
