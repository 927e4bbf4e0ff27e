#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rloc {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

/// Rotation about the vertical axis.
Mat3 rot_z(double theta);

/// Generator of z-rotations: d/dtheta Rz(theta) = K * Rz(theta).
const Mat3& skew_z();

Mat3 skew(const Vec3& v);

/// Rigid transformation: p_out = rotation * p_in + translation.
struct SE3Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static SE3Transform identity() { return {}; }
  static SE3Transform from_rpy(double roll, double pitch, double yaw, const Vec3& t);

  Mat4 matrix() const;
  SE3Transform inverse() const;
  SE3Transform operator*(const SE3Transform& other) const;
  Vec3 operator*(const Vec3& p) const;

  double rotation_angle() const;
  double yaw() const;  // atan2 projection of the rotation
  bool is_orthonormal(double tol = 1e-9) const;
};

/// se(3) element, translational part first.
struct Twist6 {
  Vec3 rho = Vec3::Zero();
  Vec3 phi = Vec3::Zero();

  Twist6() = default;
  Twist6(const Vec3& r, const Vec3& p) : rho(r), phi(p) {}
  Vec6 vector() const;
};

/// 4-DOF state [x, y, z, theta]; theta is wrapped to (-pi, pi] on construction.
struct Pose4 {
  double x = 0.0, y = 0.0, z = 0.0;
  double theta = 0.0;

  Pose4() = default;
  Pose4(double x_, double y_, double z_, double theta_)
      : x(x_), y(y_), z(z_), theta(wrap_angle(theta_)) {}

  Vec3 translation() const { return {x, y, z}; }
  Vec4 vector() const { return {x, y, z, theta}; }
};

SE3Transform se3_exp(const Twist6& xi);

/// Inverse of se3_exp. Throws std::domain_error when the rotation angle is
/// within 1e-6 of pi (log-map singularity).
Twist6 se3_log(const SE3Transform& T);

SE3Transform pose4_to_se3(const Pose4& p);
Pose4 se3_to_pose4(const SE3Transform& T);

/// [rho ; phi_z] of log(T1^-1 * T2): the three translational components of
/// the relative twist and its last angular component.
Vec4 error_4dof(const SE3Transform& T1, const SE3Transform& T2);

// ---------------------------------------------------------------------------
// Pure-yaw Pose4 algebra. Compositions of Pose4 transforms stay pure-yaw, so
// factor residuals and their Jacobians have closed forms. Jacobians are 4x4
// in the parameter order (x, y, z, theta).
// ---------------------------------------------------------------------------

Pose4 compose(const Pose4& a, const Pose4& b);
Pose4 inverse(const Pose4& a);
Pose4 relative(const Pose4& a, const Pose4& b);  // a^-1 * b

Pose4 compose_jac(const Pose4& a, const Pose4& b, Mat4* Ja, Mat4* Jb);
Pose4 inverse_jac(const Pose4& a, Mat4* Ja);
Pose4 relative_jac(const Pose4& a, const Pose4& b, Mat4* Ja, Mat4* Jb);

/// error_4dof of the pure-yaw transforms (z, zhat), equal to
/// error_4dof(pose4_to_se3(z), pose4_to_se3(zhat)), with optional analytic
/// Jacobians with respect to either argument.
Vec4 error4_between(const Pose4& z, const Pose4& zhat, Mat4* Jz = nullptr,
                    Mat4* Jzhat = nullptr);

/// Sigma' = J Sigma J^T for a 4x4 Jacobian of a Pose4-valued map.
Mat4 transform_covariance(const Mat4& jacobian, const Mat4& sigma);

}  // namespace rloc
