#include "rloc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rloc {

namespace {

constexpr double kPi = std::numbers::pi;
// Below this angle the Rodrigues/log coefficient functions switch to their
// Taylor series.
constexpr double kSmallAngle = 1e-7;

// sin(t)/t, (1-cos(t))/t^2, (t-sin(t))/t^3 with series branches.
void rotation_coefficients(double theta, double& a, double& b, double& c) {
  const double t2 = theta * theta;
  if (std::abs(theta) < kSmallAngle) {
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / t2;
    c = (1.0 - a) / t2;
  }
}

// g(t) = (t/2) cot(t/2) and its derivative; the diagonal term of the inverse
// left Jacobian of a pure-yaw twist. Series switch is wider here because the
// closed-form derivative cancels catastrophically near zero.
double yaw_vinv_diag(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 12.0 - t2 * t2 / 720.0;
  }
  return 0.5 * t / std::tan(0.5 * t);
}

double yaw_vinv_diag_deriv(double t) {
  if (std::abs(t) < 1e-4) {
    return -t / 6.0 - t * t * t / 180.0;
  }
  const double cot = 1.0 / std::tan(0.5 * t);
  return 0.5 * cot - 0.25 * t * (1.0 + cot * cot);
}

// Inverse left Jacobian restricted to a pure-yaw twist of angle t.
Mat3 yaw_vinv(double t) {
  const double g = yaw_vinv_diag(t);
  Mat3 m = Mat3::Identity();
  m(0, 0) = g;
  m(1, 1) = g;
  m(0, 1) = 0.5 * t;
  m(1, 0) = -0.5 * t;
  return m;
}

Mat3 yaw_vinv_deriv(double t) {
  const double gd = yaw_vinv_diag_deriv(t);
  Mat3 m = Mat3::Zero();
  m(0, 0) = gd;
  m(1, 1) = gd;
  m(0, 1) = 0.5;
  m(1, 0) = -0.5;
  return m;
}

}  // namespace

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

Mat3 rot_z(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

const Mat3& skew_z() {
  static const Mat3 k = (Mat3() << 0, -1, 0, 1, 0, 0, 0, 0, 0).finished();
  return k;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

SE3Transform SE3Transform::from_rpy(double roll, double pitch, double yaw,
                                    const Vec3& t) {
  const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return {r, t};
}

Mat4 SE3Transform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

SE3Transform SE3Transform::inverse() const {
  SE3Transform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

SE3Transform SE3Transform::operator*(const SE3Transform& other) const {
  SE3Transform out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

Vec3 SE3Transform::operator*(const Vec3& p) const {
  return rotation * p + translation;
}

double SE3Transform::rotation_angle() const {
  const double c = std::clamp(0.5 * (rotation.trace() - 1.0), -1.0, 1.0);
  return std::acos(c);
}

double SE3Transform::yaw() const {
  return std::atan2(rotation(1, 0), rotation(0, 0));
}

bool SE3Transform::is_orthonormal(double tol) const {
  const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  return err.norm() < tol && rotation.determinant() > 0.0;
}

Vec6 Twist6::vector() const {
  Vec6 v;
  v << rho, phi;
  return v;
}

SE3Transform se3_exp(const Twist6& xi) {
  const double theta = xi.phi.norm();
  double a, b, c;
  rotation_coefficients(theta, a, b, c);
  const Mat3 px = skew(xi.phi);
  const Mat3 px2 = px * px;
  SE3Transform out;
  out.rotation = Mat3::Identity() + a * px + b * px2;
  const Mat3 v = Mat3::Identity() + b * px + c * px2;
  out.translation = v * xi.rho;
  return out;
}

Twist6 se3_log(const SE3Transform& T) {
  const double theta = T.rotation_angle();
  if (theta > kPi - 1e-6) {
    throw std::domain_error("se3_log: rotation angle within 1e-6 of pi");
  }
  Vec3 phi;
  const Mat3 anti = T.rotation - T.rotation.transpose();
  Vec3 axis_vec{anti(2, 1), anti(0, 2), anti(1, 0)};
  if (theta < kSmallAngle) {
    phi = 0.5 * (1.0 + theta * theta / 6.0) * axis_vec;
  } else {
    phi = theta / (2.0 * std::sin(theta)) * axis_vec;
  }

  // V^-1 = I - px/2 + (1/theta^2 - (1+cos)/(2 theta sin)) px^2
  const Mat3 px = skew(phi);
  const Mat3 px2 = px * px;
  double coeff;
  if (theta < kSmallAngle) {
    coeff = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    coeff = 1.0 / (theta * theta) -
            (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  const Mat3 vinv = Mat3::Identity() - 0.5 * px + coeff * px2;
  return {vinv * T.translation, phi};
}

SE3Transform pose4_to_se3(const Pose4& p) {
  return {rot_z(p.theta), p.translation()};
}

Pose4 se3_to_pose4(const SE3Transform& T) {
  return {T.translation.x(), T.translation.y(), T.translation.z(), T.yaw()};
}

Vec4 error_4dof(const SE3Transform& T1, const SE3Transform& T2) {
  const Twist6 xi = se3_log(T1.inverse() * T2);
  return {xi.rho.x(), xi.rho.y(), xi.rho.z(), xi.phi.z()};
}

Pose4 compose(const Pose4& a, const Pose4& b) {
  const Vec3 t = a.translation() + rot_z(a.theta) * b.translation();
  return {t.x(), t.y(), t.z(), a.theta + b.theta};
}

Pose4 inverse(const Pose4& a) {
  const Vec3 t = -(rot_z(-a.theta) * a.translation());
  return {t.x(), t.y(), t.z(), -a.theta};
}

Pose4 relative(const Pose4& a, const Pose4& b) {
  const Vec3 t = rot_z(-a.theta) * (b.translation() - a.translation());
  return {t.x(), t.y(), t.z(), b.theta - a.theta};
}

Pose4 compose_jac(const Pose4& a, const Pose4& b, Mat4* Ja, Mat4* Jb) {
  const Mat3 ra = rot_z(a.theta);
  if (Ja) {
    Ja->setIdentity();
    Ja->block<3, 1>(0, 3) = skew_z() * (ra * b.translation());
  }
  if (Jb) {
    Jb->setZero();
    Jb->block<3, 3>(0, 0) = ra;
    (*Jb)(3, 3) = 1.0;
  }
  return compose(a, b);
}

Pose4 inverse_jac(const Pose4& a, Mat4* Ja) {
  const Pose4 inv = inverse(a);
  if (Ja) {
    Ja->setZero();
    Ja->block<3, 3>(0, 0) = -rot_z(-a.theta);
    Ja->block<3, 1>(0, 3) = -(skew_z() * inv.translation());
    (*Ja)(3, 3) = -1.0;
  }
  return inv;
}

Pose4 relative_jac(const Pose4& a, const Pose4& b, Mat4* Ja, Mat4* Jb) {
  const Pose4 rel = relative(a, b);
  const Mat3 rat = rot_z(-a.theta);
  if (Ja) {
    Ja->setZero();
    Ja->block<3, 3>(0, 0) = -rat;
    Ja->block<3, 1>(0, 3) = -(skew_z() * rel.translation());
    (*Ja)(3, 3) = -1.0;
  }
  if (Jb) {
    Jb->setZero();
    Jb->block<3, 3>(0, 0) = rat;
    (*Jb)(3, 3) = 1.0;
  }
  return rel;
}

Vec4 error4_between(const Pose4& z, const Pose4& zhat, Mat4* Jz, Mat4* Jzhat) {
  const double delta = wrap_angle(zhat.theta - z.theta);
  const Mat3 rzt = rot_z(-z.theta);
  const Vec3 w = rzt * (zhat.translation() - z.translation());
  const Mat3 vinv = yaw_vinv(delta);

  Vec4 e;
  e.head<3>() = vinv * w;
  e(3) = delta;

  if (Jzhat) {
    Jzhat->setZero();
    Jzhat->block<3, 3>(0, 0) = vinv * rzt;
    Jzhat->block<3, 1>(0, 3) = yaw_vinv_deriv(delta) * w;
    (*Jzhat)(3, 3) = 1.0;
  }
  if (Jz) {
    Jz->setZero();
    Jz->block<3, 3>(0, 0) = -(vinv * rzt);
    Jz->block<3, 1>(0, 3) = -(yaw_vinv_deriv(delta) * w) - vinv * (skew_z() * w);
    (*Jz)(3, 3) = -1.0;
  }
  return e;
}

Mat4 transform_covariance(const Mat4& jacobian, const Mat4& sigma) {
  return jacobian * sigma * jacobian.transpose();
}

}  // namespace rloc
