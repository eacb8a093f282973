/*
 * Copyright 2026 The mfnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MFNAV_SE3_HPP_
#define MFNAV_SE3_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mfnav {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

/// Rigid transform in 3D, translation plus unit quaternion.
struct Pose3 {
  Vec3 t = Vec3::Zero();
  Quat q = Quat::Identity();

  Pose3() = default;
  Pose3(const Vec3& t_, const Quat& q_) : t(t_), q(q_) {}

  static Pose3 from_xyz_yaw(double x, double y, double z, double yaw) {
    return Pose3(Vec3(x, y, z), Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));
  }

  Pose3 inverse() const {
    const Quat qi = q.conjugate();
    return Pose3(qi * (-t), qi);
  }

  Pose3 operator*(const Pose3& other) const {
    return Pose3(t + q * other.t, q * other.q);
  }

  Vec3 operator*(const Vec3& p) const { return t + q * p; }

  double yaw() const {
    const Mat3 r = q.toRotationMatrix();
    return std::atan2(r(1, 0), r(0, 0));
  }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Rotation-vector logarithm of a unit quaternion.
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  const double vn = q.vec().norm();
  if (vn < 1e-12) return 2.0 * q.vec();  // small-angle limit
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * q.vec();
}

/// Exponential map from a rotation vector to a unit quaternion.
inline Quat quat_exp(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
    q.normalize();
    return q;
  }
  const Vec3 axis = v / angle;
  return Quat(Eigen::AngleAxisd(angle, axis));
}

/// Inverse of the right Jacobian of SO(3) at rotation vector theta.
inline Mat3 so3_right_jacobian_inverse(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 w = skew(theta);
  if (angle < 1e-7) {
    return Mat3::Identity() + 0.5 * w + (1.0 / 12.0) * w * w;
  }
  const double c = 1.0 / (angle * angle) -
                   (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
  return Mat3::Identity() + 0.5 * w + c * w * w;
}

/// Planar rigid transform, used for loop closures from 2D scan alignment.
struct PlanarTransform {
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;

  Pose3 to_pose3() const { return Pose3::from_xyz_yaw(dx, dy, 0.0, dyaw); }

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    const double c = std::cos(dyaw), s = std::sin(dyaw);
    return {c * p.x() - s * p.y() + dx, s * p.x() + c * p.y() + dy};
  }
};

}  // namespace mfnav

#endif  // MFNAV_SE3_HPP_
