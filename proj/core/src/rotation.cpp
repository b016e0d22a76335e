#include "seampos/rotation.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "seampos/error.hpp"

namespace seampos {

namespace {

Eigen::Quaterniond checked(const QuatXyzw& q) {
  const double norm = q.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kQuaternionNormTolerance) {
    throw Error(ErrorCode::NonUnitQuaternion, "|q| = " + std::to_string(norm));
  }
  return Eigen::Quaterniond(q.w(), q.x(), q.y(), q.z()).normalized();
}

}  // namespace

Eigen::Matrix3d quat_to_rotation(const QuatXyzw& q) { return checked(q).toRotationMatrix(); }

Eigen::Matrix3d quat_to_rotation(double qx, double qy, double qz, double qw) {
  return quat_to_rotation(QuatXyzw(qx, qy, qz, qw));
}

QuatXyzw integrate_gyro(const QuatXyzw& q, const Eigen::Vector3d& omega, double dt) {
  const Eigen::Quaterniond start = checked(q);
  const double angle = omega.norm() * dt;
  Eigen::Quaterniond delta = Eigen::Quaterniond::Identity();
  if (angle > 0.0) delta = Eigen::Quaterniond(Eigen::AngleAxisd(angle, omega.normalized()));
  const Eigen::Quaterniond out = (start * delta).normalized();
  return {out.x(), out.y(), out.z(), out.w()};
}

}  // namespace seampos
