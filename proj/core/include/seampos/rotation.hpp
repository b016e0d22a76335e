#pragma once

#include <Eigen/Core>

namespace seampos {

/// Allowed deviation of |q| from 1.
inline constexpr double kQuaternionNormTolerance = 1e-3;

/// Quaternion stored as (qx, qy, qz, qw).
using QuatXyzw = Eigen::Vector4d;

/// Body-to-NED rotation. The quaternion is renormalized first; throws
/// Error(NonUnitQuaternion) when |q| is off by more than the tolerance.
Eigen::Matrix3d quat_to_rotation(const QuatXyzw& q);
Eigen::Matrix3d quat_to_rotation(double qx, double qy, double qz, double qw);

/// Propagates q by body rate `omega` (rad/s) over `dt` seconds.
QuatXyzw integrate_gyro(const QuatXyzw& q, const Eigen::Vector3d& omega, double dt);

}  // namespace seampos
