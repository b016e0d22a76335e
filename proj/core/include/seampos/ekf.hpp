#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "seampos/geodesy.hpp"
#include "seampos/rotation.hpp"
#include "seampos/schema.hpp"

namespace seampos {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;

/// Position and velocity in the local NED frame with covariance.
struct EkfState {
  Vector6d x = Vector6d::Zero();
  Matrix6d P = Matrix6d::Zero();
  TimeNs t = 0;
};

/// One inertial sample. Only `a` and `q` drive prediction; the rate and
/// field vectors are carried for completeness.
struct ImuSample {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();      // m/s^2, body frame
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();  // rad/s
  Eigen::Vector3d m = Eigen::Vector3d::Zero();      // uT
  std::optional<QuatXyzw> q;                        // body-to-NED; identity when absent
  TimeNs t = 0;
};

enum class MeasurementKind { GNSS, UWB, VPS, Bluetooth };

std::string_view to_string(MeasurementKind kind) noexcept;
std::optional<MeasurementKind> measurement_kind_from_string(std::string_view name) noexcept;

/// z is geodetic [lat deg, lon deg, alt m] for GNSS and local NED metres otherwise.
struct MeasurementPacket {
  MeasurementKind kind = MeasurementKind::UWB;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  TimeNs t = 0;
};

inline constexpr double kDefaultSigmaA = 0.35;
inline constexpr double kMaxPredictStepSeconds = 1.0;

Matrix6d transition_matrix(double dt);
Matrix63d control_matrix(double dt);
Matrix6d process_noise(double dt, double sigma_a);

/// Constant-acceleration propagation with an NED acceleration already
/// gravity-compensated. Throws NonMonotonicTime when t < state.t and
/// GapTooLarge when the step exceeds one second.
EkfState predict_ned(const EkfState& state, const Eigen::Vector3d& a_ned, TimeNs t, double sigma_a);

/// a_ned = C(q) a_body - g_ned followed by predict_ned. `gravity_ned`
/// defaults to [0, 0, 9.80665].
EkfState predict(const EkfState& state, const ImuSample& imu, double sigma_a = kDefaultSigmaA,
                 const std::optional<Eigen::Vector3d>& gravity_ned = std::nullopt);

/// Position update in Joseph form. GNSS packets are mapped through
/// geodetic_to_ned first. Throws NonMonotonicTime when meas.t < state.t and
/// SingularInnovation when HPH' + R cannot be factored.
EkfState update(const EkfState& state, const MeasurementPacket& meas, const FrameOrigin& origin);

/// Measurement noise per sensor kind.
Eigen::Matrix3d default_R(MeasurementKind kind);

/// mean^2 + std^2.
double variance_from_stats(double mean, double std_dev);

/// Symmetric within `tol` and no eigenvalue below -tol.
bool is_symmetric_psd(const Matrix6d& P, double tol = 1e-9);

}  // namespace seampos
