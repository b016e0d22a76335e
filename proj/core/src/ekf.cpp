#include "seampos/ekf.hpp"

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "seampos/error.hpp"
#include "seampos/units.hpp"

namespace seampos {

namespace {

double seconds_between(TimeNs from, TimeNs to) { return static_cast<double>(to - from) * 1e-9; }

void symmetrize(Matrix6d& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

std::string_view to_string(MeasurementKind kind) noexcept {
  switch (kind) {
    case MeasurementKind::GNSS: return "GNSS";
    case MeasurementKind::UWB: return "UWB";
    case MeasurementKind::VPS: return "VPS";
    case MeasurementKind::Bluetooth: return "Bluetooth";
  }
  return "";
}

std::optional<MeasurementKind> measurement_kind_from_string(std::string_view name) noexcept {
  for (auto k : {MeasurementKind::GNSS, MeasurementKind::UWB, MeasurementKind::VPS, MeasurementKind::Bluetooth}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Matrix6d transition_matrix(double dt) {
  Matrix6d F = Matrix6d::Identity();
  F.topRightCorner<3, 3>() = dt * Eigen::Matrix3d::Identity();
  return F;
}

Matrix63d control_matrix(double dt) {
  Matrix63d B;
  B.topRows<3>() = 0.5 * dt * dt * Eigen::Matrix3d::Identity();
  B.bottomRows<3>() = dt * Eigen::Matrix3d::Identity();
  return B;
}

Matrix6d process_noise(double dt, double sigma_a) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const double dt2 = dt * dt;
  Matrix6d Q;
  Q.topLeftCorner<3, 3>() = dt2 * dt2 / 4.0 * I;
  Q.topRightCorner<3, 3>() = dt2 * dt / 2.0 * I;
  Q.bottomLeftCorner<3, 3>() = dt2 * dt / 2.0 * I;
  Q.bottomRightCorner<3, 3>() = dt2 * I;
  return sigma_a * sigma_a * Q;
}

EkfState predict_ned(const EkfState& state, const Eigen::Vector3d& a_ned, TimeNs t, double sigma_a) {
  if (t < state.t) throw Error(ErrorCode::NonMonotonicTime, "prediction target precedes filter time");
  const double dt = seconds_between(state.t, t);
  if (dt > kMaxPredictStepSeconds) {
    throw Error(ErrorCode::GapTooLarge, "prediction step of " + std::to_string(dt) + " s exceeds 1 s");
  }
  const Matrix6d F = transition_matrix(dt);
  EkfState next;
  next.x = F * state.x + control_matrix(dt) * a_ned;
  next.P = F * state.P * F.transpose() + process_noise(dt, sigma_a);
  symmetrize(next.P);
  next.t = t;
  return next;
}

EkfState predict(const EkfState& state, const ImuSample& imu, double sigma_a,
                 const std::optional<Eigen::Vector3d>& gravity_ned) {
  const Eigen::Matrix3d C = imu.q ? quat_to_rotation(*imu.q) : Eigen::Matrix3d::Identity();
  const Eigen::Vector3d g = gravity_ned.value_or(Eigen::Vector3d(0.0, 0.0, kStandardGravity));
  return predict_ned(state, C * imu.a - g, imu.t, sigma_a);
}

EkfState update(const EkfState& state, const MeasurementPacket& meas, const FrameOrigin& origin) {
  if (meas.t < state.t) throw Error(ErrorCode::NonMonotonicTime, "measurement precedes filter time");
  const Eigen::Vector3d z = meas.kind == MeasurementKind::GNSS
                                ? geodetic_to_ned(meas.z.x(), meas.z.y(), meas.z.z(), origin)
                                : meas.z;
  Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
  H.leftCols<3>() = Eigen::Matrix3d::Identity();

  const Eigen::Vector3d y = z - H * state.x;
  const Eigen::Matrix3d S = H * state.P * H.transpose() + meas.R;
  const Eigen::LLT<Eigen::Matrix3d> llt(0.5 * (S + S.transpose()));
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw Error(ErrorCode::SingularInnovation, "innovation covariance is not positive definite");
  }
  const Matrix63d K = llt.solve(H * state.P).transpose();

  EkfState next;
  next.x = state.x + K * y;
  const Matrix6d IKH = Matrix6d::Identity() - K * H;
  next.P = IKH * state.P * IKH.transpose() + K * meas.R * K.transpose();
  symmetrize(next.P);
  next.t = meas.t;
  return next;
}

Eigen::Matrix3d default_R(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::GNSS: return 655.00 * Eigen::Matrix3d::Identity();
    case MeasurementKind::UWB: return 1.00 * Eigen::Matrix3d::Identity();
    case MeasurementKind::VPS: return 0.15 * Eigen::Matrix3d::Identity();
    case MeasurementKind::Bluetooth: return 9.00 * Eigen::Matrix3d::Identity();
  }
  return Eigen::Matrix3d::Identity();
}

double variance_from_stats(double mean, double std_dev) { return mean * mean + std_dev * std_dev; }

bool is_symmetric_psd(const Matrix6d& P, double tol) {
  if (!P.allFinite()) return false;
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(P, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace seampos
