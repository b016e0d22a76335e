#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "seampos/error.hpp"
#include "seampos/geodesy.hpp"
#include "seampos/rotation.hpp"

using namespace seampos;

namespace {

// Hamilton product of (x, y, z, w) quaternions.
Eigen::Vector4d hamilton(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  const double ax = a(0), ay = a(1), az = a(2), aw = a(3);
  const double bx = b(0), by = b(1), bz = b(2), bw = b(3);
  return {aw * bx + ax * bw + ay * bz - az * by, aw * by - ax * bz + ay * bw + az * bx,
          aw * bz + ax * by - ay * bx + az * bw, aw * bw - ax * bx - ay * by - az * bz};
}

Eigen::Vector3d sandwich(const Eigen::Vector4d& q, const Eigen::Vector3d& v) {
  const Eigen::Vector4d conj(-q(0), -q(1), -q(2), q(3));
  const Eigen::Vector4d r = hamilton(hamilton(q, Eigen::Vector4d(v(0), v(1), v(2), 0.0)), conj);
  return r.head<3>();
}

Eigen::Vector4d random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

}  // namespace

TEST(Rotation, IdentityQuaternion) {
  EXPECT_TRUE(quat_to_rotation(0, 0, 0, 1).isApprox(Eigen::Matrix3d::Identity(), 1e-15));
}

TEST(Rotation, QuarterTurnAboutZMapsBodyXToNedY) {
  const double h = std::sqrt(2.0) / 2.0;
  const Eigen::Matrix3d C = quat_to_rotation(0, 0, h, h);
  const Eigen::Vector3d oracle = sandwich(Eigen::Vector4d(0, 0, h, h), Eigen::Vector3d::UnitX());
  EXPECT_NEAR((C * Eigen::Vector3d::UnitX() - oracle).norm(), 0.0, 1e-12);
  EXPECT_NEAR((C * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 0.0, 1e-12);
}

TEST(Rotation, MatchesSandwichProductAndIsProper) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto q = random_unit_quaternion(rng);
    const Eigen::Matrix3d C = quat_to_rotation(q);
    EXPECT_TRUE((C.transpose() * C).isApprox(Eigen::Matrix3d::Identity(), 1e-9));
    EXPECT_NEAR(C.determinant(), 1.0, 1e-9);
    const Eigen::Vector3d v(n(rng), n(rng), n(rng));
    EXPECT_NEAR((C * v - sandwich(q, v)).norm(), 0.0, 1e-12);
    EXPECT_TRUE(quat_to_rotation(QuatXyzw(-q)).isApprox(C, 1e-15));
  }
}

TEST(Rotation, NormTolerance) {
  EXPECT_NO_THROW(quat_to_rotation(0, 0, 0, 1.0009));
  try {
    (void)quat_to_rotation(0, 0, 0, 2.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonUnitQuaternion);
  }
}

TEST(Rotation, GyroIntegrationAccumulatesAngle) {
  QuatXyzw q(0, 0, 0, 1);
  for (int i = 0; i < 100; ++i) q = integrate_gyro(q, Eigen::Vector3d(0, 0, std::numbers::pi / 2.0), 0.01);
  const double h = std::sqrt(2.0) / 2.0;
  EXPECT_TRUE(quat_to_rotation(q).isApprox(quat_to_rotation(0, 0, h, h), 1e-9));
  EXPECT_TRUE(integrate_gyro(q, Eigen::Vector3d::Zero(), 1.0).isApprox(q, 1e-15));
}

TEST(Geodesy, OriginMapsToZero) {
  const FrameOrigin o{47.3769, 8.5417, 408.0};
  EXPECT_NEAR(geodetic_to_ned(o.lat_deg, o.lon_deg, o.alt_m, o).norm(), 0.0, 1e-9);
}

TEST(Geodesy, NorthStepMatchesMeridianRadius) {
  const FrameOrigin o{47.3769, 8.5417, 408.0};
  const double phi = o.lat_deg * std::numbers::pi / 180.0;
  const double s = std::sin(phi);
  const double M = kWgs84A * (1.0 - kWgs84E2) / std::pow(1.0 - kWgs84E2 * s * s, 1.5);
  const double expected_north = (M + o.alt_m) * 1e-5 * std::numbers::pi / 180.0;
  const Eigen::Vector3d ned = geodetic_to_ned(o.lat_deg + 1e-5, o.lon_deg, o.alt_m, o);
  EXPECT_NEAR(ned.x(), expected_north, 1e-6);
  EXPECT_NEAR(expected_north, 1.1116, 5e-3);
  EXPECT_NEAR(ned.y(), 0.0, 1e-9);
  EXPECT_NEAR(ned.z(), 0.0, 1e-6);
}

TEST(Geodesy, UpIsNegativeDown) {
  const FrameOrigin o{10.0, -20.0, 5.0};
  const Eigen::Vector3d ned = geodetic_to_ned(o.lat_deg, o.lon_deg, o.alt_m + 10.0, o);
  EXPECT_NEAR(ned.z(), -10.0, 1e-9);
  EXPECT_NEAR(ned.head<2>().norm(), 0.0, 1e-9);
}

TEST(Geodesy, RoundTripOverAKilometre) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-179.0, 179.0), off(-500.0, 500.0);
  for (int i = 0; i < 500; ++i) {
    const FrameOrigin o{lat(rng), lon(rng), off(rng)};
    const Eigen::Vector3d p(off(rng), off(rng), off(rng) / 10.0);
    const Geodetic g = ned_to_geodetic(p, o);
    EXPECT_NEAR((geodetic_to_ned(g.lat_deg, g.lon_deg, g.alt_m, o) - p).norm(), 0.0, 1e-6);
  }
}

TEST(Geodesy, EcefRoundTrip) {
  const Eigen::Vector3d e = geodetic_to_ecef(47.0, 8.0, 500.0);
  const Geodetic g = ecef_to_geodetic(e);
  EXPECT_NEAR(g.lat_deg, 47.0, 1e-10);
  EXPECT_NEAR(g.lon_deg, 8.0, 1e-10);
  EXPECT_NEAR(g.alt_m, 500.0, 1e-6);
  EXPECT_NEAR(geodetic_to_ecef(0, 0, 0).x(), kWgs84A, 1e-9);
}

TEST(FrameOrigin, DocumentAndRanges) {
  const auto o = FrameOrigin::from_document(Document::parse(R"({"lat":1.5,"lon":-3,"alt":7})"));
  EXPECT_EQ(o.to_document(), Document::parse(R"({"lat":1.5,"lon":-3.0,"alt":7.0})"));
  EXPECT_THROW(FrameOrigin::from_document(Document::parse(R"({"lat":91,"lon":0,"alt":0})")), Error);
  EXPECT_THROW(FrameOrigin::from_document(Document::parse(R"({"lat":0,"lon":0,"alt":0,"x":1})")), Error);
}
