#include "seampos/geodesy.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "seampos/error.hpp"

namespace seampos {

namespace {

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace

void FrameOrigin::check() const {
  if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
    throw Error(ErrorCode::InvalidConfig, "origin latitude out of range");
  }
  if (!std::isfinite(lon_deg) || lon_deg < -180.0 || lon_deg > 180.0) {
    throw Error(ErrorCode::InvalidConfig, "origin longitude out of range");
  }
  if (!std::isfinite(alt_m)) throw Error(ErrorCode::InvalidConfig, "origin altitude must be finite");
}

FrameOrigin FrameOrigin::from_document(const Document& doc) {
  FrameOrigin o;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "lat") o.lat_deg = value.get<double>();
      else if (key == "lon") o.lon_deg = value.get<double>();
      else if (key == "alt") o.alt_m = value.get<double>();
      else throw Error(ErrorCode::InvalidConfig, "unknown origin key '" + key + "'");
    }
    if (!doc.contains("lat") || !doc.contains("lon")) {
      throw Error(ErrorCode::InvalidConfig, "origin needs lat and lon");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("origin: ") + e.what());
  }
  o.check();
  return o;
}

Document FrameOrigin::to_document() const { return Document{{"lat", lat_deg}, {"lon", lon_deg}, {"alt", alt_m}}; }

Eigen::Vector3d geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m) {
  const double lat = deg2rad(lat_deg);
  const double lon = deg2rad(lon_deg);
  const double s = std::sin(lat);
  const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
  return {(n + alt_m) * std::cos(lat) * std::cos(lon), (n + alt_m) * std::cos(lat) * std::sin(lon),
          (n * (1.0 - kWgs84E2) + alt_m) * s};
}

Geodetic ecef_to_geodetic(const Eigen::Vector3d& ecef) {
  const double p = std::hypot(ecef.x(), ecef.y());
  const double lon = std::atan2(ecef.y(), ecef.x());
  double lat = std::atan2(ecef.z(), p * (1.0 - kWgs84E2));
  double alt = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double s = std::sin(lat);
    const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
    alt = p / std::cos(lat) - n;
    const double next = std::atan2(ecef.z(), p * (1.0 - kWgs84E2 * n / (n + alt)));
    if (std::abs(next - lat) < 1e-15) {
      lat = next;
      break;
    }
    lat = next;
  }
  const double s = std::sin(lat);
  const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
  alt = std::abs(std::cos(lat)) > 1e-9 ? p / std::cos(lat) - n : std::abs(ecef.z()) - n * (1.0 - kWgs84E2);
  return {rad2deg(lat), rad2deg(lon), alt};
}

Eigen::Matrix3d ecef_to_ned_rotation(double lat_deg, double lon_deg) {
  const double lat = deg2rad(lat_deg);
  const double lon = deg2rad(lon_deg);
  const double sl = std::sin(lat), cl = std::cos(lat), so = std::sin(lon), co = std::cos(lon);
  Eigen::Matrix3d r;
  r << -sl * co, -sl * so, cl,
       -so, co, 0.0,
       -cl * co, -cl * so, -sl;
  return r;
}

Eigen::Vector3d geodetic_to_ned(double lat_deg, double lon_deg, double alt_m, const FrameOrigin& origin) {
  const Eigen::Vector3d delta =
      geodetic_to_ecef(lat_deg, lon_deg, alt_m) - geodetic_to_ecef(origin.lat_deg, origin.lon_deg, origin.alt_m);
  return ecef_to_ned_rotation(origin.lat_deg, origin.lon_deg) * delta;
}

Geodetic ned_to_geodetic(const Eigen::Vector3d& ned, const FrameOrigin& origin) {
  const Eigen::Vector3d ecef = geodetic_to_ecef(origin.lat_deg, origin.lon_deg, origin.alt_m) +
                               ecef_to_ned_rotation(origin.lat_deg, origin.lon_deg).transpose() * ned;
  return ecef_to_geodetic(ecef);
}

}  // namespace seampos
