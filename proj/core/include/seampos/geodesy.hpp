#pragma once

#include <Eigen/Core>

#include "seampos/document.hpp"

namespace seampos {

/// WGS-84 ellipsoid.
inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

struct Geodetic {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;
};

/// Anchor of the local north-east-down frame.
struct FrameOrigin {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;

  /// Throws Error(InvalidConfig) outside latitude [-90, 90] / longitude [-180, 180].
  void check() const;

  static FrameOrigin from_document(const Document& doc);
  Document to_document() const;
};

Eigen::Vector3d geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m);
Geodetic ecef_to_geodetic(const Eigen::Vector3d& ecef);

/// Rotation taking ECEF vectors into the NED axes at the origin.
Eigen::Matrix3d ecef_to_ned_rotation(double lat_deg, double lon_deg);

Eigen::Vector3d geodetic_to_ned(double lat_deg, double lon_deg, double alt_m, const FrameOrigin& origin);
Geodetic ned_to_geodetic(const Eigen::Vector3d& ned, const FrameOrigin& origin);

}  // namespace seampos
