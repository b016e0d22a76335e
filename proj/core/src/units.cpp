#include "seampos/units.hpp"

#include <array>
#include <numbers>

namespace seampos {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

constexpr std::array kRegistry{
    // acceleration -> m/s²
    UnitConversion{"m/s^2", Quantity::Acceleration, 1.0},
    UnitConversion{"m/s²", Quantity::Acceleration, 1.0},
    UnitConversion{"m/s2", Quantity::Acceleration, 1.0},
    UnitConversion{"g", Quantity::Acceleration, kStandardGravity},
    UnitConversion{"mg", Quantity::Acceleration, kStandardGravity * 1e-3},
    UnitConversion{"cm/s^2", Quantity::Acceleration, 1e-2},
    UnitConversion{"ft/s^2", Quantity::Acceleration, 0.3048},
    // angular rate -> rad/s
    UnitConversion{"rad/s", Quantity::AngularRate, 1.0},
    UnitConversion{"deg/s", Quantity::AngularRate, kDeg},
    UnitConversion{"°/s", Quantity::AngularRate, kDeg},
    UnitConversion{"dps", Quantity::AngularRate, kDeg},
    UnitConversion{"rpm", Quantity::AngularRate, 2.0 * std::numbers::pi / 60.0},
    // magnetic field -> µT
    UnitConversion{"uT", Quantity::MagneticField, 1.0},
    UnitConversion{"µT", Quantity::MagneticField, 1.0},
    UnitConversion{"nT", Quantity::MagneticField, 1e-3},
    UnitConversion{"mT", Quantity::MagneticField, 1e3},
    UnitConversion{"T", Quantity::MagneticField, 1e6},
    UnitConversion{"G", Quantity::MagneticField, 100.0},
    UnitConversion{"gauss", Quantity::MagneticField, 100.0},
    UnitConversion{"mG", Quantity::MagneticField, 0.1},
    // length -> m
    UnitConversion{"m", Quantity::Length, 1.0},
    UnitConversion{"cm", Quantity::Length, 1e-2},
    UnitConversion{"mm", Quantity::Length, 1e-3},
    UnitConversion{"km", Quantity::Length, 1e3},
    UnitConversion{"ft", Quantity::Length, 0.3048},
    // pressure -> mBar
    UnitConversion{"mBar", Quantity::Pressure, 1.0},
    UnitConversion{"mbar", Quantity::Pressure, 1.0},
    UnitConversion{"hPa", Quantity::Pressure, 1.0},
    UnitConversion{"Pa", Quantity::Pressure, 1e-2},
    UnitConversion{"kPa", Quantity::Pressure, 10.0},
    UnitConversion{"bar", Quantity::Pressure, 1e3},
    UnitConversion{"atm", Quantity::Pressure, 1013.25},
    UnitConversion{"inHg", Quantity::Pressure, 33.8638866667},
    UnitConversion{"mmHg", Quantity::Pressure, 1.33322387415},
    // speed -> m/s
    UnitConversion{"m/s", Quantity::Speed, 1.0},
    UnitConversion{"km/h", Quantity::Speed, 1.0 / 3.6},
    UnitConversion{"kn", Quantity::Speed, 1852.0 / 3600.0},
    UnitConversion{"knots", Quantity::Speed, 1852.0 / 3600.0},
    UnitConversion{"mph", Quantity::Speed, 0.44704},
    // angle -> degrees
    UnitConversion{"deg", Quantity::Angle, 1.0},
    UnitConversion{"°", Quantity::Angle, 1.0},
    UnitConversion{"rad", Quantity::Angle, 180.0 / std::numbers::pi},
    // plain numbers
    UnitConversion{"1", Quantity::Dimensionless, 1.0},
    UnitConversion{"count", Quantity::Count, 1.0},
    UnitConversion{"steps", Quantity::Count, 1.0},
};

}  // namespace

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::Acceleration: return "acceleration";
    case Quantity::AngularRate: return "angular_rate";
    case Quantity::MagneticField: return "magnetic_field";
    case Quantity::Length: return "length";
    case Quantity::Pressure: return "pressure";
    case Quantity::Speed: return "speed";
    case Quantity::Angle: return "angle";
    case Quantity::Dimensionless: return "dimensionless";
    case Quantity::Count: return "count";
    case Quantity::Binary: return "binary";
  }
  return "unknown";
}

std::span<const UnitConversion> unit_registry() noexcept { return kRegistry; }

std::optional<double> unit_factor(Quantity quantity, std::string_view unit) noexcept {
  for (const auto& entry : kRegistry) {
    if (entry.quantity == quantity && entry.unit == unit) return entry.factor;
  }
  return std::nullopt;
}

std::string_view canonical_unit(Quantity quantity) noexcept {
  switch (quantity) {
    case Quantity::Acceleration: return "m/s^2";
    case Quantity::AngularRate: return "rad/s";
    case Quantity::MagneticField: return "uT";
    case Quantity::Length: return "m";
    case Quantity::Pressure: return "mBar";
    case Quantity::Speed: return "m/s";
    case Quantity::Angle: return "deg";
    case Quantity::Dimensionless: return "1";
    case Quantity::Count: return "count";
    case Quantity::Binary: return "base64";
  }
  return "";
}

}  // namespace seampos
