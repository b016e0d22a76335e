#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace seampos {

/// Physical quantity of a schema field; decides which declared units apply.
enum class Quantity {
  Acceleration,   // m/s²
  AngularRate,    // rad/s
  MagneticField,  // µT
  Length,         // m
  Pressure,       // mBar
  Speed,          // m/s
  Angle,          // degrees
  Dimensionless,
  Count,
  Binary,
};

std::string_view to_string(Quantity q) noexcept;

/// One registered unit: canonical_value = value * factor.
struct UnitConversion {
  std::string_view unit;
  Quantity quantity;
  double factor;
};

inline constexpr double kStandardGravity = 9.80665;

/// All registered conversions, including the identity entry of each
/// canonical unit.
std::span<const UnitConversion> unit_registry() noexcept;

/// Scale factor to the canonical unit, or nullopt when `unit` is not
/// registered for `quantity`.
std::optional<double> unit_factor(Quantity quantity, std::string_view unit) noexcept;

std::string_view canonical_unit(Quantity quantity) noexcept;

}  // namespace seampos
