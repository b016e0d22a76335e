#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/units.hpp"

namespace seampos {

/// UNIX epoch nanoseconds.
using TimeNs = std::int64_t;

/// Smallest accepted record timestamp; anything below is taken as a
/// mis-scaled (seconds/milliseconds) value.
inline constexpr TimeNs kMinRecordTimeNs = 1'000'000'000'000'000;

enum class SensorKind {
  Magnetometer,
  Gyroscope,
  Accelerometer,
  Gravity,
  UWB,
  Bluetooth,
  Pedometer,
  Orientation,
  Barometer,
  Location,
  Image,
};

inline constexpr std::array kAllSensorKinds{
    SensorKind::Magnetometer, SensorKind::Gyroscope, SensorKind::Accelerometer, SensorKind::Gravity,
    SensorKind::UWB,          SensorKind::Bluetooth, SensorKind::Pedometer,     SensorKind::Orientation,
    SensorKind::Barometer,    SensorKind::Location,  SensorKind::Image,
};

std::string_view to_string(SensorKind kind) noexcept;
std::optional<SensorKind> sensor_kind_from_string(std::string_view name) noexcept;

enum class FieldType {
  Number,   // IEEE-754 double (integers widen silently)
  Integer,  // integral, non-negative count
  Vector3,  // array of exactly three numbers
  Base64,   // base64 text
};

std::string_view to_string(FieldType type) noexcept;

struct FieldSpec {
  std::string name;
  FieldType type = FieldType::Number;
  Quantity quantity = Quantity::Dimensionless;
  std::optional<double> min;
  std::optional<double> max;
};

/// Layout of one sensor kind's record. `wrapped` kinds keep their readings
/// under "values"; the others (Pedometer, Image) put them beside name/time.
struct KindLayout {
  SensorKind kind;
  bool wrapped = true;
  std::vector<FieldSpec> fields;
  std::string description;
};

/// Canonical layout of every sensor kind.
const KindLayout& kind_layout(SensorKind kind);

/// Looks up a field of `kind`, throwing Error(UnknownField) when absent.
const FieldSpec& field_spec(SensorKind kind, std::string_view field);

// --- typed payloads ---------------------------------------------------------

struct AxisReading {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const AxisReading&, const AxisReading&) = default;
};

struct PositionReading {
  std::array<double, 3> position{};
  friend bool operator==(const PositionReading&, const PositionReading&) = default;
};

struct StepCount {
  std::int64_t steps = 0;
  friend bool operator==(const StepCount&, const StepCount&) = default;
};

struct OrientationReading {
  double qx = 0.0;
  double qy = 0.0;
  double qz = 0.0;
  double qw = 1.0;
  friend bool operator==(const OrientationReading&, const OrientationReading&) = default;
};

struct BarometerReading {
  double relative_altitude = 0.0;
  double pressure = 0.0;
  friend bool operator==(const BarometerReading&, const BarometerReading&) = default;
};

struct LocationReading {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;
  double speed = 0.0;
  double speed_accuracy = 0.0;
  double horizontal_accuracy = 0.0;
  double vertical_accuracy = 0.0;
  friend bool operator==(const LocationReading&, const LocationReading&) = default;
};

struct ImageData {
  std::string base64;
  friend bool operator==(const ImageData&, const ImageData&) = default;
};

using RecordPayload = std::variant<AxisReading, PositionReading, StepCount, OrientationReading,
                                   BarometerReading, LocationReading, ImageData>;

/// One canonical sensor record. Construct through `from_document` (which
/// validates) or `make`; both reject payloads that do not fit the kind.
class StandardizedRecord {
 public:
  static StandardizedRecord make(SensorKind kind, TimeNs time, RecordPayload payload);
  static StandardizedRecord from_document(const Document& doc);

  SensorKind kind() const noexcept { return kind_; }
  TimeNs time() const noexcept { return time_; }
  const RecordPayload& payload() const noexcept { return payload_; }

  Document to_document() const;

  friend bool operator==(const StandardizedRecord&, const StandardizedRecord&) = default;

 private:
  StandardizedRecord(SensorKind kind, TimeNs time, RecordPayload payload)
      : kind_(kind), time_(time), payload_(std::move(payload)) {}

  SensorKind kind_;
  TimeNs time_;
  RecordPayload payload_;
};

/// Time-ordered sequence of records.
class StandardizedDataset {
 public:
  StandardizedDataset() = default;
  /// Throws Error(InvalidRecord) if records are not sorted by time.
  explicit StandardizedDataset(std::vector<StandardizedRecord> records);

  /// Validates every element (strict schema plus ordering).
  static StandardizedDataset from_documents(const Document& array);
  static StandardizedDataset from_documents(std::span<const Document> docs);
  static StandardizedDataset from_documents(const std::vector<Document>& docs) {
    return from_documents(std::span<const Document>(docs));
  }

  const std::vector<StandardizedRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  Document to_document() const;  // root array
  std::vector<Document> to_documents() const;

  friend bool operator==(const StandardizedDataset&, const StandardizedDataset&) = default;

 private:
  std::vector<StandardizedRecord> records_;
};

/// One unstandardized entry as received from a source.
struct RawPayload {
  std::string source_id;
  TimeNs received_at = 0;
  Document body;
};

/// Builds a RawPayload, rejecting received_at <= 0.
RawPayload make_raw_payload(std::string source_id, TimeNs received_at, Document body);

// --- normalization ----------------------------------------------------------

/// Converts a numeric epoch value (any of s/ms/µs/ns, chosen by magnitude),
/// a numeric string, or an ISO-8601 / RFC-3339 string into UNIX nanoseconds.
TimeNs normalize_timestamp(const Document& raw);
TimeNs normalize_timestamp(std::string_view text);
TimeNs normalize_timestamp(double value);
TimeNs normalize_timestamp(std::int64_t value);

/// Converts `value`, expressed in `declared_unit`, into the canonical unit of
/// `kind`.`field`. Without a declared unit the value is returned unchanged.
double coerce_units(SensorKind kind, std::string_view field, double value,
                    std::optional<std::string_view> declared_unit);

/// Inverse of coerce_units: canonical value expressed in `unit`.
double from_canonical_units(SensorKind kind, std::string_view field, double canonical_value,
                            std::string_view unit);

/// Completes a partial field object of `kind` with explicit nulls for every
/// required field it lacks. For wrapped kinds the fragment is the "values"
/// object; for Pedometer and Image it is the record-level field object.
Document mark_missing(SensorKind kind, const Document& fragment);

}  // namespace seampos
