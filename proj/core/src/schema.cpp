#include "seampos/schema.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "seampos/error.hpp"
#include "seampos/validation.hpp"

namespace seampos {

namespace {

FieldSpec number(std::string name, Quantity q, std::optional<double> min = {}, std::optional<double> max = {}) {
  return FieldSpec{std::move(name), FieldType::Number, q, min, max};
}

std::vector<KindLayout> make_layouts() {
  std::vector<KindLayout> out;
  auto axes = [](Quantity q) {
    return std::vector<FieldSpec>{number("x", q), number("y", q), number("z", q)};
  };
  out.push_back({SensorKind::Magnetometer, true, axes(Quantity::MagneticField), "magnetic flux density per axis, uT"});
  out.push_back({SensorKind::Gyroscope, true, axes(Quantity::AngularRate), "angular rate per axis, rad/s"});
  out.push_back({SensorKind::Accelerometer, true, axes(Quantity::Acceleration), "specific force per axis, m/s^2"});
  out.push_back({SensorKind::Gravity, true, axes(Quantity::Acceleration), "gravity vector per axis, m/s^2"});
  out.push_back({SensorKind::UWB,
                 true,
                 {FieldSpec{"position", FieldType::Vector3, Quantity::Length, {}, {}}},
                 "tag position [x, y, z] in the local frame, m"});
  out.push_back({SensorKind::Bluetooth,
                 true,
                 {FieldSpec{"position", FieldType::Vector3, Quantity::Length, {}, {}}},
                 "beacon-derived position [x, y, z] in the local frame, m"});
  out.push_back({SensorKind::Pedometer,
                 false,
                 {FieldSpec{"steps", FieldType::Integer, Quantity::Count, 0.0, {}}},
                 "cumulative step count"});
  out.push_back({SensorKind::Orientation,
                 true,
                 {number("qx", Quantity::Dimensionless), number("qy", Quantity::Dimensionless),
                  number("qz", Quantity::Dimensionless), number("qw", Quantity::Dimensionless)},
                 "attitude as a unit quaternion (qx, qy, qz, qw)"});
  out.push_back({SensorKind::Barometer,
                 true,
                 {number("relative_altitude", Quantity::Length), number("pressure", Quantity::Pressure)},
                 "relative altitude in m and pressure in mBar"});
  out.push_back({SensorKind::Location,
                 true,
                 {number("latitude", Quantity::Angle, -90.0, 90.0), number("longitude", Quantity::Angle, -180.0, 180.0),
                  number("altitude", Quantity::Length), number("speed", Quantity::Speed),
                  number("speed_accuracy", Quantity::Speed), number("horizontal_accuracy", Quantity::Length),
                  number("vertical_accuracy", Quantity::Length)},
                 "geodetic fix: degrees, m, m/s and accuracies"});
  out.push_back({SensorKind::Image,
                 false,
                 {FieldSpec{"image", FieldType::Base64, Quantity::Binary, {}, {}}},
                 "image bytes as base64 text"});
  return out;
}

const std::vector<KindLayout>& layouts() {
  static const std::vector<KindLayout> table = make_layouts();
  return table;
}

Document payload_fields(const StandardizedRecord& record) {
  Document fields = Document::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AxisReading>) {
          fields["x"] = p.x;
          fields["y"] = p.y;
          fields["z"] = p.z;
        } else if constexpr (std::is_same_v<T, PositionReading>) {
          fields["position"] = Document::array({p.position[0], p.position[1], p.position[2]});
        } else if constexpr (std::is_same_v<T, StepCount>) {
          fields["steps"] = p.steps;
        } else if constexpr (std::is_same_v<T, OrientationReading>) {
          fields["qx"] = p.qx;
          fields["qy"] = p.qy;
          fields["qz"] = p.qz;
          fields["qw"] = p.qw;
        } else if constexpr (std::is_same_v<T, BarometerReading>) {
          fields["relative_altitude"] = p.relative_altitude;
          fields["pressure"] = p.pressure;
        } else if constexpr (std::is_same_v<T, LocationReading>) {
          fields["latitude"] = p.latitude;
          fields["longitude"] = p.longitude;
          fields["altitude"] = p.altitude;
          fields["speed"] = p.speed;
          fields["speed_accuracy"] = p.speed_accuracy;
          fields["horizontal_accuracy"] = p.horizontal_accuracy;
          fields["vertical_accuracy"] = p.vertical_accuracy;
        } else {
          fields["image"] = p.base64;
        }
      },
      record.payload());
  return fields;
}

bool payload_matches(SensorKind kind, const RecordPayload& payload) {
  switch (kind) {
    case SensorKind::Magnetometer:
    case SensorKind::Gyroscope:
    case SensorKind::Accelerometer:
    case SensorKind::Gravity: return std::holds_alternative<AxisReading>(payload);
    case SensorKind::UWB:
    case SensorKind::Bluetooth: return std::holds_alternative<PositionReading>(payload);
    case SensorKind::Pedometer: return std::holds_alternative<StepCount>(payload);
    case SensorKind::Orientation: return std::holds_alternative<OrientationReading>(payload);
    case SensorKind::Barometer: return std::holds_alternative<BarometerReading>(payload);
    case SensorKind::Location: return std::holds_alternative<LocationReading>(payload);
    case SensorKind::Image: return std::holds_alternative<ImageData>(payload);
  }
  return false;
}

[[noreturn]] void throw_invalid(const ValidationReport& report) {
  std::string msg;
  for (const auto& e : report.errors) {
    if (!msg.empty()) msg += "; ";
    msg += e.path + " " + std::string(to_string(e.code)) + " (" + e.message + ")";
  }
  throw Error(ErrorCode::InvalidRecord, msg);
}

// --- timestamps -------------------------------------------------------------

constexpr std::int64_t kMaxNs = std::numeric_limits<std::int64_t>::max();

std::int64_t scale_for_magnitude(double magnitude) {
  if (magnitude < 1e11) return 1'000'000'000;  // seconds (values below 1e8 included)
  if (magnitude < 1e14) return 1'000'000;      // milliseconds
  if (magnitude < 1e17) return 1'000;          // microseconds
  return 1;                                    // nanoseconds
}

TimeNs checked_mul(std::int64_t value, std::int64_t scale) {
  if (value > kMaxNs / scale) {
    throw Error(ErrorCode::UnparseableTimestamp, "timestamp out of representable range");
  }
  return value * scale;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(ErrorCode::UnparseableTimestamp, std::string(s));
  return v;
}

// YYYY-MM-DD[(T|t| )HH:MM[:SS[.f+]]][Z|z|(+|-)HH[:]MM]
std::optional<TimeNs> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!is_digits(s.substr(0, 4)) || !is_digits(s.substr(5, 2)) || !is_digits(s.substr(8, 2))) return std::nullopt;
  const year_month_day ymd{year{to_int(s.substr(0, 4))}, month{static_cast<unsigned>(to_int(s.substr(5, 2)))},
                           day{static_cast<unsigned>(to_int(s.substr(8, 2)))}};
  if (!ymd.ok()) return std::nullopt;
  std::int64_t secs_of_day = 0;
  std::int64_t frac_ns = 0;
  std::int64_t offset_secs = 0;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
    ++pos;
    if (s.size() < pos + 5 || s[pos + 2] != ':' || !is_digits(s.substr(pos, 2)) || !is_digits(s.substr(pos + 3, 2))) {
      return std::nullopt;
    }
    const int hh = to_int(s.substr(pos, 2));
    const int mm = to_int(s.substr(pos + 3, 2));
    int ss = 0;
    pos += 5;
    if (pos < s.size() && s[pos] == ':') {
      if (s.size() < pos + 3 || !is_digits(s.substr(pos + 1, 2))) return std::nullopt;
      ss = to_int(s.substr(pos + 1, 2));
      pos += 3;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        std::string_view digits = s.substr(start, pos - start);
        if (digits.empty()) return std::nullopt;
        std::int64_t scale = 100'000'000;
        for (std::size_t i = 0; i < digits.size() && i < 9; ++i, scale /= 10) frac_ns += (digits[i] - '0') * scale;
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    secs_of_day = hh * 3600 + mm * 60 + ss;
    if (pos < s.size()) {
      if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '-' ? -1 : 1;
        std::string_view rest = s.substr(pos + 1);
        std::string_view oh;
        std::string_view om;
        if (rest.size() == 5 && rest[2] == ':') {
          oh = rest.substr(0, 2);
          om = rest.substr(3, 2);
        } else if (rest.size() == 4) {
          oh = rest.substr(0, 2);
          om = rest.substr(2, 2);
        } else if (rest.size() == 2) {
          oh = rest;
          om = "00";
        } else {
          return std::nullopt;
        }
        if (!is_digits(oh) || !is_digits(om)) return std::nullopt;
        offset_secs = sign * (to_int(oh) * 3600 + to_int(om) * 60);
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t total_secs = days * 86400 + secs_of_day - offset_secs;
  if (total_secs < 0) throw Error(ErrorCode::NegativeTimestamp, std::string(s));
  return checked_mul(total_secs, 1'000'000'000) + frac_ns;
}

}  // namespace

std::string_view to_string(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Magnetometer: return "Magnetometer";
    case SensorKind::Gyroscope: return "Gyroscope";
    case SensorKind::Accelerometer: return "Accelerometer";
    case SensorKind::Gravity: return "Gravity";
    case SensorKind::UWB: return "UWB";
    case SensorKind::Bluetooth: return "Bluetooth";
    case SensorKind::Pedometer: return "Pedometer";
    case SensorKind::Orientation: return "Orientation";
    case SensorKind::Barometer: return "Barometer";
    case SensorKind::Location: return "Location";
    case SensorKind::Image: return "Image";
  }
  return "";
}

std::optional<SensorKind> sensor_kind_from_string(std::string_view name) noexcept {
  for (auto kind : kAllSensorKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(FieldType type) noexcept {
  switch (type) {
    case FieldType::Number: return "number";
    case FieldType::Integer: return "integer";
    case FieldType::Vector3: return "vector3";
    case FieldType::Base64: return "base64";
  }
  return "";
}

const KindLayout& kind_layout(SensorKind kind) { return layouts()[static_cast<std::size_t>(kind)]; }

const FieldSpec& field_spec(SensorKind kind, std::string_view field) {
  for (const auto& spec : kind_layout(kind).fields) {
    if (spec.name == field) return spec;
  }
  throw Error(ErrorCode::UnknownField,
              std::string(field) + " is not a field of " + std::string(to_string(kind)));
}

// --- records ----------------------------------------------------------------

StandardizedRecord StandardizedRecord::make(SensorKind kind, TimeNs time, RecordPayload payload) {
  if (!payload_matches(kind, payload)) {
    throw Error(ErrorCode::InvalidRecord, "payload type does not match kind " + std::string(to_string(kind)));
  }
  StandardizedRecord record(kind, time, std::move(payload));
  auto report = validate_record(record.to_document());
  if (!report.valid()) throw_invalid(report);
  return record;
}

StandardizedRecord StandardizedRecord::from_document(const Document& doc) {
  auto report = validate_record(doc);
  if (!report.valid()) throw_invalid(report);
  const auto kind = *sensor_kind_from_string(doc.at("name").get<std::string>());
  const TimeNs time = doc.at("time").get<TimeNs>();
  const auto& v = kind_layout(kind).wrapped ? doc.at("values") : doc;
  auto num = [&](const char* key) { return v.at(key).get<double>(); };
  RecordPayload payload;
  switch (kind) {
    case SensorKind::Magnetometer:
    case SensorKind::Gyroscope:
    case SensorKind::Accelerometer:
    case SensorKind::Gravity: payload = AxisReading{num("x"), num("y"), num("z")}; break;
    case SensorKind::UWB:
    case SensorKind::Bluetooth: {
      const auto& p = v.at("position");
      payload = PositionReading{{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()}};
      break;
    }
    case SensorKind::Pedometer: payload = StepCount{static_cast<std::int64_t>(std::llround(num("steps")))}; break;
    case SensorKind::Orientation: payload = OrientationReading{num("qx"), num("qy"), num("qz"), num("qw")}; break;
    case SensorKind::Barometer: payload = BarometerReading{num("relative_altitude"), num("pressure")}; break;
    case SensorKind::Location:
      payload = LocationReading{num("latitude"),       num("longitude"),           num("altitude"),
                                num("speed"),          num("speed_accuracy"),      num("horizontal_accuracy"),
                                num("vertical_accuracy")};
      break;
    case SensorKind::Image: payload = ImageData{v.at("image").get<std::string>()}; break;
  }
  return StandardizedRecord(kind, time, std::move(payload));
}

Document StandardizedRecord::to_document() const {
  Document doc = Document::object();
  doc["name"] = std::string(to_string(kind_));
  doc["time"] = time_;
  Document fields = payload_fields(*this);
  if (kind_layout(kind_).wrapped) {
    doc["values"] = std::move(fields);
  } else {
    for (auto& [key, value] : fields.items()) doc[key] = value;
  }
  return doc;
}

StandardizedDataset::StandardizedDataset(std::vector<StandardizedRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 1; i < records_.size(); ++i) {
    if (records_[i].time() < records_[i - 1].time()) {
      throw Error(ErrorCode::InvalidRecord, "records not sorted by time at index " + std::to_string(i));
    }
  }
}

StandardizedDataset StandardizedDataset::from_documents(const Document& array) {
  if (!array.is_array()) throw Error(ErrorCode::InvalidRecord, "dataset must be an array of records");
  std::vector<Document> docs(array.begin(), array.end());
  return from_documents(std::span<const Document>(docs));
}

StandardizedDataset StandardizedDataset::from_documents(std::span<const Document> docs) {
  auto report = validate_dataset(docs);
  if (!report.valid()) throw_invalid(report);
  std::vector<StandardizedRecord> records;
  records.reserve(docs.size());
  for (const auto& doc : docs) records.push_back(StandardizedRecord::from_document(doc));
  return StandardizedDataset(std::move(records));
}

Document StandardizedDataset::to_document() const {
  Document out = Document::array();
  for (const auto& r : records_) out.push_back(r.to_document());
  return out;
}

std::vector<Document> StandardizedDataset::to_documents() const {
  std::vector<Document> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.to_document());
  return out;
}

RawPayload make_raw_payload(std::string source_id, TimeNs received_at, Document body) {
  if (received_at <= 0) throw Error(ErrorCode::InvalidRecord, "received_at must be positive");
  return RawPayload{std::move(source_id), received_at, std::move(body)};
}

// --- normalization ----------------------------------------------------------

TimeNs normalize_timestamp(std::int64_t value) {
  if (value < 0) throw Error(ErrorCode::NegativeTimestamp, std::to_string(value));
  return checked_mul(value, scale_for_magnitude(static_cast<double>(value)));
}

TimeNs normalize_timestamp(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::UnparseableTimestamp, "non-finite timestamp");
  if (value < 0.0) throw Error(ErrorCode::NegativeTimestamp, std::to_string(value));
  const std::int64_t scale = scale_for_magnitude(value);
  if (value * static_cast<double>(scale) >= 9.2e18) {
    throw Error(ErrorCode::UnparseableTimestamp, "timestamp out of representable range");
  }
  const double whole = std::floor(value);
  const double frac = value - whole;
  return checked_mul(static_cast<std::int64_t>(whole), scale) +
         static_cast<std::int64_t>(std::llround(frac * static_cast<double>(scale)));
}

TimeNs normalize_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::UnparseableTimestamp, "empty timestamp string");
  {
    std::int64_t iv = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), iv);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return normalize_timestamp(iv);
  }
  {
    double dv = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), dv);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return normalize_timestamp(dv);
  }
  if (auto iso = parse_iso8601(text)) return *iso;
  throw Error(ErrorCode::UnparseableTimestamp, "not a number or ISO-8601 time: " + std::string(text));
}

TimeNs normalize_timestamp(const Document& raw) {
  if (raw.is_number_unsigned()) {
    const auto u = raw.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(kMaxNs)) {
      throw Error(ErrorCode::UnparseableTimestamp, "timestamp out of representable range");
    }
    return normalize_timestamp(static_cast<std::int64_t>(u));
  }
  if (raw.is_number_integer()) return normalize_timestamp(raw.get<std::int64_t>());
  if (raw.is_number_float()) return normalize_timestamp(raw.get<double>());
  if (raw.is_string()) return normalize_timestamp(std::string_view(raw.get_ref<const std::string&>()));
  throw Error(ErrorCode::UnparseableTimestamp, "timestamp must be a number or string, got " + raw.dump());
}

double coerce_units(SensorKind kind, std::string_view field, double value,
                    std::optional<std::string_view> declared_unit) {
  const auto& spec = field_spec(kind, field);
  if (!declared_unit) return value;
  auto factor = unit_factor(spec.quantity, *declared_unit);
  if (!factor) {
    throw Error(ErrorCode::UnknownUnit, "unit '" + std::string(*declared_unit) + "' is not registered for " +
                                            std::string(to_string(spec.quantity)));
  }
  return value * *factor;
}

double from_canonical_units(SensorKind kind, std::string_view field, double canonical_value, std::string_view unit) {
  const auto& spec = field_spec(kind, field);
  auto factor = unit_factor(spec.quantity, unit);
  if (!factor) throw Error(ErrorCode::UnknownUnit, "unit '" + std::string(unit) + "' is not registered");
  return canonical_value / *factor;
}

Document mark_missing(SensorKind kind, const Document& fragment) {
  Document out = fragment.is_object() ? fragment : Document::object();
  for (const auto& spec : kind_layout(kind).fields) {
    if (!out.contains(spec.name)) out[spec.name] = nullptr;
  }
  return out;
}

}  // namespace seampos
