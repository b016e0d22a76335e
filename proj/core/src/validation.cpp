#include "seampos/validation.hpp"

#include <cmath>
#include <sstream>

#include "seampos/error.hpp"

namespace seampos {

namespace {

constexpr double kQuaternionNormTolerance = 1e-3;

bool is_base64(const std::string& s) {
  if (s.size() % 4 != 0) return false;
  std::size_t padding = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool alnum = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (c == '=') {
      ++padding;
      if (i + 2 < s.size()) return false;
    } else if (padding > 0 || !(alnum || c == '+' || c == '/')) {
      return false;
    }
  }
  return padding <= 2;
}

class RecordChecker {
 public:
  RecordChecker(const SchemaSet& schemas, std::vector<ValidationError>& errors) : schemas_(schemas), errors_(errors) {}

  void check(const Document& record) {
    if (!record.is_object()) {
      add("", ValidationCode::WrongType, "record must be an object");
      return;
    }
    const auto kind = check_name(record);
    check_time(record);
    if (!kind) return;
    const auto& layout = schemas_.layout(*kind);

    for (const auto& [key, value] : record.items()) {
      if (key == "name" || key == "time") continue;
      if (layout.wrapped ? key == "values" : has_field(layout, key)) continue;
      add("/" + pointer_token(key), ValidationCode::ExtraField,
          "field not allowed for " + std::string(to_string(*kind)));
    }

    if (layout.wrapped) {
      auto it = record.find("values");
      if (it == record.end() || it->is_null()) {
        add("/values", ValidationCode::MissingField, "required object 'values' is missing");
        return;
      }
      if (!it->is_object()) {
        add("/values", ValidationCode::WrongType, "'values' must be an object");
        return;
      }
      check_fields(layout, *it, "/values");
      for (const auto& [key, value] : it->items()) {
        if (!has_field(layout, key)) {
          add("/values/" + pointer_token(key), ValidationCode::ExtraField,
              "field not allowed for " + std::string(to_string(*kind)));
        }
      }
      if (*kind == SensorKind::Orientation) check_quaternion(*it);
    } else {
      check_fields(layout, record, "");
    }
  }

 private:
  void add(std::string path, ValidationCode code, std::string message) {
    errors_.push_back({std::move(path), code, std::move(message)});
  }

  static bool has_field(const KindLayout& layout, const std::string& key) {
    for (const auto& f : layout.fields) {
      if (f.name == key) return true;
    }
    return false;
  }

  std::optional<SensorKind> check_name(const Document& record) {
    auto it = record.find("name");
    if (it == record.end() || it->is_null()) {
      add("/name", ValidationCode::MissingField, "required field 'name' is missing");
      return std::nullopt;
    }
    if (!it->is_string()) {
      add("/name", ValidationCode::WrongType, "'name' must be a string");
      return std::nullopt;
    }
    auto kind = sensor_kind_from_string(it->get_ref<const std::string&>());
    if (!kind) add("/name", ValidationCode::OutOfRange, "unknown sensor kind '" + it->get<std::string>() + "'");
    return kind;
  }

  void check_time(const Document& record) {
    auto it = record.find("time");
    if (it == record.end() || it->is_null()) {
      add("/time", ValidationCode::MissingField, "required field 'time' is missing");
      return;
    }
    if (!it->is_number()) {
      add("/time", ValidationCode::WrongType, "'time' must be an integer count of UNIX nanoseconds");
      return;
    }
    if (it->is_number_float()) {
      add("/time", ValidationCode::BadTimestamp, "'time' must be an integer count of UNIX nanoseconds");
      return;
    }
    if (it->is_number_unsigned() && it->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      add("/time", ValidationCode::BadTimestamp, "'time' exceeds the representable range");
      return;
    }
    const auto t = it->get<std::int64_t>();
    if (t <= 0) {
      add("/time", ValidationCode::BadTimestamp, "'time' must be positive");
    } else if (t < kMinRecordTimeNs) {
      add("/time", ValidationCode::BadTimestamp, "'time' is below 1e15 and looks mis-scaled (not nanoseconds)");
    }
  }

  void check_fields(const KindLayout& layout, const Document& obj, const std::string& prefix) {
    for (const auto& spec : layout.fields) {
      const std::string path = prefix + "/" + pointer_token(spec.name);
      auto it = obj.find(spec.name);
      if (it == obj.end()) {
        add(path, ValidationCode::MissingField, "required field '" + spec.name + "' is missing");
        continue;
      }
      if (it->is_null()) {
        add(path, ValidationCode::MissingField, "required field '" + spec.name + "' is marked missing (null)");
        continue;
      }
      check_value(spec, *it, path);
    }
  }

  void check_value(const FieldSpec& spec, const Document& value, const std::string& path) {
    switch (spec.type) {
      case FieldType::Number:
        if (!value.is_number()) {
          add(path, ValidationCode::WrongType, "expected a number");
          return;
        }
        check_range(spec, value.get<double>(), path);
        return;
      case FieldType::Integer: {
        if (!value.is_number()) {
          add(path, ValidationCode::WrongType, "expected an integer");
          return;
        }
        const double v = value.get<double>();
        if (value.is_number_float() && v != std::floor(v)) {
          add(path, ValidationCode::WrongType, "expected an integer");
          return;
        }
        check_range(spec, v, path);
        return;
      }
      case FieldType::Vector3:
        if (!value.is_array() || value.size() != 3) {
          add(path, ValidationCode::WrongType, "expected an array of three numbers");
          return;
        }
        for (const auto& c : value) {
          if (!c.is_number()) {
            add(path, ValidationCode::WrongType, "expected an array of three numbers");
            return;
          }
        }
        return;
      case FieldType::Base64:
        if (!value.is_string() || !is_base64(value.get_ref<const std::string&>())) {
          add(path, ValidationCode::WrongType, "expected base64 text");
        }
        return;
    }
  }

  void check_range(const FieldSpec& spec, double v, const std::string& path) {
    if ((spec.min && v < *spec.min) || (spec.max && v > *spec.max)) {
      std::ostringstream msg;
      msg << "value " << v << " outside [" << (spec.min ? std::to_string(*spec.min) : "-inf") << ", "
          << (spec.max ? std::to_string(*spec.max) : "inf") << "]";
      add(path, ValidationCode::OutOfRange, msg.str());
    }
  }

  void check_quaternion(const Document& values) {
    double sum = 0.0;
    for (const char* key : {"qx", "qy", "qz", "qw"}) {
      auto it = values.find(key);
      if (it == values.end() || !it->is_number()) return;
      const double c = it->get<double>();
      sum += c * c;
    }
    const double norm = std::sqrt(sum);
    if (std::abs(norm - 1.0) > kQuaternionNormTolerance) {
      std::ostringstream msg;
      msg << "quaternion norm " << norm << " is not within 1e-3 of 1 (involves /values/qx, /values/qy, "
          << "/values/qz, /values/qw)";
      add("/values", ValidationCode::BadQuaternion, msg.str());
    }
  }

  const SchemaSet& schemas_;
  std::vector<ValidationError>& errors_;
};

std::optional<std::int64_t> valid_time(const Document& record) {
  if (!record.is_object()) return std::nullopt;
  auto it = record.find("time");
  if (it == record.end() || !it->is_number_integer()) return std::nullopt;
  if (it->is_number_unsigned() && it->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

std::optional<FieldType> field_type_from_string(std::string_view s) {
  for (auto t : {FieldType::Number, FieldType::Integer, FieldType::Vector3, FieldType::Base64}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<Quantity> quantity_from_string(std::string_view s) {
  for (auto q : {Quantity::Acceleration, Quantity::AngularRate, Quantity::MagneticField, Quantity::Length,
                 Quantity::Pressure, Quantity::Speed, Quantity::Angle, Quantity::Dimensionless, Quantity::Count,
                 Quantity::Binary}) {
    if (to_string(q) == s) return q;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ValidationCode code) noexcept {
  switch (code) {
    case ValidationCode::MissingField: return "MissingField";
    case ValidationCode::ExtraField: return "ExtraField";
    case ValidationCode::WrongType: return "WrongType";
    case ValidationCode::OutOfRange: return "OutOfRange";
    case ValidationCode::BadTimestamp: return "BadTimestamp";
    case ValidationCode::BadQuaternion: return "BadQuaternion";
    case ValidationCode::UnsortedTime: return "UnsortedTime";
  }
  return "";
}

std::optional<ValidationCode> validation_code_from_string(std::string_view name) noexcept {
  for (auto c : {ValidationCode::MissingField, ValidationCode::ExtraField, ValidationCode::WrongType,
                 ValidationCode::OutOfRange, ValidationCode::BadTimestamp, ValidationCode::BadQuaternion,
                 ValidationCode::UnsortedTime}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

Document ValidationReport::to_document() const {
  Document doc = Document::object();
  doc["valid"] = valid();
  doc["errors"] = Document::array();
  for (const auto& e : errors) {
    doc["errors"].push_back({{"path", e.path}, {"code", std::string(to_string(e.code))}, {"message", e.message}});
  }
  return doc;
}

ValidationReport ValidationReport::from_document(const Document& doc) {
  ValidationReport report;
  for (const auto& e : doc.at("errors")) {
    auto code = validation_code_from_string(e.at("code").get<std::string>());
    if (!code) throw Error(ErrorCode::MalformedDocument, "unknown validation code " + e.at("code").dump());
    report.errors.push_back({e.at("path").get<std::string>(), *code, e.value("message", "")});
  }
  if (doc.at("valid").get<bool>() != report.valid()) {
    throw Error(ErrorCode::MalformedDocument, "report 'valid' disagrees with its error list");
  }
  return report;
}

// --- SchemaSet --------------------------------------------------------------

const SchemaSet& SchemaSet::builtin() {
  static const SchemaSet set = [] {
    SchemaSet s;
    for (auto kind : kAllSensorKinds) s.layouts_.push_back(kind_layout(kind));
    return s;
  }();
  return set;
}

const KindLayout& SchemaSet::layout(SensorKind kind) const { return layouts_.at(static_cast<std::size_t>(kind)); }

Document SchemaSet::to_document() const {
  Document doc = Document::object();
  doc["version"] = std::string(kVersion);
  doc["kinds"] = Document::array();
  for (const auto& layout : layouts_) {
    Document k = Document::object();
    k["name"] = std::string(to_string(layout.kind));
    k["wrapper"] = layout.wrapped ? Document("values") : Document(nullptr);
    k["description"] = layout.description;
    k["fields"] = Document::array();
    for (const auto& f : layout.fields) {
      Document fd = Document::object();
      fd["name"] = f.name;
      fd["type"] = std::string(to_string(f.type));
      fd["quantity"] = std::string(to_string(f.quantity));
      fd["unit"] = std::string(canonical_unit(f.quantity));
      if (f.min) fd["min"] = *f.min;
      if (f.max) fd["max"] = *f.max;
      k["fields"].push_back(std::move(fd));
    }
    doc["kinds"].push_back(std::move(k));
  }
  return doc;
}

SchemaSet SchemaSet::from_document(const Document& doc) {
  try {
    if (doc.at("version").get<std::string>() != kVersion) {
      throw Error(ErrorCode::InvalidConfig, "unsupported schema version " + doc.at("version").dump());
    }
    std::vector<std::optional<KindLayout>> slots(kAllSensorKinds.size());
    for (const auto& k : doc.at("kinds")) {
      auto kind = sensor_kind_from_string(k.at("name").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown kind " + k.at("name").dump());
      auto& slot = slots[static_cast<std::size_t>(*kind)];
      if (slot) throw Error(ErrorCode::InvalidConfig, "duplicate kind " + k.at("name").dump());
      KindLayout layout{*kind, !k.at("wrapper").is_null(), {}, k.value("description", "")};
      for (const auto& f : k.at("fields")) {
        auto type = field_type_from_string(f.at("type").get<std::string>());
        auto quantity = quantity_from_string(f.at("quantity").get<std::string>());
        if (!type || !quantity) throw Error(ErrorCode::InvalidConfig, "bad field spec " + f.dump());
        FieldSpec spec{f.at("name").get<std::string>(), *type, *quantity, {}, {}};
        if (f.contains("min")) spec.min = f.at("min").get<double>();
        if (f.contains("max")) spec.max = f.at("max").get<double>();
        layout.fields.push_back(std::move(spec));
      }
      slot = std::move(layout);
    }
    SchemaSet set;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i]) {
        throw Error(ErrorCode::InvalidConfig, "schema lacks kind " + std::string(to_string(kAllSensorKinds[i])));
      }
      set.layouts_.push_back(std::move(*slots[i]));
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed schema document: ") + e.what());
  }
}

std::string SchemaSet::excerpt(std::span<const SensorKind> kinds) const {
  std::ostringstream out;
  for (auto kind : kinds) {
    const auto& layout = this->layout(kind);
    out << "- " << to_string(kind) << " (" << layout.description << "): {\"name\": \"" << to_string(kind)
        << "\", \"time\": <integer UNIX nanoseconds>, ";
    if (layout.wrapped) out << "\"values\": {";
    bool first = true;
    for (const auto& f : layout.fields) {
      if (!first) out << ", ";
      first = false;
      out << '"' << f.name << "\": <" << to_string(f.type) << ' ' << canonical_unit(f.quantity);
      if (f.min || f.max) {
        out << " in [" << (f.min ? std::to_string(*f.min) : "-inf") << ", "
            << (f.max ? std::to_string(*f.max) : "inf") << "]";
      }
      out << '>';
    }
    if (layout.wrapped) out << '}';
    out << "}\n";
  }
  return out.str();
}

// --- validation -------------------------------------------------------------

ValidationReport validate_record(const Document& record, const SchemaSet& schemas) {
  ValidationReport report;
  RecordChecker(schemas, report.errors).check(record);
  return report;
}

ValidationReport validate_dataset(std::span<const Document> records, const SchemaSet& schemas) {
  ValidationReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string prefix = "/records/" + std::to_string(i);
    auto sub = validate_record(records[i], schemas);
    for (auto& e : sub.errors) {
      e.path = prefix + e.path;
      report.errors.push_back(std::move(e));
    }
  }
  std::optional<std::int64_t> prev;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto t = valid_time(records[i]);
    if (!t) continue;
    if (prev && *t < *prev) {
      report.errors.push_back({"/records/" + std::to_string(i) + "/time", ValidationCode::UnsortedTime,
                               "time is earlier than a preceding record's time"});
    }
    if (!prev || *t > *prev) prev = t;
  }
  return report;
}

ValidationReport validate_dataset(const Document& records, const SchemaSet& schemas) {
  if (!records.is_array()) {
    ValidationReport report;
    report.errors.push_back({"/records", ValidationCode::WrongType, "dataset must be an array of records"});
    return report;
  }
  std::vector<Document> items(records.begin(), records.end());
  return validate_dataset(std::span<const Document>(items), schemas);
}

}  // namespace seampos
