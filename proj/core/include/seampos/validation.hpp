#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/schema.hpp"

namespace seampos {

enum class ValidationCode {
  MissingField,
  ExtraField,
  WrongType,
  OutOfRange,
  BadTimestamp,
  BadQuaternion,
  UnsortedTime,
};

std::string_view to_string(ValidationCode code) noexcept;
std::optional<ValidationCode> validation_code_from_string(std::string_view name) noexcept;

struct ValidationError {
  std::string path;  // JSON pointer into the validated document
  ValidationCode code;
  std::string message;

  friend bool operator==(const ValidationError&, const ValidationError&) = default;
};

/// Conformance verdict plus every problem found. valid() is derived from the
/// error list, so the two cannot disagree.
struct ValidationReport {
  std::vector<ValidationError> errors;

  bool valid() const noexcept { return errors.empty(); }

  Document to_document() const;
  static ValidationReport from_document(const Document& doc);
};

/// Per-kind field specifications for the eleven sensor kinds.
class SchemaSet {
 public:
  static constexpr std::string_view kVersion = "1";

  /// The canonical schema compiled into the library.
  static const SchemaSet& builtin();

  /// Loads a machine-readable schema document; it must describe exactly the
  /// eleven sensor kinds.
  static SchemaSet from_document(const Document& doc);
  Document to_document() const;

  const KindLayout& layout(SensorKind kind) const;
  const std::vector<KindLayout>& layouts() const noexcept { return layouts_; }

  /// Human-readable description of the listed kinds (used in prompts).
  std::string excerpt(std::span<const SensorKind> kinds) const;

 private:
  std::vector<KindLayout> layouts_;  // indexed by SensorKind
};

/// Checks one record against its kind's schema. Collects every problem.
ValidationReport validate_record(const Document& record, const SchemaSet& schemas = SchemaSet::builtin());

/// Validates each record (paths prefixed "/records/<i>") and the dataset's
/// time ordering. `records` may be an array document or anything else (which
/// is reported as a type error at "/records").
ValidationReport validate_dataset(const Document& records, const SchemaSet& schemas = SchemaSet::builtin());
ValidationReport validate_dataset(std::span<const Document> records,
                                  const SchemaSet& schemas = SchemaSet::builtin());
inline ValidationReport validate_dataset(const std::vector<Document>& records,
                                         const SchemaSet& schemas = SchemaSet::builtin()) {
  return validate_dataset(std::span<const Document>(records), schemas);
}

}  // namespace seampos
