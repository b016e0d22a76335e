#include "seampos/config.hpp"

#include <array>

#include "seampos/error.hpp"

namespace seampos {

namespace {

constexpr std::array<LogLevel, 6> kLevels{LogLevel::Trace, LogLevel::Debug, LogLevel::Info,
                                          LogLevel::Warn,  LogLevel::Error, LogLevel::Off};

}  // namespace

std::string_view to_string(LogLevel level) noexcept {
  switch (level) {
    case LogLevel::Trace: return "trace";
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
    case LogLevel::Off: return "off";
  }
  return "";
}

LogLevel log_level_from_string(std::string_view name) {
  for (auto level : kLevels) {
    if (to_string(level) == name) return level;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown log level '" + std::string(name) + "'");
}

GlobalConfig GlobalConfig::from_document(const Document& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "configuration must be an object");
  GlobalConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "standardizer") {
      try {
        config.standardizer = StandardizerConfig::from_document(value);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
    } else if (key == "fusion") {
      config.fusion = FusionConfig::from_document(value);
    } else if (key == "ingest") {
      config.ingest = IngestConfig::from_document(value);
    } else if (key == "log_level") {
      if (!value.is_string()) throw Error(ErrorCode::InvalidConfig, "log_level must be a string");
      config.log_level = log_level_from_string(value.get<std::string>());
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + key + "'");
    }
  }
  return config;
}

GlobalConfig GlobalConfig::from_file(const std::string& path) { return from_document(read_document_file(path)); }

Document GlobalConfig::to_document() const {
  Document doc = Document::object();
  doc["standardizer"] = standardizer.to_document();
  doc["fusion"] = fusion.to_document();
  doc["ingest"] = ingest.to_document();
  doc["log_level"] = std::string(to_string(log_level));
  return doc;
}

}  // namespace seampos
