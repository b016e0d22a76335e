#pragma once

#include <string>

#include "seampos/document.hpp"
#include "seampos/fusion.hpp"
#include "seampos/ingest.hpp"
#include "seampos/standardizer.hpp"

namespace seampos {

enum class LogLevel { Trace, Debug, Info, Warn, Error, Off };

std::string_view to_string(LogLevel level) noexcept;
/// Throws Error(InvalidConfig) for unknown names.
LogLevel log_level_from_string(std::string_view name);

/// Whole-program configuration: {standardizer, fusion, ingest, log_level}.
/// Every block is optional; unknown keys are rejected at every level.
struct GlobalConfig {
  StandardizerConfig standardizer;
  FusionConfig fusion;
  IngestConfig ingest;
  LogLevel log_level = LogLevel::Info;

  static GlobalConfig from_document(const Document& doc);
  static GlobalConfig from_file(const std::string& path);
  Document to_document() const;
};

}  // namespace seampos
