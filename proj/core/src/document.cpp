#include "seampos/document.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "seampos/error.hpp"

namespace seampos {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorCode::NegativeTimestamp: return "NegativeTimestamp";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::PathSyntax: return "PathSyntaxError";
    case ErrorCode::SetOnWildcard: return "SetOnWildcard";
    case ErrorCode::TypeConflict: return "TypeConflict";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::InvalidBackendConfig: return "InvalidBackendConfig";
    case ErrorCode::UnmatchedLeaf: return "UnmatchedLeaf";
    case ErrorCode::UnsupportedOutputShape: return "UnsupportedOutputShape";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::NonUnitQuaternion: return "NonUnitQuaternion";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::GapTooLarge: return "GapTooLarge";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::NoPositionSensor: return "NoPositionSensor";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::UnsupportedSentence: return "UnsupportedSentence";
    case ErrorCode::MalformedField: return "MalformedField";
    case ErrorCode::MalformedLogLine: return "MalformedLogLine";
    case ErrorCode::QueueFull: return "QueueFull";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

Document parse_document(std::string_view text) {
  try {
    return Document::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

Document read_document_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str());
}

std::vector<Document> read_ndjson(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      docs.push_back(parse_document(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedDocument, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

std::vector<Document> read_ndjson_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_ndjson(in);
}

void write_ndjson(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& doc : docs) out << doc.dump() << '\n';
}

std::string to_ndjson(const std::vector<Document>& docs) {
  std::ostringstream out;
  write_ndjson(out, docs);
  return out.str();
}

namespace {

bool numbers_equal(const Document& a, const Document& b, double rel_tol) {
  const bool a_float = a.is_number_float();
  const bool b_float = b.is_number_float();
  if (!a_float && !b_float) {
    if (a.is_number_unsigned() && b.is_number_unsigned()) return a.get<std::uint64_t>() == b.get<std::uint64_t>();
    if (a.is_number_unsigned() || b.is_number_unsigned()) {
      const auto& u = a.is_number_unsigned() ? a : b;
      const auto& s = a.is_number_unsigned() ? b : a;
      const auto sv = s.get<std::int64_t>();
      return sv >= 0 && static_cast<std::uint64_t>(sv) == u.get<std::uint64_t>();
    }
    return a.get<std::int64_t>() == b.get<std::int64_t>();
  }
  const double x = a.get<double>();
  const double y = b.get<double>();
  if (x == y) return true;
  if (rel_tol <= 0.0 || !std::isfinite(x) || !std::isfinite(y)) return false;
  return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

bool semantic_equal(const Document& a, const Document& b, double rel_tol) {
  if (a.is_number() && b.is_number()) return numbers_equal(a, b, rel_tol);
  if (a.type() != b.type()) return false;
  switch (a.type()) {
    case Document::value_t::object: {
      if (a.size() != b.size()) return false;
      for (const auto& [key, value] : a.items()) {
        auto it = b.find(key);
        if (it == b.end() || !semantic_equal(value, *it, rel_tol)) return false;
      }
      return true;
    }
    case Document::value_t::array: {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!semantic_equal(a[i], b[i], rel_tol)) return false;
      }
      return true;
    }
    default:
      return a == b;
  }
}

std::string pointer_token(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace seampos
