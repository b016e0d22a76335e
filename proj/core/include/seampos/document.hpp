#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace seampos {

/// Generic tree-structured document. Insertion order of object members is
/// preserved so that "document order" is well defined for path queries.
using Document = nlohmann::ordered_json;

/// Parses text into a document, throwing Error(MalformedDocument) on failure.
Document parse_document(std::string_view text);

Document read_document_file(const std::filesystem::path& path);

/// Reads newline-delimited documents. Blank lines are skipped.
std::vector<Document> read_ndjson(std::istream& in);
std::vector<Document> read_ndjson_file(const std::filesystem::path& path);

void write_ndjson(std::ostream& out, const std::vector<Document>& docs);
std::string to_ndjson(const std::vector<Document>& docs);

/// Structural equality where object key order is irrelevant. Doubles compare
/// within `rel_tol` relative error (exactly when rel_tol == 0); integers and
/// strings always compare exactly. An integer and a double with the same
/// numeric value are equal.
bool semantic_equal(const Document& a, const Document& b, double rel_tol = 0.0);

/// Escapes one reference token for a JSON pointer ("~" -> "~0", "/" -> "~1").
std::string pointer_token(std::string_view key);

}  // namespace seampos
