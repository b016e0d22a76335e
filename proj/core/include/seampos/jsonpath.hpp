#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/error.hpp"

namespace seampos::jsonpath {

struct Root {
  friend bool operator==(const Root&, const Root&) = default;
};
struct Child {
  std::string name;
  friend bool operator==(const Child&, const Child&) = default;
};
struct Index {
  std::size_t index = 0;
  friend bool operator==(const Index&, const Index&) = default;
};
struct Wildcard {
  friend bool operator==(const Wildcard&, const Wildcard&) = default;
};
/// `[?(@.field == literal)]`; equality is the only comparator.
struct Filter {
  std::string field;
  Document literal;
  friend bool operator==(const Filter& a, const Filter& b) { return a.field == b.field && a.literal == b.literal; }
};

using Segment = std::variant<Root, Child, Index, Wildcard, Filter>;

/// A parsed path. The first segment is always Root.
class PathExpr {
 public:
  PathExpr() : segments_{Root{}} {}
  explicit PathExpr(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool has_wildcard() const noexcept;

  PathExpr child(std::string name) const;
  PathExpr index(std::size_t i) const;
  PathExpr filter(std::string field, Document literal) const;

  friend bool operator==(const PathExpr&, const PathExpr&) = default;

 private:
  std::vector<Segment> segments_;
};

class PathSyntaxError : public Error {
 public:
  PathSyntaxError(std::size_t offset, const std::string& expected, std::string_view text)
      : Error(ErrorCode::PathSyntax, "at byte " + std::to_string(offset) + " of '" + std::string(text) +
                                         "': expected " + expected),
        offset_(offset),
        expected_(expected) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Parses the supported subset: `$`, `.name`, `['name']`, `[n]`, `.*`, `[*]`
/// and `[?(@.field == literal)]` where literal is a single-quoted string,
/// a number, true, false or null.
PathExpr parse_path(std::string_view text);

/// Canonical text form; parse_path(render_path(p)) == p.
std::string render_path(const PathExpr& path);

/// All matches in document order (copies). No match is an empty result.
std::vector<Document> get(const Document& doc, const PathExpr& path);
std::vector<Document> get(const Document& doc, std::string_view path);

/// Matches as pointers into `doc`; valid while `doc` is alive and unchanged.
std::vector<const Document*> get_refs(const Document& doc, const PathExpr& path);

/// Returns a copy of `doc` with `value` written at `path`. Missing objects
/// are created for Child segments; a Filter with no match appends
/// {field: literal} to the array and writes into it; every matching element
/// is written otherwise.
Document set(const Document& doc, const PathExpr& path, const Document& value);
Document set(const Document& doc, std::string_view path, const Document& value);

/// In-place variant of set.
void set_in_place(Document& doc, const PathExpr& path, const Document& value);

}  // namespace seampos::jsonpath
