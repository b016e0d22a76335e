#include "seampos/jsonpath.hpp"

#include <charconv>

namespace seampos::jsonpath {

namespace {

bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PathExpr parse() {
    if (text_.empty()) fail("'$'");
    if (text_[0] != '$') fail("'$'");
    pos_ = 1;
    std::vector<Segment> segments{Root{}};
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '.') {
        ++pos_;
        if (peek() == '.') fail("member name ('..' recursive descent is not supported)");
        if (peek() == '*') {
          ++pos_;
          segments.emplace_back(Wildcard{});
        } else {
          segments.emplace_back(Child{name()});
        }
      } else if (c == '[') {
        ++pos_;
        segments.push_back(bracket());
      } else {
        fail("'.' or '['");
      }
    }
    return PathExpr(std::move(segments));
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const { throw PathSyntaxError(pos_, expected, text_); }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void expect(char c, const char* what) {
    if (peek() != c) fail(what);
    ++pos_;
  }

  std::string name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("member name or '*'");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    if (peek() == '"') fail("single-quoted string (double quotes are not supported)");
    expect('\'', "single-quoted string");
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("closing quote");
      const char c = text_[pos_++];
      if (c == '\'') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("escaped character");
        const char e = text_[pos_++];
        if (e != '\'' && e != '\\') {
          --pos_;
          fail("\\' or \\\\ escape");
        }
        out += e;
      } else {
        out += c;
      }
    }
    return out;
  }

  Document literal() {
    const char c = peek();
    if (c == '\'' || c == '"') return Document(quoted());
    for (const char* word : {"true", "false", "null"}) {
      const std::string_view w(word);
      if (text_.substr(pos_, w.size()) == w) {
        pos_ += w.size();
        if (w == "true") return Document(true);
        if (w == "false") return Document(false);
        return Document(nullptr);
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' ||
                                   text_[pos_] == '+' || text_[pos_] == '.' || text_[pos_] == 'e' ||
                                   text_[pos_] == 'E')) {
      ++pos_;
    }
    const std::string_view token = text_.substr(start, pos_ - start);
    if (token.empty()) {
      pos_ = start;
      fail("literal (single-quoted string, number, true, false or null)");
    }
    std::int64_t iv = 0;
    if (auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), iv);
        ec == std::errc{} && p == token.data() + token.size()) {
      return Document(iv);
    }
    double dv = 0.0;
    if (auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), dv);
        ec == std::errc{} && p == token.data() + token.size()) {
      return Document(dv);
    }
    pos_ = start;
    fail("numeric literal");
  }

  Segment bracket() {
    skip_ws();
    const char c = peek();
    Segment seg;
    if (c == '*') {
      ++pos_;
      seg = Wildcard{};
    } else if (c >= '0' && c <= '9') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, idx);
      if (ec != std::errc{}) {
        pos_ = start;
        fail("array index");
      }
      if (peek() == ':') fail("']' (slices are not supported)");
      seg = Index{idx};
    } else if (c == '\'' || c == '"') {
      seg = Child{quoted()};
    } else if (c == '?') {
      ++pos_;
      expect('(', "'(' after '?'");
      skip_ws();
      expect('@', "'@'");
      expect('.', "'.' after '@'");
      std::string field = name();
      skip_ws();
      if (text_.substr(pos_, 2) != "==") fail("'==' (only equality filters are supported)");
      pos_ += 2;
      skip_ws();
      Document lit = literal();
      skip_ws();
      if (text_.substr(pos_, 2) == "&&" || text_.substr(pos_, 2) == "||") {
        fail("')' (multi-clause filters are not supported)");
      }
      expect(')', "')'");
      seg = Filter{std::move(field), std::move(lit)};
    } else {
      fail(c == '-' ? "non-negative array index" : "index, '*', quoted name or filter");
    }
    skip_ws();
    expect(']', "']'");
    return seg;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool matches_filter(const Document& element, const Filter& f) {
  if (!element.is_object()) return false;
  auto it = element.find(f.field);
  return it != element.end() && *it == f.literal;
}

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

void set_rec(Document& node, const std::vector<Segment>& segs, std::size_t i, const Document& value) {
  if (i == segs.size()) {
    node = value;
    return;
  }
  std::visit(
      [&](const auto& seg) {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, Root>) {
          set_rec(node, segs, i + 1, value);
        } else if constexpr (std::is_same_v<T, Child>) {
          if (node.is_null()) node = Document::object();
          if (!node.is_object()) {
            throw Error(ErrorCode::TypeConflict, "cannot write member '" + seg.name + "' into a " + node.type_name());
          }
          set_rec(node[seg.name], segs, i + 1, value);
        } else if constexpr (std::is_same_v<T, Index>) {
          if (node.is_null()) node = Document::array();
          if (!node.is_array()) {
            throw Error(ErrorCode::TypeConflict,
                        "cannot write index " + std::to_string(seg.index) + " into a " + node.type_name());
          }
          while (node.size() <= seg.index) node.push_back(nullptr);
          set_rec(node[seg.index], segs, i + 1, value);
        } else if constexpr (std::is_same_v<T, Filter>) {
          if (node.is_null()) node = Document::array();
          if (!node.is_array()) {
            throw Error(ErrorCode::TypeConflict, "filter write requires an array, found a " +
                                                     std::string(node.type_name()));
          }
          bool any = false;
          for (auto& element : node) {
            if (matches_filter(element, seg)) {
              any = true;
              set_rec(element, segs, i + 1, value);
            }
          }
          if (!any) {
            Document created = Document::object();
            created[seg.field] = seg.literal;
            node.push_back(std::move(created));
            set_rec(node.back(), segs, i + 1, value);
          }
        } else {
          throw Error(ErrorCode::SetOnWildcard, "wildcard segments cannot be written");
        }
      },
      segs[i]);
}

}  // namespace

PathExpr::PathExpr(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty() || !std::holds_alternative<Root>(segments_.front())) {
    throw Error(ErrorCode::PathSyntax, "path must start with the root segment");
  }
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (std::holds_alternative<Root>(segments_[i])) throw Error(ErrorCode::PathSyntax, "root segment not first");
  }
}

bool PathExpr::has_wildcard() const noexcept {
  for (const auto& s : segments_) {
    if (std::holds_alternative<Wildcard>(s)) return true;
  }
  return false;
}

PathExpr PathExpr::child(std::string name) const {
  auto segs = segments_;
  segs.emplace_back(Child{std::move(name)});
  return PathExpr(std::move(segs));
}

PathExpr PathExpr::index(std::size_t i) const {
  auto segs = segments_;
  segs.emplace_back(Index{i});
  return PathExpr(std::move(segs));
}

PathExpr PathExpr::filter(std::string field, Document literal) const {
  auto segs = segments_;
  segs.emplace_back(Filter{std::move(field), std::move(literal)});
  return PathExpr(std::move(segs));
}

PathExpr parse_path(std::string_view text) { return Parser(text).parse(); }

std::string render_path(const PathExpr& path) {
  std::string out;
  for (const auto& segment : path.segments()) {
    std::visit(
        [&](const auto& seg) {
          using T = std::decay_t<decltype(seg)>;
          if constexpr (std::is_same_v<T, Root>) {
            out += '$';
          } else if constexpr (std::is_same_v<T, Child>) {
            bool plain = !seg.name.empty();
            for (char c : seg.name) plain = plain && is_name_char(c);
            if (plain) {
              out += '.';
              out += seg.name;
            } else {
              out += '[' + quote(seg.name) + ']';
            }
          } else if constexpr (std::is_same_v<T, Index>) {
            out += '[' + std::to_string(seg.index) + ']';
          } else if constexpr (std::is_same_v<T, Wildcard>) {
            out += "[*]";
          } else {
            out += "[?(@." + seg.field + " == ";
            out += seg.literal.is_string() ? quote(seg.literal.template get_ref<const std::string&>())
                                           : seg.literal.dump();
            out += ")]";
          }
        },
        segment);
  }
  return out;
}

std::vector<const Document*> get_refs(const Document& doc, const PathExpr& path) {
  std::vector<const Document*> current{&doc};
  std::vector<const Document*> next;
  for (const auto& segment : path.segments()) {
    if (std::holds_alternative<Root>(segment)) continue;
    next.clear();
    for (const Document* node : current) {
      std::visit(
          [&](const auto& seg) {
            using T = std::decay_t<decltype(seg)>;
            if constexpr (std::is_same_v<T, Child>) {
              if (node->is_object()) {
                auto it = node->find(seg.name);
                if (it != node->end()) next.push_back(&*it);
              }
            } else if constexpr (std::is_same_v<T, Index>) {
              if (node->is_array() && seg.index < node->size()) next.push_back(&(*node)[seg.index]);
            } else if constexpr (std::is_same_v<T, Wildcard>) {
              if (node->is_structured()) {
                for (const auto& element : *node) next.push_back(&element);
              }
            } else if constexpr (std::is_same_v<T, Filter>) {
              if (node->is_structured()) {
                for (const auto& element : *node) {
                  if (matches_filter(element, seg)) next.push_back(&element);
                }
              }
            }
          },
          segment);
    }
    current.swap(next);
    if (current.empty()) break;
  }
  return current;
}

std::vector<Document> get(const Document& doc, const PathExpr& path) {
  std::vector<Document> out;
  for (const Document* p : get_refs(doc, path)) out.push_back(*p);
  return out;
}

std::vector<Document> get(const Document& doc, std::string_view path) { return get(doc, parse_path(path)); }

void set_in_place(Document& doc, const PathExpr& path, const Document& value) {
  if (path.has_wildcard()) throw Error(ErrorCode::SetOnWildcard, "wildcard segments cannot be written");
  set_rec(doc, path.segments(), 0, value);
}

Document set(const Document& doc, const PathExpr& path, const Document& value) {
  Document out = doc;
  set_in_place(out, path, value);
  return out;
}

Document set(const Document& doc, std::string_view path, const Document& value) {
  return set(doc, parse_path(path), value);
}

}  // namespace seampos::jsonpath
