#include "seampos/trgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "seampos/jsonpath.hpp"

namespace seampos {

namespace jp = jsonpath;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct InputLeaf {
  std::string path;
  const Document* value;
  std::string last_key;         // lower-case, empty for array elements
  std::string ancestors;        // lower-case keys joined by '/'
  std::optional<std::size_t> last_index;
};

void flatten_input(const Document& node, const jp::PathExpr& path, const std::string& ancestors,
                   std::vector<InputLeaf>& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      const std::string key_l = lower(key);
      if (child.is_structured()) {
        flatten_input(child, path.child(key), ancestors + "/" + key_l, out);
      } else if (!child.is_null()) {
        out.push_back({jp::render_path(path.child(key)), &child, key_l, ancestors, std::nullopt});
      }
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto& child = node[i];
      if (child.is_structured()) {
        flatten_input(child, path.index(i), ancestors, out);
      } else if (!child.is_null()) {
        std::string last;
        auto slash = ancestors.rfind('/');
        if (slash != std::string::npos) last = ancestors.substr(slash + 1);
        out.push_back({jp::render_path(path.index(i)), &child, last, ancestors, i});
      }
    }
  } else if (!node.is_null()) {
    out.push_back({jp::render_path(path), &node, "", ancestors, std::nullopt});
  }
}

struct OutputLeaf {
  std::string path;
  Document value;
  SensorKind kind;
  std::string field;                     // schema field name ("time" for the timestamp)
  std::optional<std::size_t> component;  // Vector3 component
};

void flatten_record_leaves(const Document& node, const jp::PathExpr& path, SensorKind kind, const std::string& field,
                           std::optional<std::size_t> component, std::vector<OutputLeaf>& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      flatten_record_leaves(child, path.child(key), kind, field.empty() ? key : field, component, out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten_record_leaves(node[i], path.index(i), kind, field, i, out);
    }
  } else {
    out.push_back({jp::render_path(path), node, kind, field, component});
  }
}

/// Leaves of a record array keyed by kind. Records without a recognizable
/// name, or repeated kinds, are reported through `problems`.
std::vector<OutputLeaf> flatten_output(const Document& records, std::vector<std::string>* problems) {
  std::vector<OutputLeaf> out;
  if (!records.is_array()) {
    if (problems) problems->push_back("$");
    else throw Error(ErrorCode::UnsupportedOutputShape, "output must be an array of records");
    return out;
  }
  std::set<SensorKind> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    std::optional<SensorKind> kind;
    if (record.is_object() && record.contains("name") && record["name"].is_string()) {
      kind = sensor_kind_from_string(record["name"].get<std::string>());
    }
    if (!kind) {
      if (problems) {
        problems->push_back("$[" + std::to_string(i) + "]");
        continue;
      }
      throw Error(ErrorCode::UnsupportedOutputShape, "record " + std::to_string(i) + " has no sensor kind");
    }
    if (!seen.insert(*kind).second) {
      const std::string msg = "kind " + std::string(to_string(*kind)) + " occurs more than once";
      if (problems) {
        problems->push_back(jp::render_path(jp::PathExpr().filter("name", std::string(to_string(*kind)))));
        continue;
      }
      throw Error(ErrorCode::UnsupportedOutputShape, msg + "; filter-addressed rules need one record per kind");
    }
    const jp::PathExpr base = jp::PathExpr().filter("name", std::string(to_string(*kind)));
    for (const auto& [key, value] : record.items()) {
      if (key == "name") continue;
      if (key == "values" && value.is_object()) {
        for (const auto& [field, v] : value.items()) {
          flatten_record_leaves(v, base.child("values").child(field), *kind, field, std::nullopt, out);
        }
      } else {
        flatten_record_leaves(value, base.child(key), *kind, key, std::nullopt, out);
      }
    }
  }
  return out;
}

std::optional<Quantity> quantity_of(const OutputLeaf& leaf) {
  if (leaf.field == "time") return std::nullopt;
  for (const auto& spec : kind_layout(leaf.kind).fields) {
    if (spec.name == leaf.field) return spec.quantity;
  }
  return std::nullopt;
}

ValueMatch match_for_leaf(const Document& in, const OutputLeaf& leaf) {
  const bool is_time = leaf.field == "time";
  ValueMatch m = value_match(in, leaf.value, quantity_of(leaf));
  if (is_time && m.kind == MatchKind::Unit) return {};
  if (!is_time && m.kind == MatchKind::Timestamp) return {};
  return m;
}

int rank(MatchKind k) {
  switch (k) {
    case MatchKind::Exact: return 0;
    case MatchKind::Timestamp: return 1;
    case MatchKind::Unit: return 2;
    case MatchKind::None: return 3;
  }
  return 3;
}

int affinity(const InputLeaf& in, const OutputLeaf& out) {
  int score = 0;
  const std::string field = lower(out.field);
  if (out.field == "time") {
    if (in.last_key == "time" || in.last_key == "t" || in.last_key == "ts" || in.last_key.find("time") != std::string::npos ||
        in.last_key.find("stamp") != std::string::npos) {
      score += 4;
    }
  } else if (!in.last_key.empty()) {
    if (in.last_key == field) {
      score += 4;
    } else if (in.last_key.find(field) != std::string::npos || field.find(in.last_key) != std::string::npos) {
      score += 2;
    }
  }
  const std::string kind = lower(to_string(out.kind));
  const std::string scope = in.ancestors + "/" + in.last_key;
  if (scope.find(kind) != std::string::npos || scope.find(kind.substr(0, 3)) != std::string::npos) score += 1;
  if (out.component && in.last_index && *out.component == *in.last_index) score += 1;
  return score;
}

std::string field_of_target(const jp::PathExpr& target, SensorKind& kind) {
  std::string field;
  bool have_kind = false;
  for (const auto& seg : target.segments()) {
    if (const auto* f = std::get_if<jp::Filter>(&seg); f && f->field == "name" && f->literal.is_string()) {
      if (auto k = sensor_kind_from_string(f->literal.get<std::string>())) {
        kind = *k;
        have_kind = true;
      }
    } else if (const auto* c = std::get_if<jp::Child>(&seg); c && c->name != "values") {
      field = c->name;
    }
  }
  if (!have_kind || field.empty()) {
    throw Error(ErrorCode::InvalidScript, "post-op target does not address a sensor field: " + jp::render_path(target));
  }
  return field;
}

void merge_rule(TransformationScript& script, const TransformationRule& rule) {
  std::erase_if(script.rules, [&](const TransformationRule& r) { return r.output_path == rule.output_path; });
  script.rules.push_back(rule);
}

void merge_post_ops(TransformationScript& script, const std::vector<PostOp>& ops, const std::set<std::string>& targets) {
  std::erase_if(script.post_ops, [&](const PostOp& p) { return targets.contains(p.target); });
  for (const auto& op : ops) script.post_ops.push_back(op);
}

std::optional<std::int64_t> integer_time(const Document& record) {
  if (!record.is_object()) return std::nullopt;
  auto it = record.find("time");
  if (it == record.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<std::int64_t>();
}

}  // namespace

// --- script documents -------------------------------------------------------------

TransformationRule TransformationRule::make(std::string input_path, std::string output_path) {
  try {
    (void)jp::parse_path(input_path);
    if (jp::parse_path(output_path).has_wildcard()) {
      throw Error(ErrorCode::InvalidScript, "outputPath must not contain wildcards: " + output_path);
    }
  } catch (const jp::PathSyntaxError& e) {
    throw Error(ErrorCode::InvalidScript, e.what());
  }
  return TransformationRule{std::move(input_path), std::move(output_path)};
}

TransformationScript TransformationScript::from_document(const Document& doc) {
  TransformationScript script;
  try {
    for (const auto& r : doc.at("rules")) {
      script.rules.push_back(
          TransformationRule::make(r.at("inputPath").get<std::string>(), r.at("outputPath").get<std::string>()));
    }
    if (doc.contains("post_ops")) {
      for (const auto& p : doc.at("post_ops")) {
        PostOp op;
        op.target = p.at("target").get<std::string>();
        if (jp::parse_path(op.target).has_wildcard()) {
          throw Error(ErrorCode::InvalidScript, "post-op target must not contain wildcards");
        }
        const auto name = p.at("op").get<std::string>();
        if (name == "NormalizeTimestamp") {
          op.op = PostOpKind::NormalizeTimestamp;
        } else if (name == "CoerceUnit") {
          op.op = PostOpKind::CoerceUnit;
          op.unit = p.at("unit").get<std::string>();
        } else {
          throw Error(ErrorCode::InvalidScript, "unknown post-op '" + name + "'");
        }
        script.post_ops.push_back(std::move(op));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScript, e.what());
  } catch (const jp::PathSyntaxError& e) {
    throw Error(ErrorCode::InvalidScript, e.what());
  }
  return script;
}

Document TransformationScript::to_document() const {
  Document doc = Document::object();
  doc["rules"] = Document::array();
  for (const auto& r : rules) doc["rules"].push_back({{"inputPath", r.input_path}, {"outputPath", r.output_path}});
  doc["post_ops"] = Document::array();
  for (const auto& p : post_ops) {
    Document op = {{"target", p.target}};
    op["op"] = p.op == PostOpKind::NormalizeTimestamp ? "NormalizeTimestamp" : "CoerceUnit";
    if (p.unit) op["unit"] = *p.unit;
    doc["post_ops"].push_back(std::move(op));
  }
  return doc;
}

// --- matching -------------------------------------------------------------------

std::string_view to_string(MatchKind kind) noexcept {
  switch (kind) {
    case MatchKind::Exact: return "Exact";
    case MatchKind::Timestamp: return "Timestamp";
    case MatchKind::Unit: return "Unit";
    case MatchKind::None: return "None";
  }
  return "";
}

ValueMatch value_match(const Document& input_leaf, const Document& output_leaf, std::optional<Quantity> quantity) {
  if (input_leaf.is_structured() || output_leaf.is_structured()) return {};
  if (semantic_equal(input_leaf, output_leaf)) return {MatchKind::Exact, std::nullopt};

  if (output_leaf.is_number_integer() && (input_leaf.is_number() || input_leaf.is_string())) {
    try {
      if (normalize_timestamp(input_leaf) == output_leaf.get<std::int64_t>()) return {MatchKind::Timestamp, std::nullopt};
    } catch (const Error&) {
    }
  }

  if (input_leaf.is_number() && output_leaf.is_number()) {
    const double in = input_leaf.get<double>();
    const double out = output_leaf.get<double>();
    if (out != 0.0) {
      for (const auto& entry : unit_registry()) {
        if (entry.factor == 1.0 || (quantity && entry.quantity != *quantity)) continue;
        const double converted = in * entry.factor;
        if (std::abs(converted - out) <= 1e-9 * std::max(std::abs(out), std::abs(converted))) {
          return {MatchKind::Unit, entry};
        }
      }
    }
  }
  return {};
}

// --- derivation -------------------------------------------------------------------

UnmatchedLeafError::UnmatchedLeafError(std::vector<std::string> leaves)
    : Error(ErrorCode::UnmatchedLeaf,
            [&] {
              std::string msg = "no input value for output leaf";
              msg += leaves.size() == 1 ? " " : "s ";
              for (std::size_t i = 0; i < leaves.size(); ++i) msg += (i ? ", " : "") + leaves[i];
              return msg;
            }()),
      leaves_(std::move(leaves)) {}

std::vector<std::pair<std::string, Document>> output_leaves(const Document& records) {
  std::vector<std::pair<std::string, Document>> out;
  for (auto& leaf : flatten_output(records, nullptr)) out.emplace_back(std::move(leaf.path), std::move(leaf.value));
  return out;
}

Derivation derive_script(const Document& example_input, const StandardizedDataset& example_output,
                         const std::vector<std::string>* only_leaves, RuleProposer* fallback) {
  const Document expected = example_output.to_document();
  const auto outputs = flatten_output(expected, nullptr);
  std::vector<InputLeaf> inputs;
  flatten_input(example_input, jp::PathExpr(), "", inputs);
  std::vector<bool> used(inputs.size(), false);

  Derivation result;
  for (const auto& leaf : outputs) {
    if (only_leaves && std::find(only_leaves->begin(), only_leaves->end(), leaf.path) == only_leaves->end()) continue;

    std::optional<std::size_t> best;
    ValueMatch best_match;
    std::tuple<int, int, int, std::size_t> best_key{};
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const ValueMatch m = match_for_leaf(*inputs[j].value, leaf);
      if (m.kind == MatchKind::None) continue;
      const auto key = std::make_tuple(rank(m.kind), -affinity(inputs[j], leaf), used[j] ? 1 : 0, j);
      if (!best || key < best_key) {
        best = j;
        best_key = key;
        best_match = m;
      }
    }
    if (!best) {
      result.unmatched.push_back(leaf.path);
      continue;
    }
    used[*best] = true;
    result.script.rules.push_back(TransformationRule::make(inputs[*best].path, leaf.path));
    if (best_match.kind == MatchKind::Timestamp) {
      result.script.post_ops.push_back({leaf.path, PostOpKind::NormalizeTimestamp, std::nullopt});
    } else if (best_match.kind == MatchKind::Unit) {
      result.script.post_ops.push_back({leaf.path, PostOpKind::CoerceUnit, std::string(best_match.conversion->unit)});
    }
  }

  if (fallback && !result.unmatched.empty()) {
    const auto proposed = TransformationScript::from_document(
        fallback->propose_rules(example_input, expected, result.unmatched));
    std::set<std::string> resolved;
    for (const auto& rule : proposed.rules) {
      if (std::find(result.unmatched.begin(), result.unmatched.end(), rule.output_path) == result.unmatched.end()) {
        continue;
      }
      merge_rule(result.script, rule);
      resolved.insert(rule.output_path);
    }
    for (const auto& op : proposed.post_ops) {
      if (resolved.contains(op.target)) result.script.post_ops.push_back(op);
    }
    std::erase_if(result.unmatched, [&](const std::string& p) { return resolved.contains(p); });
  }
  return result;
}

std::vector<TransformationRule> derive_rules(const Document& example_input, const StandardizedDataset& example_output) {
  return derive_transformation_script(example_input, example_output).rules;
}

TransformationScript derive_transformation_script(const Document& example_input,
                                                  const StandardizedDataset& example_output, RuleProposer* fallback) {
  auto derivation = derive_script(example_input, example_output, nullptr, fallback);
  if (!derivation.unmatched.empty()) throw UnmatchedLeafError(std::move(derivation.unmatched));
  return std::move(derivation.script);
}

// --- execution --------------------------------------------------------------------

std::string_view to_string(ScriptIssueKind kind) noexcept {
  switch (kind) {
    case ScriptIssueKind::RuleSourceMissing: return "RuleSourceMissing";
    case ScriptIssueKind::MultipleMatches: return "MultipleMatches";
    case ScriptIssueKind::PostOpFailed: return "PostOpFailed";
  }
  return "";
}

bool ScriptOutput::source_missing() const noexcept {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ScriptIssue& i) { return i.kind == ScriptIssueKind::RuleSourceMissing; });
}

ScriptOutput apply_script(const TransformationScript& script, const Document& input) {
  ScriptOutput out;
  for (const auto& rule : script.rules) {
    const auto matches = jp::get_refs(input, jp::parse_path(rule.input_path));
    if (matches.empty()) {
      out.issues.push_back({ScriptIssueKind::RuleSourceMissing, rule.input_path,
                            "no value at " + rule.input_path + " for " + rule.output_path});
      continue;
    }
    if (matches.size() > 1) {
      out.issues.push_back({ScriptIssueKind::MultipleMatches, rule.input_path,
                            std::to_string(matches.size()) + " matches; the first in document order was used"});
    }
    try {
      jp::set_in_place(out.records, jp::parse_path(rule.output_path), *matches.front());
    } catch (const Error& e) {
      out.issues.push_back({ScriptIssueKind::PostOpFailed, rule.output_path, e.what()});
    }
  }

  for (const auto& op : script.post_ops) {
    const auto target = jp::parse_path(op.target);
    const auto values = jp::get(out.records, target);
    if (values.empty()) continue;  // the rule that feeds it already reported its missing source
    try {
      Document converted;
      if (op.op == PostOpKind::NormalizeTimestamp) {
        converted = normalize_timestamp(values.front());
      } else {
        SensorKind kind{};
        const std::string field = field_of_target(target, kind);
        if (!values.front().is_number()) throw Error(ErrorCode::InvalidRecord, "unit conversion needs a number");
        converted = coerce_units(kind, field, values.front().get<double>(), *op.unit);
      }
      jp::set_in_place(out.records, target, converted);
    } catch (const Error& e) {
      out.issues.push_back({ScriptIssueKind::PostOpFailed, op.target, e.what()});
    }
  }

  auto& items = out.records.get_ref<Document::array_t&>();
  if (std::all_of(items.begin(), items.end(), [](const Document& r) { return integer_time(r).has_value(); })) {
    std::stable_sort(items.begin(), items.end(),
                     [](const Document& a, const Document& b) { return *integer_time(a) < *integer_time(b); });
  }
  return out;
}

// --- validation loop ----------------------------------------------------------------

std::string_view to_string(MismatchKind kind) noexcept {
  switch (kind) {
    case MismatchKind::MissingLeaf: return "MissingLeaf";
    case MismatchKind::ValueDiffers: return "ValueDiffers";
    case MismatchKind::UnexpectedLeaf: return "UnexpectedLeaf";
    case MismatchKind::RecordOrder: return "RecordOrder";
  }
  return "";
}

Document ScriptReport::to_document() const {
  Document doc = Document::object();
  doc["valid"] = valid();
  doc["mismatches"] = Document::array();
  for (const auto& m : mismatches) {
    doc["mismatches"].push_back({{"path", m.path}, {"kind", std::string(to_string(m.kind))}, {"message", m.message}});
  }
  return doc;
}

ScriptReport compare_output(const Document& actual, const Document& expected, double rel_tol) {
  ScriptReport report;
  const auto expected_leaves = flatten_output(expected, nullptr);
  std::vector<std::string> problems;
  const auto actual_leaves = flatten_output(actual, &problems);
  for (const auto& p : problems) {
    report.mismatches.push_back({p, MismatchKind::UnexpectedLeaf, "record without a unique sensor kind"});
  }

  std::set<std::string> expected_paths;
  for (const auto& leaf : expected_leaves) {
    expected_paths.insert(leaf.path);
    const auto values = jp::get(actual, jp::parse_path(leaf.path));
    if (values.empty()) {
      report.mismatches.push_back({leaf.path, MismatchKind::MissingLeaf, "expected " + leaf.value.dump()});
    } else if (!semantic_equal(values.front(), leaf.value, rel_tol)) {
      report.mismatches.push_back({leaf.path, MismatchKind::ValueDiffers,
                                   "expected " + leaf.value.dump() + ", got " + values.front().dump()});
    }
  }
  for (const auto& leaf : actual_leaves) {
    if (!expected_paths.contains(leaf.path)) {
      report.mismatches.push_back({leaf.path, MismatchKind::UnexpectedLeaf, "not present in the expected output"});
    }
  }
  if (report.mismatches.empty() && !semantic_equal(actual, expected, rel_tol)) {
    report.mismatches.push_back({"$", MismatchKind::RecordOrder, "records are not in the expected order"});
  }
  return report;
}

ScriptValidation validate_script(TransformationScript script, const Document& example_input,
                                 const StandardizedDataset& expected, int max_iterations, RuleProposer* fallback) {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
  const Document expected_doc = expected.to_document();
  ScriptValidation result;
  for (int iteration = 1; iteration <= max_iterations; ++iteration) {
    result.iterations_used = iteration;
    const auto output = apply_script(script, example_input);
    result.report = compare_output(output.records, expected_doc);
    if (result.report.valid()) {
      result.converged = true;
      break;
    }
    if (iteration == max_iterations) break;

    std::vector<std::string> leaves;
    for (const auto& m : result.report.mismatches) {
      if (m.kind == MismatchKind::MissingLeaf || m.kind == MismatchKind::ValueDiffers) {
        leaves.push_back(m.path);
      } else if (m.kind == MismatchKind::UnexpectedLeaf) {
        std::erase_if(script.rules, [&](const TransformationRule& r) { return r.output_path.starts_with(m.path); });
        std::erase_if(script.post_ops, [&](const PostOp& p) { return p.target.starts_with(m.path); });
      }
    }
    if (leaves.empty()) continue;
    const auto derivation = derive_script(example_input, expected, &leaves, fallback);
    for (const auto& rule : derivation.script.rules) merge_rule(script, rule);
    std::set<std::string> rederived;
    for (const auto& rule : derivation.script.rules) rederived.insert(rule.output_path);
    merge_post_ops(script, derivation.script.post_ops, rederived);
    for (auto& m : result.report.mismatches) {
      if (std::find(derivation.unmatched.begin(), derivation.unmatched.end(), m.path) != derivation.unmatched.end()) {
        m.message += " (no input value matches this leaf)";
      }
    }
  }
  result.script = std::move(script);
  return result;
}

}  // namespace seampos
