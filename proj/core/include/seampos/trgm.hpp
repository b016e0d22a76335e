#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/error.hpp"
#include "seampos/schema.hpp"
#include "seampos/units.hpp"

namespace seampos {

/// Copies the value found at `input_path` of a raw payload to `output_path`
/// of the standardized record array.
struct TransformationRule {
  std::string input_path;
  std::string output_path;

  /// Throws Error(InvalidScript) unless both paths parse and the output path
  /// is wildcard-free.
  static TransformationRule make(std::string input_path, std::string output_path);

  friend bool operator==(const TransformationRule&, const TransformationRule&) = default;
};

enum class PostOpKind { NormalizeTimestamp, CoerceUnit };

/// Normalization applied to an already-written output value.
struct PostOp {
  std::string target;  // output path
  PostOpKind op = PostOpKind::NormalizeTimestamp;
  std::optional<std::string> unit;  // CoerceUnit only

  friend bool operator==(const PostOp&, const PostOp&) = default;
};

/// Ordered rules followed by post-ops; later rules overwrite earlier writes.
struct TransformationScript {
  std::vector<TransformationRule> rules;
  std::vector<PostOp> post_ops;

  static TransformationScript from_document(const Document& doc);
  Document to_document() const;

  friend bool operator==(const TransformationScript&, const TransformationScript&) = default;
};

// --- value matching -----------------------------------------------------------

enum class MatchKind { Exact, Timestamp, Unit, None };

std::string_view to_string(MatchKind kind) noexcept;

struct ValueMatch {
  MatchKind kind = MatchKind::None;
  std::optional<UnitConversion> conversion;  // set for MatchKind::Unit
};

/// How `input_leaf` relates to `output_leaf`. Precedence: Exact, then
/// Timestamp (normalize_timestamp(input) == output), then Unit (a registered
/// conversion maps input onto output within 1e-9 relative). `quantity`
/// restricts the unit search when known.
ValueMatch value_match(const Document& input_leaf, const Document& output_leaf,
                       std::optional<Quantity> quantity = std::nullopt);

// --- derivation ---------------------------------------------------------------

class UnmatchedLeafError : public Error {
 public:
  explicit UnmatchedLeafError(std::vector<std::string> leaves);
  const std::vector<std::string>& leaves() const noexcept { return leaves_; }

 private:
  std::vector<std::string> leaves_;
};

struct Derivation {
  TransformationScript script;
  std::vector<std::string> unmatched;  // output leaf paths with no source
};

/// Optional fallback for leaves that structural matching cannot place.
/// Returns additional rules (and post-ops) as a script document.
class RuleProposer {
 public:
  virtual ~RuleProposer() = default;
  virtual Document propose_rules(const Document& example_input, const Document& example_output,
                                 const std::vector<std::string>& unmatched_leaves) = 0;
};

/// Structural derivation over every output leaf. Never throws for
/// unmatched leaves; they are listed in the result. `only_leaves`, when
/// given, restricts derivation to those output paths.
Derivation derive_script(const Document& example_input, const StandardizedDataset& example_output,
                         const std::vector<std::string>* only_leaves = nullptr, RuleProposer* fallback = nullptr);

/// Rules for every output leaf; throws UnmatchedLeafError naming every leaf
/// that has no input counterpart.
std::vector<TransformationRule> derive_rules(const Document& example_input, const StandardizedDataset& example_output);

/// Like derive_rules but returns the complete script (rules and post-ops).
TransformationScript derive_transformation_script(const Document& example_input,
                                                  const StandardizedDataset& example_output,
                                                  RuleProposer* fallback = nullptr);

/// Output leaf paths of a dataset in the `$[?(@.name == 'Kind')].field` form.
/// Throws Error(UnsupportedOutputShape) when a kind occurs more than once.
std::vector<std::pair<std::string, Document>> output_leaves(const Document& records);

// --- execution ------------------------------------------------------------------

enum class ScriptIssueKind { RuleSourceMissing, MultipleMatches, PostOpFailed };

std::string_view to_string(ScriptIssueKind kind) noexcept;

struct ScriptIssue {
  ScriptIssueKind kind;
  std::string path;
  std::string message;
};

struct ScriptOutput {
  Document records = Document::array();
  std::vector<ScriptIssue> issues;

  bool source_missing() const noexcept;
};

/// Runs the script against `input` starting from an empty record array. A
/// rule whose source is absent is reported and skipped.
ScriptOutput apply_script(const TransformationScript& script, const Document& input);

// --- validation loop ------------------------------------------------------------

enum class MismatchKind { MissingLeaf, ValueDiffers, UnexpectedLeaf, RecordOrder };

std::string_view to_string(MismatchKind kind) noexcept;

struct ScriptMismatch {
  std::string path;
  MismatchKind kind;
  std::string message;
};

struct ScriptReport {
  std::vector<ScriptMismatch> mismatches;
  bool valid() const noexcept { return mismatches.empty(); }
  Document to_document() const;
};

inline constexpr double kScriptRelativeTolerance = 1e-9;

/// Leaf-wise comparison of a script's output with the expected records.
ScriptReport compare_output(const Document& actual, const Document& expected,
                            double rel_tol = kScriptRelativeTolerance);

struct ScriptValidation {
  TransformationScript script;
  bool converged = false;
  int iterations_used = 0;
  ScriptReport report;
};

/// Applies, compares and re-derives mismatched leaves until the script
/// reproduces `expected` or `max_iterations` is reached.
ScriptValidation validate_script(TransformationScript script, const Document& example_input,
                                 const StandardizedDataset& expected, int max_iterations = 5,
                                 RuleProposer* fallback = nullptr);

}  // namespace seampos
