#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/schema.hpp"
#include "seampos/trgm.hpp"
#include "seampos/validation.hpp"

namespace seampos {

enum class BackendKind { RemoteLLM, DeterministicMock };

/// Configuration of the standardizer backend and its validation loop.
struct StandardizerConfig {
  static constexpr int kDefaultMaxIterations = 5;

  BackendKind kind = BackendKind::DeterministicMock;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::optional<std::string> auth_token_env;
  int max_iterations = kDefaultMaxIterations;
  std::chrono::milliseconds timeout{60'000};

  /// Throws Error(InvalidBackendConfig) when an invariant is violated.
  void check() const;

  static StandardizerConfig from_document(const Document& doc);
  Document to_document() const;
};

/// One request to a backend: the payload, the schema text and, on repair
/// rounds, the previous candidate and the instruction built from its errors.
struct ProposalRequest {
  const RawPayload& payload;
  const SchemaSet& schemas;
  int iteration = 1;  // 1-based
  std::optional<std::string> previous_candidate;
  std::optional<std::string> repair_instruction;
};

/// Proposes a standardized dataset for a payload. Implementations return the
/// raw response text; the loop parses and validates it.
class StandardizerBackend {
 public:
  virtual ~StandardizerBackend() = default;
  virtual std::string propose(const ProposalRequest& request) = 0;
};

struct StandardizationOutcome {
  StandardizedDataset dataset;  // empty unless converged
  int iterations_used = 0;
  bool converged = false;
  ValidationReport final_report;
  Document last_candidate;  // last parsed candidate (null if none parsed)
};

/// Runs propose → validate → repair until the candidate validates or the
/// iteration cap is reached. Non-convergence is reported, not thrown.
StandardizationOutcome standardize(StandardizerBackend& backend, const RawPayload& raw,
                                   const SchemaSet& schemas = SchemaSet::builtin(),
                                   int max_iterations = StandardizerConfig::kDefaultMaxIterations);

/// Instruction text naming every error path and message, plus the canonical
/// layout of the kinds involved. Requires an invalid report
/// (std::invalid_argument otherwise).
std::string build_repair_prompt(const Document& previous_candidate, const ValidationReport& report,
                                const SchemaSet& schemas = SchemaSet::builtin());

/// Splits a payload by top-level key. Each segment is expected to hold at
/// most one sensor kind. Non-object bodies form a single segment "$".
std::vector<std::pair<std::string, Document>> segment_payload(const Document& body);

/// Accepts an array of records, {"records": [...]}, or a single record
/// object, and returns the record array. Returns nullopt for other shapes.
std::optional<Document> extract_records(const Document& candidate);

// --- deterministic mock -----------------------------------------------------

/// One mapping entry: the value at `path` becomes `field` of a `kind`
/// record. `field == "time"` is normalized to nanoseconds; numeric fields
/// are converted from `unit` when one is declared. Entries sharing a
/// `group` (default: the kind's name) build one record.
struct MockMapping {
  std::string path;
  SensorKind kind;
  std::string field;
  std::optional<std::string> unit;
  std::optional<std::string> group;
};

/// Fault injection for loop tests: `field` is dropped from every record (or
/// only those of `kind`) while the iteration number is below
/// `fixed_at_iteration`; nullopt means the fault never clears.
struct MockFault {
  std::string field;
  std::optional<SensorKind> kind;
  std::optional<int> fixed_at_iteration;
};

struct MockConfig {
  std::vector<MockMapping> mappings;
  std::vector<MockFault> faults;

  static MockConfig from_document(const Document& doc);
  Document to_document() const;
};

class MockBackend final : public StandardizerBackend {
 public:
  explicit MockBackend(MockConfig config) : config_(std::move(config)) {}

  std::string propose(const ProposalRequest& request) override;

  /// The candidate the mock emits at `iteration`, as a record array.
  Document candidate(const Document& body, int iteration) const;

 private:
  MockConfig config_;
};

// --- remote chat-completions backend ------------------------------------------

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
};

/// Sends chat-completions requests over HTTP(S). Transport failures are
/// retried with exponential backoff; exhausting the retries throws
/// Error(BackendUnavailable).
class RemoteBackend final : public StandardizerBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteBackend(StandardizerConfig config, RetryPolicy retry = {}, Sleeper sleeper = {});

  std::string propose(const ProposalRequest& request) override;

  /// One chat round trip with the given prompts; returns the assistant text.
  std::string complete(const std::string& system, const std::string& user);

  /// The request body that would be sent for `request`.
  Document build_request_body(const ProposalRequest& request) const;
  Document build_request_body(const std::string& system, const std::string& user) const;

  /// Extracts the assistant content from a chat-completions response body.
  /// Returns the body itself when it does not have the expected envelope.
  static std::string extract_content(const std::string& response_body);

 private:
  StandardizerConfig config_;
  RetryPolicy retry_;
  Sleeper sleeper_;
};

/// Asks the chat endpoint for rules covering leaves that structural matching
/// could not place. The answer must be a script document.
class RemoteRuleProposer final : public RuleProposer {
 public:
  explicit RemoteRuleProposer(RemoteBackend& backend) : backend_(backend) {}

  Document propose_rules(const Document& example_input, const Document& example_output,
                         const std::vector<std::string>& unmatched_leaves) override;

 private:
  RemoteBackend& backend_;
};

std::unique_ptr<StandardizerBackend> make_backend(const StandardizerConfig& config,
                                                  const std::optional<MockConfig>& mock = std::nullopt);

}  // namespace seampos
