#include "seampos/standardizer.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "seampos/error.hpp"
#include "seampos/jsonpath.hpp"

namespace seampos {

namespace {

constexpr int kMaxIterationsCeiling = 20;

std::string strip_code_fence(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text.compare(first, 3, "```") != 0) return text;
  auto body_start = text.find('\n', first);
  auto fence_end = text.rfind("```");
  if (body_start == std::string::npos || fence_end == std::string::npos || fence_end <= body_start) return text;
  return text.substr(body_start + 1, fence_end - body_start - 1);
}

ValidationReport single_error(std::string message) {
  ValidationReport report;
  report.errors.push_back({"", ValidationCode::WrongType, std::move(message)});
  return report;
}

std::optional<std::size_t> record_index(const std::string& path) {
  constexpr std::string_view prefix = "/records/";
  if (path.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  std::size_t idx = 0;
  const char* begin = path.data() + prefix.size();
  const char* end = path.data() + path.size();
  auto [ptr, ec] = std::from_chars(begin, end, idx);
  if (ec != std::errc{} || ptr == begin) return std::nullopt;
  return idx;
}

std::optional<SensorKind> kind_of(const Document& record) {
  if (!record.is_object()) return std::nullopt;
  auto it = record.find("name");
  if (it == record.end() || !it->is_string()) return std::nullopt;
  return sensor_kind_from_string(it->get_ref<const std::string&>());
}

std::int64_t sort_key(const Document& record) {
  if (record.is_object()) {
    auto it = record.find("time");
    if (it != record.end() && it->is_number_integer()) return it->get<std::int64_t>();
  }
  return std::numeric_limits<std::int64_t>::max();
}

Document mapped_value(const MockMapping& m, const Document& raw) {
  if (m.field == "time") {
    try {
      return normalize_timestamp(raw);
    } catch (const Error&) {
      return raw;  // left as-is; validation names the bad timestamp
    }
  }
  const auto& spec = field_spec(m.kind, m.field);
  if (!m.unit) return raw;
  if (spec.type == FieldType::Vector3 && raw.is_array()) {
    Document out = Document::array();
    for (const auto& c : raw) out.push_back(c.is_number() ? Document(coerce_units(m.kind, m.field, c.get<double>(), *m.unit)) : c);
    return out;
  }
  if (raw.is_number()) return coerce_units(m.kind, m.field, raw.get<double>(), *m.unit);
  return raw;
}

}  // namespace

// --- configuration ------------------------------------------------------------

void StandardizerConfig::check() const {
  if (max_iterations < 1 || max_iterations > kMaxIterationsCeiling) {
    throw Error(ErrorCode::InvalidBackendConfig, "max_iterations must be within [1, 20]");
  }
  if (kind == BackendKind::RemoteLLM && (!endpoint || endpoint->empty() || !model_name || model_name->empty())) {
    throw Error(ErrorCode::InvalidBackendConfig, "remote backend requires endpoint and model_name");
  }
  if (timeout.count() <= 0) throw Error(ErrorCode::InvalidBackendConfig, "timeout must be positive");
}

StandardizerConfig StandardizerConfig::from_document(const Document& doc) {
  static const std::set<std::string> known{"kind", "endpoint", "model_name", "auth_token_env", "max_iterations",
                                           "timeout_ms"};
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "standardizer block must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown standardizer key '" + key + "'");
  }
  StandardizerConfig cfg;
  try {
    const auto kind = doc.value("kind", std::string("mock"));
    if (kind == "remote") {
      cfg.kind = BackendKind::RemoteLLM;
    } else if (kind == "mock") {
      cfg.kind = BackendKind::DeterministicMock;
    } else {
      throw Error(ErrorCode::InvalidConfig, "standardizer kind must be 'remote' or 'mock'");
    }
    if (doc.contains("endpoint")) cfg.endpoint = doc.at("endpoint").get<std::string>();
    if (doc.contains("model_name")) cfg.model_name = doc.at("model_name").get<std::string>();
    if (doc.contains("auth_token_env")) cfg.auth_token_env = doc.at("auth_token_env").get<std::string>();
    cfg.max_iterations = doc.value("max_iterations", kDefaultMaxIterations);
    cfg.timeout = std::chrono::milliseconds(doc.value("timeout_ms", 60'000));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("standardizer block: ") + e.what());
  }
  cfg.check();
  return cfg;
}

Document StandardizerConfig::to_document() const {
  Document doc = Document::object();
  doc["kind"] = kind == BackendKind::RemoteLLM ? "remote" : "mock";
  if (endpoint) doc["endpoint"] = *endpoint;
  if (model_name) doc["model_name"] = *model_name;
  if (auth_token_env) doc["auth_token_env"] = *auth_token_env;
  doc["max_iterations"] = max_iterations;
  doc["timeout_ms"] = timeout.count();
  return doc;
}

// --- loop ---------------------------------------------------------------------

std::optional<Document> extract_records(const Document& candidate) {
  if (candidate.is_array()) return std::optional<Document>(std::in_place, candidate);
  if (candidate.is_object()) {
    auto it = candidate.find("records");
    if (it != candidate.end()) {
      if (it->is_array()) return std::optional<Document>(std::in_place, *it);
      return std::nullopt;
    }
    if (candidate.contains("name")) return Document::array({candidate});
  }
  return std::nullopt;
}

StandardizationOutcome standardize(StandardizerBackend& backend, const RawPayload& raw, const SchemaSet& schemas,
                                   int max_iterations) {
  if (max_iterations < 1 || max_iterations > kMaxIterationsCeiling) {
    throw Error(ErrorCode::InvalidBackendConfig, "max_iterations must be within [1, 20]");
  }
  StandardizationOutcome outcome;
  outcome.last_candidate = nullptr;
  std::optional<std::string> previous;
  std::optional<std::string> instruction;

  for (int iteration = 1; iteration <= max_iterations; ++iteration) {
    outcome.iterations_used = iteration;
    const ProposalRequest request{raw, schemas, iteration, previous, instruction};
    const std::string text = backend.propose(request);

    Document candidate;
    try {
      candidate = parse_document(strip_code_fence(text));
    } catch (const Error& e) {
      outcome.final_report = single_error(std::string("response unparseable: ") + e.what());
      previous = text;
      instruction = build_repair_prompt(Document(text), outcome.final_report, schemas);
      continue;
    }

    auto records = extract_records(candidate);
    if (!records) {
      outcome.final_report = single_error("response is not an array of records");
      outcome.last_candidate = candidate;
      previous = candidate.dump();
      instruction = build_repair_prompt(candidate, outcome.final_report, schemas);
      continue;
    }

    outcome.last_candidate = *records;
    outcome.final_report = validate_dataset(*records, schemas);
    if (outcome.final_report.valid()) {
      outcome.dataset = StandardizedDataset::from_documents(*records);
      outcome.converged = true;
      return outcome;
    }
    previous = records->dump();
    instruction = build_repair_prompt(*records, outcome.final_report, schemas);
  }
  return outcome;
}

std::string build_repair_prompt(const Document& previous_candidate, const ValidationReport& report,
                                const SchemaSet& schemas) {
  if (report.valid()) throw std::invalid_argument("build_repair_prompt requires a failing validation report");

  std::set<SensorKind> kinds;
  for (const auto& e : report.errors) {
    std::optional<SensorKind> kind;
    if (auto idx = record_index(e.path); idx && previous_candidate.is_array() && *idx < previous_candidate.size()) {
      kind = kind_of(previous_candidate[*idx]);
    } else if (previous_candidate.is_object()) {
      kind = kind_of(previous_candidate);
    }
    if (kind) kinds.insert(*kind);
  }
  std::vector<SensorKind> listed(kinds.begin(), kinds.end());
  if (listed.empty()) listed.assign(kAllSensorKinds.begin(), kAllSensorKinds.end());

  std::ostringstream out;
  out << "The previous answer does not conform to the standardized sensor schema.\n"
      << "Correct every error below and reply with the corrected JSON array of records only.\n"
      << "Errors:\n";
  for (const auto& e : report.errors) {
    out << "- " << (e.path.empty() ? std::string("(document root)") : e.path) << " [" << to_string(e.code)
        << "]: " << e.message << '\n';
  }
  out << "Required layout of the affected sensor kinds:\n" << schemas.excerpt(listed);
  return out.str();
}

std::vector<std::pair<std::string, Document>> segment_payload(const Document& body) {
  std::vector<std::pair<std::string, Document>> out;
  if (body.is_object()) {
    for (const auto& [key, value] : body.items()) out.emplace_back(key, value);
  } else {
    out.emplace_back("$", body);
  }
  return out;
}

// --- mock -----------------------------------------------------------------------

MockConfig MockConfig::from_document(const Document& doc) {
  MockConfig cfg;
  try {
    for (const auto& m : doc.at("mappings")) {
      MockMapping mapping;
      mapping.path = m.at("path").get<std::string>();
      (void)jsonpath::parse_path(mapping.path);
      auto kind = sensor_kind_from_string(m.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown kind " + m.at("kind").dump());
      mapping.kind = *kind;
      mapping.field = m.at("field").get<std::string>();
      if (mapping.field != "time") (void)field_spec(mapping.kind, mapping.field);
      if (m.contains("unit")) mapping.unit = m.at("unit").get<std::string>();
      if (m.contains("group")) mapping.group = m.at("group").get<std::string>();
      cfg.mappings.push_back(std::move(mapping));
    }
    if (doc.contains("faults")) {
      for (const auto& f : doc.at("faults")) {
        MockFault fault;
        fault.field = f.at("field").get<std::string>();
        if (f.contains("kind")) {
          auto kind = sensor_kind_from_string(f.at("kind").get<std::string>());
          if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown kind " + f.at("kind").dump());
          fault.kind = kind;
        }
        if (f.contains("fixed_at_iteration") && !f.at("fixed_at_iteration").is_null()) {
          fault.fixed_at_iteration = f.at("fixed_at_iteration").get<int>();
        }
        cfg.faults.push_back(std::move(fault));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("mock mapping: ") + e.what());
  }
  return cfg;
}

Document MockConfig::to_document() const {
  Document doc = Document::object();
  doc["mappings"] = Document::array();
  for (const auto& m : mappings) {
    Document e = {{"path", m.path}, {"kind", std::string(to_string(m.kind))}, {"field", m.field}};
    if (m.unit) e["unit"] = *m.unit;
    if (m.group) e["group"] = *m.group;
    doc["mappings"].push_back(std::move(e));
  }
  doc["faults"] = Document::array();
  for (const auto& f : faults) {
    Document e = {{"field", f.field}};
    if (f.kind) e["kind"] = std::string(to_string(*f.kind));
    e["fixed_at_iteration"] = f.fixed_at_iteration ? Document(*f.fixed_at_iteration) : Document(nullptr);
    doc["faults"].push_back(std::move(e));
  }
  return doc;
}

Document MockBackend::candidate(const Document& body, int iteration) const {
  struct Group {
    SensorKind kind;
    std::optional<Document> time;
    Document fields = Document::object();
  };
  std::vector<std::pair<std::string, Group>> groups;
  auto group_for = [&](const MockMapping& m) -> Group& {
    const std::string key = m.group.value_or(std::string(to_string(m.kind)));
    for (auto& [k, g] : groups) {
      if (k == key) return g;
    }
    groups.emplace_back(key, Group{m.kind, std::nullopt, Document::object()});
    return groups.back().second;
  };

  for (const auto& m : config_.mappings) {
    Group& g = group_for(m);
    auto matches = jsonpath::get(body, m.path);
    if (matches.empty()) continue;
    Document value = mapped_value(m, matches.front());
    if (m.field == "time") {
      g.time = std::move(value);
    } else {
      g.fields[m.field] = std::move(value);
    }
  }

  Document records = Document::array();
  for (auto& [key, g] : groups) {
    Document record = Document::object();
    record["name"] = std::string(to_string(g.kind));
    if (g.time) record["time"] = *g.time;
    Document fields = mark_missing(g.kind, g.fields);
    if (kind_layout(g.kind).wrapped) {
      record["values"] = std::move(fields);
    } else {
      for (auto& [k, v] : fields.items()) record[k] = v;
    }
    for (const auto& fault : config_.faults) {
      const bool active = !fault.fixed_at_iteration || iteration < *fault.fixed_at_iteration;
      if (!active || (fault.kind && *fault.kind != g.kind)) continue;
      record.erase(fault.field);
      if (record.contains("values") && record["values"].is_object()) record["values"].erase(fault.field);
    }
    records.push_back(std::move(record));
  }
  auto& items = records.get_ref<Document::array_t&>();
  std::stable_sort(items.begin(), items.end(),
                   [](const Document& a, const Document& b) { return sort_key(a) < sort_key(b); });
  return records;
}

std::string MockBackend::propose(const ProposalRequest& request) {
  return candidate(request.payload.body, request.iteration).dump();
}

std::unique_ptr<StandardizerBackend> make_backend(const StandardizerConfig& config,
                                                  const std::optional<MockConfig>& mock) {
  config.check();
  if (config.kind == BackendKind::RemoteLLM) return std::make_unique<RemoteBackend>(config);
  if (!mock) throw Error(ErrorCode::InvalidBackendConfig, "mock backend requires a mapping configuration");
  return std::make_unique<MockBackend>(*mock);
}

}  // namespace seampos
