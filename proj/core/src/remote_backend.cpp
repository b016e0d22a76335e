#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "seampos/error.hpp"
#include "seampos/standardizer.hpp"

namespace seampos {

namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidBackendConfig, "endpoint must be a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string system_prompt(const SchemaSet& schemas) {
  std::ostringstream out;
  out << "You convert raw positioning-sensor payloads into standardized sensor records.\n"
      << "Answer with a JSON array of records and nothing else (no prose, no code fences).\n"
      << "Each record must follow exactly one of these layouts, without extra fields:\n"
      << schemas.excerpt(kAllSensorKinds)
      << "Timestamps are integer UNIX nanoseconds. Convert units to the ones listed. "
      << "Use null for readings that are absent from the payload; never invent values.\n";
  return out.str();
}

std::string user_prompt(const ProposalRequest& request) {
  std::ostringstream out;
  out << "Payload from source '" << request.payload.source_id << "' received at " << request.payload.received_at
      << " ns, segmented by top-level key:\n";
  for (const auto& [key, segment] : segment_payload(request.payload.body)) {
    out << "Segment '" << key << "': " << segment.dump() << '\n';
  }
  if (request.previous_candidate) out << "\nYour previous answer:\n" << *request.previous_candidate << '\n';
  if (request.repair_instruction) out << '\n' << *request.repair_instruction;
  return out.str();
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

RemoteBackend::RemoteBackend(StandardizerConfig config, RetryPolicy retry, Sleeper sleeper)
    : config_(std::move(config)), retry_(retry), sleeper_(std::move(sleeper)) {
  config_.check();
  if (config_.kind != BackendKind::RemoteLLM) {
    throw Error(ErrorCode::InvalidBackendConfig, "RemoteBackend requires a remote configuration");
  }
  if (retry_.attempts < 1) throw Error(ErrorCode::InvalidBackendConfig, "retry attempts must be >= 1");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Document RemoteBackend::build_request_body(const std::string& system, const std::string& user) const {
  Document body = Document::object();
  body["model"] = *config_.model_name;
  body["temperature"] = 0;
  body["messages"] = Document::array({
      Document{{"role", "system"}, {"content", system}},
      Document{{"role", "user"}, {"content", user}},
  });
  return body;
}

Document RemoteBackend::build_request_body(const ProposalRequest& request) const {
  return build_request_body(system_prompt(request.schemas), user_prompt(request));
}

std::string RemoteBackend::extract_content(const std::string& response_body) {
  try {
    const auto doc = Document::parse(response_body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  return response_body;
}

std::string RemoteBackend::propose(const ProposalRequest& request) {
  return complete(system_prompt(request.schemas), user_prompt(request));
}

std::string RemoteBackend::complete(const std::string& system, const std::string& user) {
  const Endpoint endpoint = split_url(*config_.endpoint);
  const std::string body = build_request_body(system, user).dump();

  httplib::Headers headers;
  if (config_.auth_token_env) {
    if (const char* token = std::getenv(config_.auth_token_env->c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);

  std::string last_error;
  auto backoff = retry_.initial_backoff;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(seconds.count(), static_cast<time_t>(micros.count()));
    client.set_read_timeout(seconds.count(), static_cast<time_t>(micros.count()));
    client.set_write_timeout(seconds.count(), static_cast<time_t>(micros.count()));

    auto result = client.Post(endpoint.path, headers, body, "application/json");
    if (result) {
      if (result->status >= 200 && result->status < 300) return extract_content(result->body);
      last_error = "HTTP status " + std::to_string(result->status);
      if (!retryable_status(result->status)) break;
    } else {
      last_error = httplib::to_string(result.error());
    }
    if (attempt < retry_.attempts) {
      sleeper_(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::BackendUnavailable, *config_.endpoint + ": " + last_error);
}

Document RemoteRuleProposer::propose_rules(const Document& example_input, const Document& example_output,
                                           const std::vector<std::string>& unmatched_leaves) {
  std::ostringstream system;
  system << "You write JSONPath transformation rules. Answer with a JSON object "
         << "{\"rules\": [{\"inputPath\": ..., \"outputPath\": ...}], \"post_ops\": [...]} and nothing else.\n"
         << "inputPath addresses the raw payload, outputPath the standardized record array using the "
         << "$[?(@.name == 'Kind')].field form. Supported post_ops: "
         << "{\"target\": outputPath, \"op\": \"NormalizeTimestamp\"} and "
         << "{\"target\": outputPath, \"op\": \"CoerceUnit\", \"unit\": sourceUnit}.\n";
  std::ostringstream user;
  user << "Raw payload:\n" << example_input.dump() << "\nStandardized output:\n" << example_output.dump()
       << "\nWrite rules for these output leaves only:\n";
  for (const auto& leaf : unmatched_leaves) user << "- " << leaf << '\n';

  std::string text = backend_.complete(system.str(), user.str());
  if (const auto open = text.find('{'), close = text.rfind('}');
      open != std::string::npos && close != std::string::npos && close > open) {
    text = text.substr(open, close - open + 1);
  }
  try {
    return Document::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScript, std::string("rule proposal is not JSON: ") + e.what());
  }
}

}  // namespace seampos
