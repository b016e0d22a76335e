#include "seampos/ingest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <thread>

#include "seampos/error.hpp"

namespace seampos {

namespace {

std::optional<BackendKind> backend_from_string(const std::string& s) {
  if (s == "remote") return BackendKind::RemoteLLM;
  if (s == "mock") return BackendKind::DeterministicMock;
  return std::nullopt;
}

SourceRoute route_from_document(const std::string& source, const Document& doc) {
  SourceRoute route;
  for (const auto& [key, value] : doc.items()) {
    if (key == "format") {
      const auto f = value.get<std::string>();
      if (f == "document" || f == "json") route.format = PayloadFormat::Document;
      else if (f == "nmea") route.format = PayloadFormat::Nmea;
      else throw Error(ErrorCode::InvalidConfig, "route '" + source + "': unknown format '" + f + "'");
    } else if (key == "backend") {
      route.backend = backend_from_string(value.get<std::string>());
      if (!route.backend) throw Error(ErrorCode::InvalidConfig, "route '" + source + "': backend must be remote or mock");
    } else if (key == "mock") {
      route.mock = MockConfig::from_document(value);
    } else if (key == "cache_script") {
      route.cache_script = value.get<bool>();
    } else {
      throw Error(ErrorCode::InvalidConfig, "route '" + source + "': unknown key '" + key + "'");
    }
  }
  return route;
}

}  // namespace

// --- config -------------------------------------------------------------------

void IngestConfig::check() const {
  if (queue_capacity < 1) throw Error(ErrorCode::InvalidConfig, "queue_capacity must be >= 1");
  if (!(replay_speed > 0.0)) throw Error(ErrorCode::InvalidConfig, "replay_speed must be > 0");
  if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidConfig, "port out of range");
  if (reorder_window.count() < 0) throw Error(ErrorCode::InvalidConfig, "reorder_window_ms must be >= 0");
}

IngestConfig IngestConfig::from_document(const Document& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "ingest config must be an object");
  IngestConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "bind") {
        config.bind_address = value.get<std::string>();
      } else if (key == "port") {
        config.port = value.get<int>();
      } else if (key == "routes") {
        for (const auto& [source, route] : value.items()) config.routes[source] = route_from_document(source, route);
      } else if (key == "queue_capacity") {
        config.queue_capacity = value.get<std::size_t>();
      } else if (key == "replay_speed") {
        if (value.is_string() && (value == "inf" || value == "infinity")) {
          config.replay_speed = std::numeric_limits<double>::infinity();
        } else {
          config.replay_speed = value.get<double>();
        }
      } else if (key == "reorder_window_ms") {
        config.reorder_window = std::chrono::milliseconds(value.get<std::int64_t>());
      } else if (key == "nmea_date") {
        config.nmea_date = parse_civil_date(value.get<std::string>());
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown ingest key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("ingest config: ") + e.what());
  }
  config.check();
  return config;
}

Document IngestConfig::to_document() const {
  Document doc = Document::object();
  doc["bind"] = bind_address;
  doc["port"] = port;
  doc["routes"] = Document::object();
  for (const auto& [source, route] : routes) {
    Document r = Document::object();
    r["format"] = route.format == PayloadFormat::Nmea ? "nmea" : "document";
    if (route.backend) r["backend"] = *route.backend == BackendKind::RemoteLLM ? "remote" : "mock";
    if (route.mock) r["mock"] = route.mock->to_document();
    r["cache_script"] = route.cache_script;
    doc["routes"][source] = std::move(r);
  }
  doc["queue_capacity"] = queue_capacity;
  if (std::isinf(replay_speed)) doc["replay_speed"] = "inf";
  else doc["replay_speed"] = replay_speed;
  doc["reorder_window_ms"] = reorder_window.count();
  if (nmea_date) doc["nmea_date"] = format_civil_date(*nmea_date);
  return doc;
}

// --- reordering queue ---------------------------------------------------------------

ReorderingQueue::ReorderingQueue(std::size_t capacity, std::chrono::nanoseconds window)
    : capacity_(capacity), window_(window) {
  if (capacity_ < 1) throw Error(ErrorCode::InvalidConfig, "queue capacity must be >= 1");
}

bool ReorderingQueue::has_room(std::size_t n) const { return heap_.size() + n <= capacity_; }

bool ReorderingQueue::push(std::string source, StandardizedRecord record, TimeNs arrival) {
  if (last_released_ && record.time() < *last_released_) {
    ++dropped_;
    return false;
  }
  if (heap_.size() >= capacity_) throw Error(ErrorCode::QueueFull, "fusion queue is full");
  heap_.push(QueuedRecord{std::move(source), std::move(record), arrival, next_sequence_++});
  return true;
}

std::vector<QueuedRecord> ReorderingQueue::release(TimeNs now) {
  std::vector<QueuedRecord> out;
  while (!heap_.empty() && heap_.top().arrival + window_.count() <= now) {
    out.push_back(heap_.top());
    heap_.pop();
    last_released_ = out.back().record.time();
  }
  return out;
}

std::vector<QueuedRecord> ReorderingQueue::flush() {
  std::vector<QueuedRecord> out;
  while (!heap_.empty()) {
    out.push_back(heap_.top());
    heap_.pop();
    last_released_ = out.back().record.time();
  }
  return out;
}

// --- pipeline -------------------------------------------------------------------

std::string_view to_string(IngestStatus status) noexcept {
  switch (status) {
    case IngestStatus::Accepted: return "Accepted";
    case IngestStatus::ParseError: return "ParseError";
    case IngestStatus::NonConvergent: return "NonConvergent";
    case IngestStatus::QueueFull: return "QueueFull";
    case IngestStatus::UnknownSource: return "UnknownSource";
    case IngestStatus::BackendUnavailable: return "BackendUnavailable";
  }
  return "";
}

Document IngestCounters::to_document() const {
  return Document{{"accepted", accepted},
                  {"rejected", rejected},
                  {"non_convergent", non_convergent},
                  {"queue_full", queue_full},
                  {"records_enqueued", records_enqueued},
                  {"records_fused", records_fused},
                  {"script_hits", script_hits},
                  {"standardizer_runs", standardizer_runs},
                  {"fusion_errors", fusion_errors}};
}

IngestPipeline::IngestPipeline(IngestConfig ingest, StandardizerConfig standardizer, FusionConfig fusion,
                               BackendFactory factory)
    : ingest_(std::move(ingest)),
      standardizer_(std::move(standardizer)),
      factory_(std::move(factory)),
      queue_(ingest_.queue_capacity, ingest_.reorder_window),
      engine_(std::move(fusion)) {
  ingest_.check();
  standardizer_.check();
  if (!factory_) {
    factory_ = [this](const std::string&, const SourceRoute& route) {
      StandardizerConfig cfg = standardizer_;
      if (route.backend) cfg.kind = *route.backend;
      return make_backend(cfg, route.mock);
    };
  }
}

IngestPipeline::SourceState& IngestPipeline::state_for(const std::string& source, const SourceRoute& route) {
  std::lock_guard lock(sources_mutex_);
  auto& slot = sources_[source];
  if (!slot) {
    slot = std::make_unique<SourceState>();
    if (route.format == PayloadFormat::Nmea) {
      slot->nmea.emplace(ingest_.nmea_date);
    } else {
      slot->backend = factory_(source, route);
    }
  }
  return *slot;
}

IngestResult IngestPipeline::submit_text(const std::string& source, TimeNs received_at, std::string_view body) {
  auto it = ingest_.routes.find(source);
  if (it != ingest_.routes.end() && it->second.format == PayloadFormat::Nmea) {
    return submit(source, received_at, Document(std::string(body)));
  }
  Document doc;
  try {
    doc = parse_document(body);
  } catch (const Error& e) {
    std::lock_guard lock(counters_mutex_);
    ++counters_.rejected;
    return {IngestStatus::ParseError, 0, false, std::nullopt, e.what()};
  }
  return submit(source, received_at, doc);
}

IngestResult IngestPipeline::submit(const std::string& source, TimeNs received_at, const Document& body) {
  auto reject = [&](IngestStatus status, std::string message) {
    std::lock_guard lock(counters_mutex_);
    if (status == IngestStatus::NonConvergent) ++counters_.non_convergent;
    else ++counters_.rejected;
    return IngestResult{status, 0, false, std::nullopt, std::move(message)};
  };

  auto route_it = ingest_.routes.find(source);
  if (route_it == ingest_.routes.end()) return reject(IngestStatus::UnknownSource, "no route for source '" + source + "'");
  const SourceRoute& route = route_it->second;

  SourceState* state = nullptr;
  try {
    state = &state_for(source, route);
  } catch (const Error& e) {
    return reject(IngestStatus::BackendUnavailable, e.what());
  }
  std::unique_lock source_lock(state->mutex);

  if (route.format == PayloadFormat::Nmea) {
    if (!body.is_string()) return reject(IngestStatus::ParseError, "NMEA sources expect text");
    try {
      auto records = state->nmea->feed(body.get_ref<const std::string&>());
      source_lock.unlock();
      return enqueue(source, received_at, std::move(records), {});
    } catch (const Error& e) {
      return reject(IngestStatus::ParseError, e.what());
    }
  }

  RawPayload raw;
  try {
    raw = make_raw_payload(source, received_at, body);
  } catch (const Error& e) {
    return reject(IngestStatus::ParseError, e.what());
  }

  if (state->script) {
    const auto output = apply_script(*state->script, body);
    if (!output.source_missing() && validate_dataset(output.records).valid() && !output.records.empty()) {
      auto dataset = StandardizedDataset::from_documents(output.records);
      {
        std::lock_guard lock(counters_mutex_);
        ++counters_.script_hits;
      }
      source_lock.unlock();
      IngestResult result;
      result.via_script = true;
      return enqueue(source, received_at, dataset.records(), result);
    }
  }

  StandardizationOutcome outcome;
  try {
    {
      std::lock_guard lock(counters_mutex_);
      ++counters_.standardizer_runs;
    }
    outcome = standardize(*state->backend, raw, SchemaSet::builtin(), standardizer_.max_iterations);
  } catch (const Error& e) {
    return reject(IngestStatus::BackendUnavailable, e.what());
  }
  if (!outcome.converged) {
    auto result = reject(IngestStatus::NonConvergent, "standardization did not converge");
    result.report = outcome.final_report;
    return result;
  }
  if (outcome.dataset.empty()) return reject(IngestStatus::ParseError, "payload contains no sensor records");

  if (route.cache_script) {
    try {
      auto derivation = derive_script(body, outcome.dataset);
      if (derivation.unmatched.empty()) {
        auto checked = validate_script(std::move(derivation.script), body, outcome.dataset);
        if (checked.converged) state->script = std::move(checked.script);
      }
    } catch (const Error&) {
      // Shapes the deriver cannot address keep using the standardizer.
    }
  }
  source_lock.unlock();
  return enqueue(source, received_at, outcome.dataset.records(), {});
}

IngestResult IngestPipeline::enqueue(const std::string& source, TimeNs received_at,
                                     std::vector<StandardizedRecord> records, IngestResult result) {
  {
    std::lock_guard lock(queue_mutex_);
    if (!queue_.has_room(records.size())) {
      std::lock_guard counters_lock(counters_mutex_);
      ++counters_.queue_full;
      ++counters_.rejected;
      return {IngestStatus::QueueFull, 0, false, std::nullopt, "fusion queue is full"};
    }
    for (auto& r : records) queue_.push(source, std::move(r), received_at);
  }
  std::lock_guard lock(counters_mutex_);
  ++counters_.accepted;
  counters_.records_enqueued += records.size();
  result.status = IngestStatus::Accepted;
  result.record_count = records.size();
  return result;
}

void IngestPipeline::fuse(std::vector<QueuedRecord> items) {
  std::size_t errors = 0;
  for (const auto& item : items) {
    try {
      if (auto point = engine_.process(item.source, item.record)) trajectory_.push_back(*point);
    } catch (const Error&) {
      ++errors;
    }
  }
  std::lock_guard lock(counters_mutex_);
  counters_.records_fused += items.size() - errors;
  counters_.fusion_errors += errors;
}

void IngestPipeline::pump(TimeNs now) {
  std::lock_guard fusion_lock(fusion_mutex_);
  std::vector<QueuedRecord> items;
  {
    std::lock_guard lock(queue_mutex_);
    items = queue_.release(now);
  }
  fuse(std::move(items));
}

void IngestPipeline::flush() {
  std::lock_guard fusion_lock(fusion_mutex_);
  std::vector<QueuedRecord> items;
  {
    std::lock_guard lock(queue_mutex_);
    items = queue_.flush();
  }
  fuse(std::move(items));
}

Trajectory IngestPipeline::trajectory() const {
  std::lock_guard lock(fusion_mutex_);
  return trajectory_;
}

std::optional<TrajectoryPoint> IngestPipeline::latest() const {
  std::lock_guard lock(fusion_mutex_);
  return engine_.latest();
}

IngestCounters IngestPipeline::counters() const {
  std::lock_guard lock(counters_mutex_);
  return counters_;
}

Document IngestPipeline::counters_document() const {
  Document doc = counters().to_document();
  {
    std::lock_guard lock(queue_mutex_);
    doc["queue_size"] = queue_.size();
    doc["dropped_late"] = queue_.dropped();
  }
  std::lock_guard lock(fusion_mutex_);
  doc["fusion"] = engine_.counters().to_document();
  return doc;
}

// --- replay -----------------------------------------------------------------------

Document ReplaySummary::to_document() const {
  Document doc = {{"accepted", accepted}, {"rejected", rejected}, {"non_convergent", non_convergent}};
  doc["issues"] = Document::array();
  for (const auto& i : issues) {
    doc["issues"].push_back({{"line", i.line}, {"code", std::string(to_string(i.code))}, {"message", i.message}});
  }
  return doc;
}

ReplaySummary replay(std::istream& log, double speed, IngestPipeline& pipeline, Sleeper sleeper) {
  if (!(speed > 0.0)) throw Error(ErrorCode::InvalidConfig, "replay speed must be > 0");
  if (!sleeper) sleeper = [](std::chrono::nanoseconds d) { std::this_thread::sleep_for(d); };

  ReplaySummary summary;
  std::optional<TimeNs> previous;
  std::string line;
  std::size_t number = 0;
  while (std::getline(log, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    TimeNs received_at = 0;
    std::string source;
    Document body;
    try {
      const Document entry = Document::parse(line);
      if (!entry.is_object()) throw std::invalid_argument("entry is not an object");
      if (!entry.contains("received_at") || !entry["received_at"].is_number_integer()) {
        throw std::invalid_argument("received_at must be an integer");
      }
      received_at = entry["received_at"].get<TimeNs>();
      if (received_at <= 0) throw std::invalid_argument("received_at must be positive");
      if (!entry.contains("source") || !entry["source"].is_string()) throw std::invalid_argument("source missing");
      source = entry["source"].get<std::string>();
      if (!entry.contains("body")) throw std::invalid_argument("body missing");
      body = entry["body"];
    } catch (const std::exception& e) {
      summary.issues.push_back({number, ErrorCode::MalformedLogLine, "line " + std::to_string(number) + ": " + e.what()});
      continue;
    }

    if (previous && std::isfinite(speed) && received_at > *previous) {
      sleeper(std::chrono::nanoseconds(
          static_cast<std::int64_t>(std::llround(static_cast<double>(received_at - *previous) / speed))));
    }
    previous = received_at;

    const IngestResult result = pipeline.submit(source, received_at, body);
    switch (result.status) {
      case IngestStatus::Accepted:
        ++summary.accepted;
        break;
      case IngestStatus::NonConvergent:
        ++summary.non_convergent;
        summary.issues.push_back({number, ErrorCode::InvalidRecord, result.message});
        break;
      case IngestStatus::QueueFull:
        ++summary.rejected;
        summary.issues.push_back({number, ErrorCode::QueueFull, result.message});
        break;
      case IngestStatus::BackendUnavailable:
        ++summary.rejected;
        summary.issues.push_back({number, ErrorCode::BackendUnavailable, result.message});
        break;
      case IngestStatus::UnknownSource:
        ++summary.rejected;
        summary.issues.push_back({number, ErrorCode::InvalidConfig, result.message});
        break;
      case IngestStatus::ParseError:
        ++summary.rejected;
        summary.issues.push_back({number, ErrorCode::MalformedDocument, result.message});
        break;
    }
    pipeline.pump(received_at);
  }
  pipeline.flush();
  return summary;
}

ReplaySummary replay_file(const std::string& path, double speed, IngestPipeline& pipeline, Sleeper sleeper) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return replay(in, speed, pipeline, std::move(sleeper));
}

}  // namespace seampos
