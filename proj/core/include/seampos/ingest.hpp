#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "seampos/fusion.hpp"
#include "seampos/nmea.hpp"
#include "seampos/standardizer.hpp"
#include "seampos/trgm.hpp"
#include "seampos/validation.hpp"

namespace seampos {

enum class PayloadFormat { Document, Nmea };

/// How payloads posted to /ingest/{source} are turned into records.
struct SourceRoute {
  PayloadFormat format = PayloadFormat::Document;
  /// Backend override; defaults to the global standardizer configuration.
  std::optional<BackendKind> backend;
  /// Mapping for the deterministic backend.
  std::optional<MockConfig> mock;
  /// Derive and reuse a transformation script after the first success.
  bool cache_script = true;
};

struct IngestConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::map<std::string, SourceRoute> routes;
  std::size_t queue_capacity = 4096;
  double replay_speed = std::numeric_limits<double>::infinity();
  std::chrono::milliseconds reorder_window{200};
  std::optional<std::chrono::year_month_day> nmea_date;

  void check() const;
  /// Keys: bind, port, routes {source: {format, backend, mock, cache_script}},
  /// queue_capacity, replay_speed (number or "inf"), reorder_window_ms, nmea_date.
  static IngestConfig from_document(const Document& doc);
  Document to_document() const;
};

/// One standardized record waiting for fusion.
struct QueuedRecord {
  std::string source;
  StandardizedRecord record;
  TimeNs arrival = 0;
  std::uint64_t sequence = 0;
};

/// Min-heap on record time. An entry is released once it has waited for the
/// window (measured on the clock passed to `release`); records older than
/// the last released time are dropped.
class ReorderingQueue {
 public:
  ReorderingQueue(std::size_t capacity, std::chrono::nanoseconds window);

  /// Throws Error(QueueFull) when the queue holds `capacity` entries.
  /// Returns false (and counts a drop) for records older than the last release.
  bool push(std::string source, StandardizedRecord record, TimeNs arrival);
  /// True when `n` more entries fit.
  bool has_room(std::size_t n) const;

  std::vector<QueuedRecord> release(TimeNs now);
  std::vector<QueuedRecord> flush();

  std::size_t size() const noexcept { return heap_.size(); }
  std::size_t dropped() const noexcept { return dropped_; }

 private:
  struct Later {
    bool operator()(const QueuedRecord& a, const QueuedRecord& b) const {
      if (a.record.time() != b.record.time()) return a.record.time() > b.record.time();
      return a.sequence > b.sequence;
    }
  };

  std::size_t capacity_;
  std::chrono::nanoseconds window_;
  std::priority_queue<QueuedRecord, std::vector<QueuedRecord>, Later> heap_;
  std::optional<TimeNs> last_released_;
  std::uint64_t next_sequence_ = 0;
  std::size_t dropped_ = 0;
};

enum class IngestStatus { Accepted, ParseError, NonConvergent, QueueFull, UnknownSource, BackendUnavailable };

std::string_view to_string(IngestStatus status) noexcept;

struct IngestResult {
  IngestStatus status = IngestStatus::Accepted;
  std::size_t record_count = 0;
  bool via_script = false;
  std::optional<ValidationReport> report;  // NonConvergent
  std::string message;
};

struct IngestCounters {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t non_convergent = 0;
  std::size_t queue_full = 0;
  std::size_t records_enqueued = 0;
  std::size_t records_fused = 0;
  std::size_t script_hits = 0;
  std::size_t standardizer_runs = 0;
  std::size_t fusion_errors = 0;

  Document to_document() const;
};

/// Standardize -> reorder -> fuse. `submit` may be called concurrently;
/// fusion is serialized inside.
class IngestPipeline {
 public:
  /// Produces a backend for a route; the default uses make_backend.
  using BackendFactory =
      std::function<std::unique_ptr<StandardizerBackend>(const std::string& source, const SourceRoute& route)>;

  IngestPipeline(IngestConfig ingest, StandardizerConfig standardizer, FusionConfig fusion,
                 BackendFactory factory = {});

  /// `body` is the raw request text; Document routes parse it as JSON.
  IngestResult submit_text(const std::string& source, TimeNs received_at, std::string_view body);
  /// Same with an already parsed body (NMEA routes expect a string).
  IngestResult submit(const std::string& source, TimeNs received_at, const Document& body);

  /// Moves expired queue entries into the filter.
  void pump(TimeNs now);
  /// Moves every queued entry into the filter.
  void flush();

  Trajectory trajectory() const;
  std::optional<TrajectoryPoint> latest() const;
  IngestCounters counters() const;
  Document counters_document() const;

  const IngestConfig& config() const noexcept { return ingest_; }

 private:
  struct SourceState {
    std::mutex mutex;
    std::unique_ptr<StandardizerBackend> backend;
    std::optional<TransformationScript> script;
    std::optional<NmeaDecoder> nmea;
  };

  SourceState& state_for(const std::string& source, const SourceRoute& route);
  IngestResult enqueue(const std::string& source, TimeNs received_at, std::vector<StandardizedRecord> records,
                       IngestResult result);
  void fuse(std::vector<QueuedRecord> items);

  IngestConfig ingest_;
  StandardizerConfig standardizer_;
  BackendFactory factory_;

  mutable std::mutex sources_mutex_;
  std::map<std::string, std::unique_ptr<SourceState>> sources_;

  mutable std::mutex queue_mutex_;
  ReorderingQueue queue_;

  mutable std::mutex fusion_mutex_;
  FusionEngine engine_;
  Trajectory trajectory_;

  mutable std::mutex counters_mutex_;
  IngestCounters counters_;
};

// --- replay -------------------------------------------------------------------

struct ReplayIssue {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::MalformedLogLine;
  std::string message;
};

struct ReplaySummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t non_convergent = 0;
  std::vector<ReplayIssue> issues;

  Document to_document() const;
};

using Sleeper = std::function<void(std::chrono::nanoseconds)>;

/// Feeds a {received_at, source, body} log through the pipeline on the
/// log's own clock, pausing for recorded gaps divided by `speed` (infinite
/// speed never pauses), then flushes the queue.
ReplaySummary replay(std::istream& log, double speed, IngestPipeline& pipeline, Sleeper sleeper = {});
ReplaySummary replay_file(const std::string& path, double speed, IngestPipeline& pipeline, Sleeper sleeper = {});

// --- HTTP service -----------------------------------------------------------------

/// HTTP front end: POST /ingest/{source}, GET /health, GET /trajectory/latest,
/// GET /metrics/counters. A background thread pumps the queue on wall-clock time.
class IngestService {
 public:
  explicit IngestService(IngestPipeline& pipeline);
  ~IngestService();

  IngestService(const IngestService&) = delete;
  IngestService& operator=(const IngestService&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void run();
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  IngestPipeline& pipeline_;
  int port_ = 0;
};

}  // namespace seampos
