#include <atomic>
#include <chrono>
#include <condition_variable>
#include <thread>

#include "seampos/error.hpp"
#include "seampos/ingest.hpp"

// After the Eigen-using headers: <resolv.h> defines a `_res` macro.
#include <httplib.h>

namespace seampos {

namespace {

TimeNs wall_clock_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void reply(httplib::Response& res, int status, const Document& doc) {
  res.status = status;
  res.set_content(doc.dump(), "application/json");
}

}  // namespace

struct IngestService::Impl {
  httplib::Server server;
  std::thread listener;
  std::thread pumper;
  std::atomic<bool> running{false};
  std::mutex mutex;
  std::condition_variable stopped;
};

IngestService::IngestService(IngestPipeline& pipeline) : impl_(std::make_unique<Impl>()), pipeline_(pipeline) {
  auto& server = impl_->server;

  server.Post(R"(/ingest/([A-Za-z0-9_.\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string source = req.matches[1];
    const IngestResult result = pipeline_.submit_text(source, wall_clock_ns(), req.body);
    switch (result.status) {
      case IngestStatus::Accepted:
        reply(res, result.record_count > 0 ? 202 : 200, Document{{"record_count", result.record_count}});
        break;
      case IngestStatus::ParseError:
        reply(res, 400, Document{{"error", result.message}});
        break;
      case IngestStatus::NonConvergent:
        reply(res, 422, result.report ? result.report->to_document() : Document{{"error", result.message}});
        break;
      case IngestStatus::QueueFull:
        res.set_header("Retry-After", "1");
        reply(res, 503, Document{{"error", result.message}});
        break;
      case IngestStatus::UnknownSource:
        reply(res, 404, Document{{"error", result.message}});
        break;
      case IngestStatus::BackendUnavailable:
        reply(res, 502, Document{{"error", result.message}});
        break;
    }
  });

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, Document{{"status", "ok"}});
  });

  server.Get("/trajectory/latest", [this](const httplib::Request&, httplib::Response& res) {
    if (auto point = pipeline_.latest()) {
      reply(res, 200, point->to_document());
    } else {
      reply(res, 404, Document{{"error", "no estimate yet"}});
    }
  });

  server.Get("/metrics/counters", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, pipeline_.counters_document());
  });
}

IngestService::~IngestService() { stop(); }

int IngestService::start() {
  const auto& cfg = pipeline_.config();
  if (cfg.port == 0) {
    port_ = impl_->server.bind_to_any_port(cfg.bind_address);
  } else if (impl_->server.bind_to_port(cfg.bind_address, cfg.port)) {
    port_ = cfg.port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::Io, "cannot bind " + cfg.bind_address + ":" + std::to_string(cfg.port));

  impl_->running = true;
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->pumper = std::thread([this] {
    std::unique_lock lock(impl_->mutex);
    while (impl_->running) {
      impl_->stopped.wait_for(lock, std::chrono::milliseconds(10));
      lock.unlock();
      pipeline_.pump(wall_clock_ns());
      lock.lock();
    }
  });
  impl_->server.wait_until_ready();
  return port_;
}

void IngestService::run() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped.wait(lock, [this] { return !impl_->running.load(); });
}

void IngestService::stop() {
  if (!impl_ || !impl_->running.exchange(false)) return;
  impl_->server.stop();
  impl_->stopped.notify_all();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->pumper.joinable()) impl_->pumper.join();
  pipeline_.flush();
}

}  // namespace seampos
