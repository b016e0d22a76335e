#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "seampos/config.hpp"
#include "seampos/error.hpp"
#include "seampos/evaluate.hpp"
#include "seampos/fusion.hpp"
#include "seampos/ingest.hpp"
#include "seampos/standardizer.hpp"
#include "seampos/trgm.hpp"
#include "seampos/validation.hpp"

namespace seampos::cli {

namespace {

std::atomic<bool> g_stop_requested{false};

extern "C" void request_stop(int) { g_stop_requested = true; }

struct Options {
  std::string config_path;
  std::string log_level;

  std::string input;
  std::vector<std::string> inputs;
  std::string output;
  std::string target;
  std::string script;
  std::string mock;
  std::string source = "cli";
  std::int64_t received_at = 0;
  int max_iterations = 0;

  std::string trajectory;
  std::string truth;
  std::string label;
  std::string csv;
  bool planar = false;

  std::string log;
  std::string speed;
  std::string trajectory_out;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
  file << text;
}

double parse_speed(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw CLI::ValidationError("--speed", "must be a positive number or inf");
  return v;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, LogLevel level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("seampos", sink);
  logger->set_pattern("[%l] %v");
  switch (level) {
    case LogLevel::Trace: logger->set_level(spdlog::level::trace); break;
    case LogLevel::Debug: logger->set_level(spdlog::level::debug); break;
    case LogLevel::Info: logger->set_level(spdlog::level::info); break;
    case LogLevel::Warn: logger->set_level(spdlog::level::warn); break;
    case LogLevel::Error: logger->set_level(spdlog::level::err); break;
    case LogLevel::Off: logger->set_level(spdlog::level::off); break;
  }
  return logger;
}

// --- subcommands ------------------------------------------------------------------

int cmd_standardize(const Options& o, const GlobalConfig& cfg, spdlog::logger& log, std::ostream& out) {
  const Document body = read_document_file(o.input);
  std::optional<MockConfig> mock;
  if (!o.mock.empty()) mock = MockConfig::from_document(read_document_file(o.mock));
  auto backend = make_backend(cfg.standardizer, mock);
  const TimeNs received_at =
      o.received_at > 0 ? o.received_at
                        : std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
  const int iterations = o.max_iterations > 0 ? o.max_iterations : cfg.standardizer.max_iterations;
  const auto outcome = standardize(*backend, make_raw_payload(o.source, received_at, body), SchemaSet::builtin(),
                                   iterations);
  log.info("standardization {} after {} iteration(s)", outcome.converged ? "converged" : "did not converge",
           outcome.iterations_used);
  if (!outcome.converged) {
    out << outcome.final_report.to_document().dump() << '\n';
    return kDataFailure;
  }
  write_text(o.output, to_ndjson(outcome.dataset.to_documents()), out);
  return kSuccess;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto records = read_ndjson_file(o.input);
  const auto report = validate_dataset(records);
  out << report.to_document().dump() << '\n';
  return report.valid() ? kSuccess : kDataFailure;
}

int cmd_gen_rules(const Options& o, spdlog::logger& log, std::ostream& out) {
  const Document input = read_document_file(o.input);
  const auto target = StandardizedDataset::from_documents(read_ndjson_file(o.target));
  TransformationScript script;
  try {
    script = derive_transformation_script(input, target);
  } catch (const UnmatchedLeafError& e) {
    log.error("{}", e.what());
    Document doc = {{"unmatched", e.leaves()}};
    out << doc.dump() << '\n';
    return kDataFailure;
  }
  const auto checked = validate_script(std::move(script), input, target, o.max_iterations > 0 ? o.max_iterations : 5);
  log.info("script {} after {} iteration(s)", checked.converged ? "validated" : "failed validation",
           checked.iterations_used);
  if (!checked.converged) {
    out << checked.report.to_document().dump() << '\n';
    return kDataFailure;
  }
  write_text(o.output, checked.script.to_document().dump(2) + "\n", out);
  return kSuccess;
}

int cmd_transform(const Options& o, spdlog::logger& log, std::ostream& out) {
  const auto script = TransformationScript::from_document(read_document_file(o.script));
  const Document input = read_document_file(o.input);
  const auto result = apply_script(script, input);
  for (const auto& issue : result.issues) log.warn("{} at {}: {}", to_string(issue.kind), issue.path, issue.message);
  const auto report = validate_dataset(result.records);
  if (result.source_missing() || !report.valid()) {
    out << report.to_document().dump() << '\n';
    return kDataFailure;
  }
  std::vector<Document> docs(result.records.begin(), result.records.end());
  write_text(o.output, to_ndjson(docs), out);
  return kSuccess;
}

int cmd_fuse(const Options& o, const GlobalConfig& cfg, spdlog::logger& log, std::ostream& out) {
  std::vector<LabeledStream> streams;
  for (const auto& spec : o.inputs) {
    const auto eq = spec.find('=');
    std::string label = eq == std::string::npos ? "" : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    streams.push_back(LabeledStream{label, StandardizedDataset::from_documents(read_ndjson_file(path))});
  }
  FusionCounters counters;
  const auto trajectory = run_filter(streams, cfg.fusion, &counters);
  log.info("fused {} record(s): {}", counters.processed, counters.to_document().dump());
  write_text(o.output, trajectory_to_ndjson(trajectory), out);
  return kSuccess;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto trajectory = read_trajectory_file(o.trajectory);
  const auto path = GroundTruthPath::from_file(o.truth);
  const auto result = evaluate_run(trajectory, path, o.label, o.planar);
  const std::string csv_path = o.csv.empty() ? o.trajectory + ".errors.csv" : o.csv;
  write_text(csv_path, result.series_csv(), out);
  write_text(o.output, result.report(csv_path).dump() + "\n", out);
  return kSuccess;
}

int cmd_replay(const Options& o, const GlobalConfig& cfg, spdlog::logger& log, std::ostream& out) {
  const double speed = o.speed.empty() ? cfg.ingest.replay_speed : parse_speed(o.speed);
  IngestPipeline pipeline(cfg.ingest, cfg.standardizer, cfg.fusion);
  const auto summary = replay_file(o.log, speed, pipeline);
  for (const auto& issue : summary.issues) log.warn("line {}: {}", issue.line, issue.message);
  if (!o.trajectory_out.empty()) write_text(o.trajectory_out, trajectory_to_ndjson(pipeline.trajectory()), out);
  out << summary.to_document().dump() << '\n';
  return summary.rejected == 0 && summary.non_convergent == 0 && summary.issues.empty() ? kSuccess : kDataFailure;
}

int cmd_serve(const GlobalConfig& cfg, spdlog::logger& log) {
  IngestPipeline pipeline(cfg.ingest, cfg.standardizer, cfg.fusion);
  IngestService service(pipeline);
  g_stop_requested = false;
  std::signal(SIGINT, request_stop);
  std::signal(SIGTERM, request_stop);
  const int port = service.start();
  log.info("listening on {}:{}", cfg.ingest.bind_address, port);
  while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  log.info("stopped: {}", pipeline.counters_document().dump());
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positioning-sensor standardization, transformation and fusion pipeline", "seampos"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Configuration document")->check(CLI::ExistingFile);
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off (SEAMPOS_LOG_LEVEL overrides)");

  auto* standardize_cmd = app.add_subcommand("standardize", "Standardize one raw payload");
  standardize_cmd->add_option("--input", o.input, "Raw payload document")->required()->check(CLI::ExistingFile);
  standardize_cmd->add_option("--out", o.output, "Output NDJSON (default stdout)");
  standardize_cmd->add_option("--mock", o.mock, "Mapping for the deterministic backend")->check(CLI::ExistingFile);
  standardize_cmd->add_option("--source", o.source, "Source identifier");
  standardize_cmd->add_option("--received-at", o.received_at, "Receive time, UNIX ns");
  standardize_cmd->add_option("--max-iterations", o.max_iterations, "Iteration cap")->check(CLI::Range(1, 20));

  auto* validate_cmd = app.add_subcommand("validate", "Validate standardized records");
  validate_cmd->add_option("--input", o.input, "NDJSON records")->required()->check(CLI::ExistingFile);

  auto* gen_cmd = app.add_subcommand("gen-rules", "Derive a transformation script from an example pair");
  gen_cmd->add_option("--input", o.input, "Raw example document")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--target", o.target, "Standardized example (NDJSON)")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", o.output, "Script output (default stdout)");
  gen_cmd->add_option("--max-iterations", o.max_iterations, "Validation iteration cap")->check(CLI::Range(1, 20));

  auto* transform_cmd = app.add_subcommand("transform", "Apply a transformation script");
  transform_cmd->add_option("--script", o.script, "Script document")->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("--input", o.input, "Raw payload document")->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("--out", o.output, "Output NDJSON (default stdout)");

  auto* fuse_cmd = app.add_subcommand("fuse", "Run the filter over standardized records");
  fuse_cmd->add_option("--input", o.inputs, "[label=]records.ndjson (repeatable)")->required();
  fuse_cmd->add_option("--out", o.output, "Trajectory NDJSON (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a trajectory against a ground-truth path");
  evaluate_cmd->add_option("--trajectory", o.trajectory, "Trajectory NDJSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--truth", o.truth, "Ground-truth path document")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--label", o.label, "Run label")->required();
  evaluate_cmd->add_option("--csv", o.csv, "Error series CSV (default <trajectory>.errors.csv)");
  evaluate_cmd->add_option("--out", o.output, "Report output (default stdout)");
  evaluate_cmd->add_flag("--planar", o.planar, "Ignore the down axis");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP ingestion service");

  auto* replay_cmd = app.add_subcommand("replay", "Replay a recorded payload log");
  replay_cmd->add_option("--log", o.log, "Payload log (NDJSON)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--speed", o.speed, "Speed multiplier or inf");
  replay_cmd->add_option("--trajectory-out", o.trajectory_out, "Write the fused trajectory here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (!o.speed.empty()) (void)parse_speed(o.speed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kUsage;
  }

  GlobalConfig cfg;
  LogLevel level = LogLevel::Info;
  try {
    if (!o.config_path.empty()) cfg = GlobalConfig::from_file(o.config_path);
    level = cfg.log_level;
    if (!o.log_level.empty()) level = log_level_from_string(o.log_level);
    if (const char* env = std::getenv("SEAMPOS_LOG_LEVEL"); env && *env) level = log_level_from_string(env);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kUsage;
  }
  auto logger = make_logger(err, level);

  try {
    if (*standardize_cmd) return cmd_standardize(o, cfg, *logger, out);
    if (*validate_cmd) return cmd_validate(o, out);
    if (*gen_cmd) return cmd_gen_rules(o, *logger, out);
    if (*transform_cmd) return cmd_transform(o, *logger, out);
    if (*fuse_cmd) return cmd_fuse(o, cfg, *logger, out);
    if (*evaluate_cmd) return cmd_evaluate(o, out);
    if (*serve_cmd) return cmd_serve(cfg, *logger);
    if (*replay_cmd) return cmd_replay(o, cfg, *logger, out);
  } catch (const Error& e) {
    logger->error("{}", e.what());
    return e.code() == ErrorCode::Io || e.code() == ErrorCode::InvalidConfig ||
                   e.code() == ErrorCode::InvalidBackendConfig
               ? kUsage
               : kDataFailure;
  } catch (const std::exception& e) {
    logger->error("{}", e.what());
    return kDataFailure;
  }
  return kUsage;
}

}  // namespace seampos::cli
