#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/evaluate.hpp"
#include "seampos/fusion.hpp"
#include "seampos/ingest.hpp"
#include "seampos/schema.hpp"

namespace seampos::synth {

/// 2024-01-15T08:30:00Z
inline constexpr TimeNs kEpoch = 1705307400LL * 1'000'000'000LL;

inline FrameOrigin test_origin() { return {47.3769, 8.5417, 408.0}; }

// --- straight walk --------------------------------------------------------------

struct WalkSpec {
  double length_m = 60.0;
  double speed_mps = 1.0;
  double imu_hz = 100.0;
  double uwb_hz = 20.0;
  double vps_hz = 1.0;
  double gnss_hz = 1.0;
  double imu_sigma = 0.05;
  double uwb_sigma = 1.0;
  double vps_sigma = 0.39;
  double gnss_sigma = 25.6;
  FrameOrigin origin = test_origin();
  TimeNs t0 = kEpoch;
};

/// Walk due north from the origin at constant speed. Sensor noise is
/// horizontal only; the IMU reads the specific force of level motion.
struct WalkRun {
  StandardizedDataset imu;
  StandardizedDataset uwb;
  StandardizedDataset vps;
  StandardizedDataset gnss;
  GroundTruthPath truth{{Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX()}};
};

WalkRun make_walk(const WalkSpec& spec, std::uint64_t seed);

struct WalkSelection {
  bool imu = true;
  bool uwb = true;
  bool vps = false;
  bool gnss = false;
};

std::vector<LabeledStream> walk_streams(const WalkRun& run, WalkSelection selection);

/// Origin set, "vps" source mapped to VPS, default noise.
FusionConfig walk_fusion_config(const WalkSpec& spec);

/// Measurement-only error of a position stream against the path (GNSS
/// positions are converted through the origin).
ErrorSummary measurement_error(const StandardizedDataset& positions, const GroundTruthPath& truth,
                               const FrameOrigin& origin);

// --- TRGM example pairs -------------------------------------------------------------

struct ExamplePair {
  Document input;
  StandardizedDataset output;
  std::vector<SensorKind> kinds;
};

/// Raw payload in one of several layouts plus its standardized form,
/// computed here with literal conversion factors. `variant` selects the
/// layout, units and kinds; `value_seed` only the numbers, so two calls that
/// differ in `value_seed` give structurally identical payloads.
ExamplePair make_example_pair(int variant, std::uint64_t value_seed);

// --- ingest log -------------------------------------------------------------------------

struct LogEntry {
  TimeNs received_at = 0;
  std::string source;
  Document body;
  TimeNs sample_time = 0;
};

struct IngestScenario {
  std::vector<LogEntry> entries;  // ordered by received_at
  GroundTruthPath truth{{Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX()}};
  Document config;  // GlobalConfig document
};

/// 20 s walk: IMU 20 Hz, UWB 3 Hz, VPS 1 Hz, NMEA 1 Hz = 500 payloads.
IngestScenario make_ingest_scenario(std::uint64_t seed);

std::string to_log(const std::vector<LogEntry>& entries);

/// GGA sentence with a computed checksum.
std::string make_gga(TimeNs t, double lat, double lon, double alt, int satellites = 9, double hdop = 0.8);
std::string make_rmc(TimeNs t, double lat, double lon, double speed_knots);

}  // namespace seampos::synth
