#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "seampos/geodesy.hpp"
#include "seampos/nmea.hpp"

namespace seampos::synth {

namespace {

constexpr double kG = 9.80665;

TimeNs at(TimeNs t0, double seconds) { return t0 + static_cast<TimeNs>(std::llround(seconds * 1e9)); }

StandardizedRecord position_record(SensorKind kind, TimeNs t, const Eigen::Vector3d& p) {
  return StandardizedRecord::make(kind, t, PositionReading{{p.x(), p.y(), p.z()}});
}

std::string base64(const std::vector<unsigned char>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string iso8601(TimeNs t) {
  const auto secs = t / 1'000'000'000;
  const auto frac = t % 1'000'000'000;
  const std::chrono::sys_seconds tp{std::chrono::seconds(secs)};
  const auto day = std::chrono::floor<std::chrono::days>(tp);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{tp - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%09lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()), static_cast<long long>(frac));
  return buf;
}

std::string nmea_time(TimeNs t) {
  const auto tod_cs = (t / 10'000'000) % (86400LL * 100);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02lld%02lld%02lld.%02lld", tod_cs / 360000, (tod_cs / 6000) % 60,
                (tod_cs / 100) % 60, tod_cs % 100);
  return buf;
}

std::string nmea_angle(double deg, int degree_digits) {
  const double a = std::abs(deg);
  const int whole = static_cast<int>(a);
  const double minutes = (a - whole) * 60.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, degree_digits == 2 ? "%02d%09.6f" : "%03d%09.6f", whole, minutes);
  return buf;
}

std::string with_checksum(const std::string& body) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "*%02X", nmea_checksum(body));
  return "$" + body + buf;
}

}  // namespace

// --- walk -------------------------------------------------------------------------

WalkRun make_walk(const WalkSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double duration = spec.length_m / spec.speed_mps;
  auto truth_at = [&](double s) { return Eigen::Vector3d(std::min(spec.speed_mps * s, spec.length_m), 0.0, 0.0); };

  std::vector<StandardizedRecord> imu, uwb, vps, gnss;
  for (int k = 0;; ++k) {
    const double s = k / spec.imu_hz;
    if (s > duration) break;
    imu.push_back(StandardizedRecord::make(
        SensorKind::Accelerometer, at(spec.t0, s),
        AxisReading{spec.imu_sigma * n01(rng), spec.imu_sigma * n01(rng), kG + spec.imu_sigma * n01(rng)}));
  }
  for (int k = 0;; ++k) {
    const double s = k / spec.uwb_hz + 0.0025;
    if (s > duration) break;
    const Eigen::Vector3d noise(spec.uwb_sigma * n01(rng), spec.uwb_sigma * n01(rng), 0.0);
    uwb.push_back(position_record(SensorKind::UWB, at(spec.t0, s), truth_at(s) + noise));
  }
  for (int k = 0;; ++k) {
    const double s = k / spec.vps_hz + 0.0075;
    if (s > duration) break;
    const Eigen::Vector3d noise(spec.vps_sigma * n01(rng), spec.vps_sigma * n01(rng), 0.0);
    vps.push_back(position_record(SensorKind::UWB, at(spec.t0, s), truth_at(s) + noise));
  }
  for (int k = 0;; ++k) {
    const double s = k / spec.gnss_hz + 0.0125;
    if (s > duration) break;
    const Eigen::Vector3d noise(spec.gnss_sigma * n01(rng), spec.gnss_sigma * n01(rng), 0.0);
    const Geodetic g = ned_to_geodetic(truth_at(s) + noise, spec.origin);
    LocationReading loc{g.lat_deg, g.lon_deg, g.alt_m, spec.speed_mps, 0.0, spec.gnss_sigma, 1.5 * spec.gnss_sigma};
    gnss.push_back(StandardizedRecord::make(SensorKind::Location, at(spec.t0, s), loc));
  }

  WalkRun run;
  run.imu = StandardizedDataset(std::move(imu));
  run.uwb = StandardizedDataset(std::move(uwb));
  run.vps = StandardizedDataset(std::move(vps));
  run.gnss = StandardizedDataset(std::move(gnss));
  run.truth = GroundTruthPath({Eigen::Vector3d::Zero(), Eigen::Vector3d(spec.length_m, 0.0, 0.0)});
  return run;
}

std::vector<LabeledStream> walk_streams(const WalkRun& run, WalkSelection selection) {
  std::vector<LabeledStream> out;
  if (selection.imu) out.push_back({"imu", run.imu});
  if (selection.uwb) out.push_back({"uwb", run.uwb});
  if (selection.vps) out.push_back({"vps", run.vps});
  if (selection.gnss) out.push_back({"gnss", run.gnss});
  return out;
}

FusionConfig walk_fusion_config(const WalkSpec& spec) {
  FusionConfig config;
  config.origin = spec.origin;
  config.sources["vps"] = MeasurementKind::VPS;
  return config;
}

ErrorSummary measurement_error(const StandardizedDataset& positions, const GroundTruthPath& truth,
                               const FrameOrigin& origin) {
  std::vector<double> errors;
  for (const auto& r : positions.records()) {
    Eigen::Vector3d p;
    if (const auto* pos = std::get_if<PositionReading>(&r.payload())) {
      p = {pos->position[0], pos->position[1], pos->position[2]};
    } else {
      const auto& loc = std::get<LocationReading>(r.payload());
      p = geodetic_to_ned(loc.latitude, loc.longitude, loc.altitude, origin);
    }
    errors.push_back(point_to_path_distance(p, truth));
  }
  return summarize(errors);
}

// --- example pairs ------------------------------------------------------------------

namespace {

enum class TimeFormat { Seconds, Millis, Micros, Nanos, Iso };

struct KindPlan {
  SensorKind kind;
  TimeFormat time_format;
  std::string unit;  // raw unit for the kind's main quantity ("" = canonical)
  std::string unit2;  // second unit (Location speed / Barometer pressure)
};

/// Generated raw values and the canonical record for one kind.
struct KindSample {
  Document raw_fields = Document::object();
  Document values = Document::object();  // canonical payload fields
  TimeNs time = 0;
  Document raw_time;
};

const char* prefix(SensorKind k) {
  switch (k) {
    case SensorKind::Magnetometer: return "mag";
    case SensorKind::Gyroscope: return "gyr";
    case SensorKind::Accelerometer: return "acc";
    case SensorKind::Gravity: return "grv";
    case SensorKind::UWB: return "uwb";
    case SensorKind::Bluetooth: return "ble";
    case SensorKind::Pedometer: return "ped";
    case SensorKind::Orientation: return "ori";
    case SensorKind::Barometer: return "bar";
    case SensorKind::Location: return "gps";
    case SensorKind::Image: return "cam";
  }
  return "x";
}

double factor(const std::string& unit) {
  if (unit.empty() || unit == "m/s^2" || unit == "rad/s" || unit == "uT" || unit == "m" || unit == "hPa" ||
      unit == "m/s") {
    return 1.0;
  }
  if (unit == "g") return 9.80665;
  if (unit == "deg/s") return std::numbers::pi / 180.0;
  if (unit == "gauss") return 100.0;
  if (unit == "nT") return 0.001;
  if (unit == "cm") return 0.01;
  if (unit == "ft") return 0.3048;
  if (unit == "km/h") return 1.0 / 3.6;
  if (unit == "kPa") return 10.0;
  throw std::invalid_argument("test factor table lacks " + unit);
}

Document raw_time(TimeNs t, TimeFormat f) {
  switch (f) {
    case TimeFormat::Seconds: return t / 1'000'000'000;
    case TimeFormat::Millis: return t / 1'000'000;
    case TimeFormat::Micros: return t / 1'000;
    case TimeFormat::Nanos: return t;
    case TimeFormat::Iso: return iso8601(t);
  }
  return t;
}

TimeNs quantize(TimeNs t, TimeFormat f) {
  switch (f) {
    case TimeFormat::Seconds: return t - t % 1'000'000'000;
    case TimeFormat::Millis: return t - t % 1'000'000;
    case TimeFormat::Micros: return t - t % 1'000;
    case TimeFormat::Nanos:
    case TimeFormat::Iso: return t;
  }
  return t;
}

KindSample sample_kind(const KindPlan& plan, int layout, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  KindSample s;
  auto scaled = [&](double lo, double hi) { return lo + (hi - lo) * (0.5 + 0.5 * u(rng)); };
  auto put = [&](const std::string& raw_key, const std::string& field, double raw, const std::string& unit) {
    s.raw_fields[raw_key] = raw;
    s.values[field] = raw * factor(unit);
  };
  const std::array<std::string, 3> axis_keys = layout == 1 ? std::array<std::string, 3>{"ax", "ay", "az"}
                                                           : std::array<std::string, 3>{"x", "y", "z"};
  switch (plan.kind) {
    case SensorKind::Magnetometer:
    case SensorKind::Gyroscope:
    case SensorKind::Accelerometer:
    case SensorKind::Gravity: {
      const double span = plan.kind == SensorKind::Magnetometer ? 60.0 : 10.0;
      const double raw_span = span / factor(plan.unit);
      for (int i = 0; i < 3; ++i) put(axis_keys[static_cast<std::size_t>(i)], std::string(1, "xyz"[i]), raw_span * u(rng), plan.unit);
      if (!plan.unit.empty()) s.raw_fields["unit"] = plan.unit;
      break;
    }
    case SensorKind::UWB:
    case SensorKind::Bluetooth: {
      Document raw = Document::array(), canon = Document::array();
      for (int i = 0; i < 3; ++i) {
        const double v = scaled(0.5, 40.0) / factor(plan.unit);
        raw.push_back(v);
        canon.push_back(v * factor(plan.unit));
      }
      s.raw_fields[layout == 2 ? "xyz" : "position"] = raw;
      s.values["position"] = canon;
      if (!plan.unit.empty()) s.raw_fields["units"] = plan.unit;
      break;
    }
    case SensorKind::Pedometer: {
      const std::int64_t steps = std::uniform_int_distribution<std::int64_t>(100, 99999)(rng);
      s.raw_fields[layout == 1 ? "step_count" : "steps"] = steps;
      s.values["steps"] = steps;
      break;
    }
    case SensorKind::Orientation: {
      Eigen::Vector4d q(u(rng), u(rng), u(rng), u(rng));
      q.normalize();
      const char* keys[] = {"qx", "qy", "qz", "qw"};
      for (int i = 0; i < 4; ++i) {
        s.raw_fields[layout == 1 ? std::string(1, "xyzw"[i]) : keys[i]] = q(i);
        s.values[keys[i]] = q(i);
      }
      break;
    }
    case SensorKind::Barometer:
      put(layout == 1 ? "rel_alt" : "relative_altitude", "relative_altitude", scaled(-20.0, 20.0), "m");
      put(layout == 1 ? "p" : "pressure", "pressure", scaled(950.0, 1050.0) / factor(plan.unit2), plan.unit2);
      break;
    case SensorKind::Location:
      put(layout == 1 ? "lat" : "latitude", "latitude", scaled(-80.0, 80.0), "");
      put(layout == 1 ? "lng" : "longitude", "longitude", scaled(-170.0, 170.0), "");
      put(layout == 1 ? "alt" : "altitude", "altitude", scaled(100.0, 900.0) / factor(plan.unit), plan.unit);
      put("speed", "speed", scaled(0.1, 3.0) / factor(plan.unit2), plan.unit2);
      put("speed_accuracy", "speed_accuracy", scaled(0.05, 0.5), "");
      put(layout == 1 ? "hacc" : "horizontal_accuracy", "horizontal_accuracy", scaled(2.0, 15.0), "");
      put(layout == 1 ? "vacc" : "vertical_accuracy", "vertical_accuracy", scaled(3.0, 25.0), "");
      break;
    case SensorKind::Image: {
      std::vector<unsigned char> bytes(std::uniform_int_distribution<int>(6, 30)(rng));
      for (auto& b : bytes) b = static_cast<unsigned char>(std::uniform_int_distribution<int>(0, 255)(rng));
      s.raw_fields[layout == 1 ? "jpeg" : "image"] = base64(bytes);
      s.values["image"] = base64(bytes);
      break;
    }
  }
  return s;
}

Document canonical_record(SensorKind kind, TimeNs t, const Document& values) {
  Document record = {{"name", std::string(to_string(kind))}, {"time", t}};
  if (kind_layout(kind).wrapped) {
    record["values"] = values;
  } else {
    for (const auto& [k, v] : values.items()) record[k] = v;
  }
  return record;
}

}  // namespace

ExamplePair make_example_pair(int variant, std::uint64_t value_seed) {
  std::mt19937_64 plan_rng(0x5eed0000ULL + static_cast<std::uint64_t>(variant));
  std::mt19937_64 value_rng(value_seed);

  std::vector<SensorKind> kinds{kAllSensorKinds[static_cast<std::size_t>(variant % 11)]};
  auto add_kind = [&](int index) {
    const SensorKind k = kAllSensorKinds[static_cast<std::size_t>(index % 11)];
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  };
  if (variant >= 11) add_kind(variant * 3 + 1);
  if (variant >= 17) add_kind(variant * 5 + 2);

  const int layout = (variant + variant / 11) % 3;
  const bool shared_time = layout == 2;
  auto pick = [&](std::initializer_list<const char*> options) {
    std::vector<std::string> v(options.begin(), options.end());
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(plan_rng)];
  };
  const TimeFormat formats[] = {TimeFormat::Seconds, TimeFormat::Millis, TimeFormat::Micros, TimeFormat::Nanos,
                                TimeFormat::Iso};

  std::vector<KindPlan> plans;
  for (auto kind : kinds) {
    KindPlan p{kind, formats[std::uniform_int_distribution<int>(0, 4)(plan_rng)], "", ""};
    switch (kind) {
      case SensorKind::Magnetometer: p.unit = pick({"uT", "gauss", "nT"}); break;
      case SensorKind::Gyroscope: p.unit = pick({"rad/s", "deg/s"}); break;
      case SensorKind::Accelerometer: p.unit = pick({"m/s^2", "g"}); break;
      case SensorKind::Gravity: p.unit = pick({"m/s^2", "g"}); break;
      case SensorKind::UWB: p.unit = pick({"m", "cm"}); break;
      case SensorKind::Bluetooth: p.unit = pick({"m", "cm"}); break;
      case SensorKind::Barometer: p.unit2 = pick({"hPa", "kPa"}); break;
      case SensorKind::Location:
        p.unit = pick({"m", "ft"});
        p.unit2 = pick({"m/s", "km/h"});
        break;
      default: break;
    }
    if (p.unit == "m/s^2" || p.unit == "rad/s" || p.unit == "uT" || p.unit == "m") p.unit.clear();
    if (p.unit2 == "hPa" || p.unit2 == "m/s") p.unit2.clear();
    plans.push_back(p);
  }
  if (shared_time) {
    for (auto& p : plans) p.time_format = plans.front().time_format;
  }

  // Strictly increasing per-kind times keep the record order independent of the values.
  const TimeNs base = kEpoch + std::uniform_int_distribution<TimeNs>(0, 86'400)(value_rng) * 1'000'000'000LL +
                      std::uniform_int_distribution<TimeNs>(0, 999'999'999)(value_rng);
  std::vector<KindSample> samples;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    KindSample s = sample_kind(plans[i], layout, value_rng);
    const TimeNs t = shared_time ? base : base + static_cast<TimeNs>(i) * 1'250'000'000LL;
    s.time = quantize(t, plans[i].time_format);
    s.raw_time = raw_time(s.time, plans[i].time_format);
    samples.push_back(std::move(s));
  }

  Document input = Document::object();
  if (layout == 0) {
    input["sensor_data"] = Document::object();
    for (std::size_t i = 0; i < plans.size(); ++i) {
      Document entry = {{"timestamp", samples[i].raw_time}};
      for (const auto& [k, v] : samples[i].raw_fields.items()) entry[k] = v;
      input["sensor_data"][std::string(to_string(plans[i].kind))] = std::move(entry);
    }
  } else if (layout == 1) {
    input["device"] = "unit-" + std::to_string(variant);
    input["readings"] = Document::array();
    for (std::size_t i = 0; i < plans.size(); ++i) {
      std::string type(to_string(plans[i].kind));
      std::transform(type.begin(), type.end(), type.begin(), [](unsigned char c) { return std::tolower(c); });
      input["readings"].push_back({{"type", type}, {"ts", samples[i].raw_time}, {"data", samples[i].raw_fields}});
    }
  } else {
    input["t"] = samples.front().raw_time;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      for (const auto& [k, v] : samples[i].raw_fields.items()) input[std::string(prefix(plans[i].kind)) + "_" + k] = v;
    }
  }

  std::vector<StandardizedRecord> records;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    records.push_back(StandardizedRecord::from_document(canonical_record(plans[i].kind, samples[i].time, samples[i].values)));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const StandardizedRecord& a, const StandardizedRecord& b) { return a.time() < b.time(); });
  return {input, StandardizedDataset(std::move(records)), kinds};
}

// --- ingest scenario -------------------------------------------------------------------

std::string make_gga(TimeNs t, double lat, double lon, double alt, int satellites, double hdop) {
  char tail[96];
  std::snprintf(tail, sizeof tail, ",1,%02d,%.1f,%.2f,M,47.00,M,,", satellites, hdop, alt);
  const std::string body = "GPGGA," + nmea_time(t) + "," + nmea_angle(lat, 2) + (lat >= 0 ? ",N," : ",S,") +
                           nmea_angle(lon, 3) + (lon >= 0 ? ",E" : ",W") + tail;
  return with_checksum(body);
}

std::string make_rmc(TimeNs t, double lat, double lon, double speed_knots) {
  const std::chrono::sys_days day{std::chrono::floor<std::chrono::days>(
      std::chrono::sys_seconds{std::chrono::seconds(t / 1'000'000'000)})};
  const std::chrono::year_month_day ymd{day};
  char date[8];
  std::snprintf(date, sizeof date, "%02u%02u%02d", static_cast<unsigned>(ymd.day()), static_cast<unsigned>(ymd.month()),
                static_cast<int>(ymd.year()) % 100);
  char speed[16];
  std::snprintf(speed, sizeof speed, "%.2f", speed_knots);
  const std::string body = "GPRMC," + nmea_time(t) + ",A," + nmea_angle(lat, 2) + (lat >= 0 ? ",N," : ",S,") +
                           nmea_angle(lon, 3) + (lon >= 0 ? ",E," : ",W,") + speed + ",0.0," + date + ",,,A";
  return with_checksum(body);
}

IngestScenario make_ingest_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const FrameOrigin origin = test_origin();
  const double duration = 20.0;
  auto truth_at = [](double s) { return Eigen::Vector3d(s, 0.0, 0.0); };

  IngestScenario sc;
  // IMU 20 Hz: 400 payloads.
  for (int k = 0; k < 400; ++k) {
    const TimeNs t = kEpoch + k * 50'000'000LL;
    Document body = {{"t_ms", t / 1'000'000},
                     {"acc", {{"x", 0.05 * n01(rng)}, {"y", 0.05 * n01(rng)}, {"z", kG + 0.05 * n01(rng)}}}};
    sc.entries.push_back({t + 4'000'000, "imu", std::move(body), t});
  }
  // UWB 3 Hz: 60 payloads.
  for (int k = 0; k < 60; ++k) {
    const TimeNs t = kEpoch + k * 333'333'000LL + 1'111'000;
    const double s = static_cast<double>(t - kEpoch) * 1e-9;
    const Eigen::Vector3d p = truth_at(s) + Eigen::Vector3d(n01(rng), n01(rng), 0.0);
    Document body = {{"tag", "T1"}, {"ts", t / 1000}, {"pos", {p.x(), p.y(), p.z()}}};
    sc.entries.push_back({t + 31'000'000, "uwb", std::move(body), t});
  }
  // VPS 1 Hz: 20 payloads.
  for (int k = 0; k < 20; ++k) {
    const TimeNs t = kEpoch + k * 1'000'000'000LL + 250'500'000;
    const double s = static_cast<double>(t - kEpoch) * 1e-9;
    const Eigen::Vector3d p = truth_at(s) + Eigen::Vector3d(0.39 * n01(rng), 0.39 * n01(rng), 0.0);
    Document body = {{"frame", k}, {"stamp", iso8601(t)}, {"xyz", {p.x(), p.y(), p.z()}}};
    sc.entries.push_back({t + 140'000'000, "vps", std::move(body), t});
  }
  // NMEA 1 Hz: 20 payloads (RMC + GGA).
  for (int k = 0; k < 20; ++k) {
    const TimeNs t = kEpoch + k * 1'000'000'000LL + 730'000'000;
    const double s = static_cast<double>(t - kEpoch) * 1e-9;
    const Geodetic g = ned_to_geodetic(truth_at(s) + Eigen::Vector3d(25.6 * n01(rng), 25.6 * n01(rng), 0.0), origin);
    const std::string text = make_rmc(t, g.lat_deg, g.lon_deg, 1.94384) + "\r\n" +
                             make_gga(t, g.lat_deg, g.lon_deg, g.alt_m) + "\r\n";
    sc.entries.push_back({t + 90'000'000, "gnss", Document(text), t});
  }
  std::stable_sort(sc.entries.begin(), sc.entries.end(),
                   [](const LogEntry& a, const LogEntry& b) { return a.received_at < b.received_at; });
  (void)duration;

  sc.truth = GroundTruthPath({Eigen::Vector3d::Zero(), Eigen::Vector3d(duration, 0.0, 0.0)});

  auto mapping = [](const char* path, const char* kind, const char* field) {
    return Document{{"path", path}, {"kind", kind}, {"field", field}};
  };
  Document routes = Document::object();
  routes["imu"] = {{"format", "document"},
                   {"backend", "mock"},
                   {"mock",
                    {{"mappings",
                      {mapping("$.t_ms", "Accelerometer", "time"), mapping("$.acc.x", "Accelerometer", "x"),
                       mapping("$.acc.y", "Accelerometer", "y"), mapping("$.acc.z", "Accelerometer", "z")}}}}};
  routes["uwb"] = {{"format", "document"},
                   {"backend", "mock"},
                   {"mock", {{"mappings", {mapping("$.ts", "UWB", "time"), mapping("$.pos", "UWB", "position")}}}}};
  routes["vps"] = {{"format", "document"},
                   {"backend", "mock"},
                   {"mock", {{"mappings", {mapping("$.stamp", "UWB", "time"), mapping("$.xyz", "UWB", "position")}}}}};
  routes["gnss"] = {{"format", "nmea"}};

  sc.config = {{"standardizer", {{"kind", "mock"}, {"max_iterations", 5}}},
               {"fusion", {{"origin", origin.to_document()}, {"sources", {{"vps", "VPS"}}}}},
               {"ingest",
                {{"bind", "127.0.0.1"},
                 {"port", 0},
                 {"routes", routes},
                 {"reorder_window_ms", 200},
                 {"nmea_date", "2024-01-15"}}},
               {"log_level", "warn"}};
  return sc;
}

std::string to_log(const std::vector<LogEntry>& entries) {
  std::ostringstream out;
  for (const auto& e : entries) {
    Document line = {{"received_at", e.received_at}, {"source", e.source}, {"body", e.body}};
    out << line.dump() << '\n';
  }
  return out.str();
}

}  // namespace seampos::synth
