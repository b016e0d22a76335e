#include "seampos/fusion.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>

#include "seampos/error.hpp"
#include "seampos/units.hpp"

namespace seampos {

namespace {

constexpr FusionSensor kAllFusionSensors[] = {FusionSensor::IMU, FusionSensor::GNSS, FusionSensor::UWB,
                                              FusionSensor::VPS, FusionSensor::Bluetooth};

FusionSensor sensor_of(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::GNSS: return FusionSensor::GNSS;
    case MeasurementKind::UWB: return FusionSensor::UWB;
    case MeasurementKind::VPS: return FusionSensor::VPS;
    case MeasurementKind::Bluetooth: return FusionSensor::Bluetooth;
  }
  return FusionSensor::UWB;
}

bool is_position_kind(SensorKind kind) {
  return kind == SensorKind::UWB || kind == SensorKind::Bluetooth || kind == SensorKind::Location;
}

Eigen::Matrix3d parse_covariance(const Document& value, const std::string& key) {
  Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
  if (value.is_number()) {
    R = value.get<double>() * Eigen::Matrix3d::Identity();
  } else if (value.is_array() && value.size() == 3 && value[0].is_number()) {
    for (int i = 0; i < 3; ++i) R(i, i) = value[static_cast<std::size_t>(i)].get<double>();
  } else if (value.is_array() && value.size() == 3) {
    for (int i = 0; i < 3; ++i) {
      const auto& row = value[static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != 3) throw Error(ErrorCode::InvalidConfig, "R." + key + " must be 3x3");
      for (int j = 0; j < 3; ++j) R(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  } else {
    throw Error(ErrorCode::InvalidConfig, "R." + key + " must be a number, a 3-vector or a 3x3 matrix");
  }
  if (!R.allFinite() || (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      Eigen::LLT<Eigen::Matrix3d>(R).info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidConfig, "R." + key + " must be symmetric positive definite");
  }
  return R;
}

}  // namespace

std::string_view to_string(FusionSensor sensor) noexcept {
  switch (sensor) {
    case FusionSensor::IMU: return "IMU";
    case FusionSensor::GNSS: return "GNSS";
    case FusionSensor::UWB: return "UWB";
    case FusionSensor::VPS: return "VPS";
    case FusionSensor::Bluetooth: return "Bluetooth";
  }
  return "";
}

// --- config -----------------------------------------------------------------------

FusionConfig FusionConfig::from_document(const Document& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "fusion config must be an object");
  FusionConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "origin") {
        if (!value.is_null()) config.origin = FrameOrigin::from_document(value);
      } else if (key == "sigma_a") {
        config.sigma_a = value.get<double>();
      } else if (key == "R") {
        for (const auto& [name, cov] : value.items()) {
          const auto kind = measurement_kind_from_string(name);
          if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown sensor in R: '" + name + "'");
          config.r_overrides[*kind] = parse_covariance(cov, name);
        }
      } else if (key == "enabled") {
        config.enabled.clear();
        for (const auto& name : value) {
          const auto text = name.get<std::string>();
          auto it = std::find_if(std::begin(kAllFusionSensors), std::end(kAllFusionSensors),
                                 [&](FusionSensor s) { return to_string(s) == text; });
          if (it == std::end(kAllFusionSensors)) throw Error(ErrorCode::InvalidConfig, "unknown sensor '" + text + "'");
          config.enabled.insert(*it);
        }
      } else if (key == "sources") {
        for (const auto& [label, kind_name] : value.items()) {
          const auto kind = measurement_kind_from_string(kind_name.get<std::string>());
          if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown measurement kind for source '" + label + "'");
          config.sources[label] = *kind;
        }
      } else if (key == "orientation_timeout_s") {
        config.orientation_timeout_s = value.get<double>();
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown fusion key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("fusion config: ") + e.what());
  }
  if (!(config.sigma_a >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma_a must be >= 0");
  if (!(config.orientation_timeout_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "orientation_timeout_s must be > 0");
  return config;
}

Document FusionConfig::to_document() const {
  Document doc = Document::object();
  doc["origin"] = origin ? origin->to_document() : Document(nullptr);
  doc["sigma_a"] = sigma_a;
  doc["R"] = Document::object();
  for (const auto& [kind, R] : r_overrides) {
    Document m = Document::array();
    for (int i = 0; i < 3; ++i) m.push_back({R(i, 0), R(i, 1), R(i, 2)});
    doc["R"][std::string(to_string(kind))] = std::move(m);
  }
  doc["enabled"] = Document::array();
  for (auto s : enabled) doc["enabled"].push_back(std::string(to_string(s)));
  doc["sources"] = Document::object();
  for (const auto& [label, kind] : sources) doc["sources"][label] = std::string(to_string(kind));
  doc["orientation_timeout_s"] = orientation_timeout_s;
  return doc;
}

Eigen::Matrix3d FusionConfig::R(MeasurementKind kind) const {
  auto it = r_overrides.find(kind);
  return it != r_overrides.end() ? it->second : default_R(kind);
}

// --- trajectory io ----------------------------------------------------------------

Document TrajectoryPoint::to_document() const {
  Document doc = Document::object();
  doc["t"] = t;
  doc["north"] = position.x();
  doc["east"] = position.y();
  doc["down"] = position.z();
  doc["p_diag"] = Document::array();
  for (int i = 0; i < 6; ++i) doc["p_diag"].push_back(p_diag(i));
  return doc;
}

TrajectoryPoint TrajectoryPoint::from_document(const Document& doc) {
  try {
    TrajectoryPoint p;
    p.t = doc.at("t").get<TimeNs>();
    p.position = {doc.at("north").get<double>(), doc.at("east").get<double>(), doc.at("down").get<double>()};
    if (doc.contains("p_diag")) {
      const auto& diag = doc.at("p_diag");
      if (diag.size() != 6) throw Error(ErrorCode::MalformedDocument, "p_diag must have 6 entries");
      for (int i = 0; i < 6; ++i) p.p_diag(i) = diag.at(static_cast<std::size_t>(i)).get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("trajectory point: ") + e.what());
  }
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  for (const auto& p : trajectory) out << p.to_document().dump() << '\n';
}

std::string trajectory_to_ndjson(const Trajectory& trajectory) {
  std::ostringstream out;
  write_trajectory(out, trajectory);
  return out.str();
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory out;
  for (const auto& doc : read_ndjson(in)) out.push_back(TrajectoryPoint::from_document(doc));
  return out;
}

Trajectory read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_trajectory(in);
}

Document FusionCounters::to_document() const {
  return Document{{"processed", processed},
                  {"predictions", predictions},
                  {"updates", updates},
                  {"dropped_late", dropped_late},
                  {"ignored", ignored}};
}

// --- engine -----------------------------------------------------------------------

FusionEngine::FusionEngine(FusionConfig config) : config_(std::move(config)), origin_(config_.origin) {
  if (origin_) origin_->check();
}

std::optional<TrajectoryPoint> FusionEngine::latest() const {
  if (!state_) return std::nullopt;
  return TrajectoryPoint{state_->t, state_->x.head<3>(), state_->P.diagonal()};
}

void FusionEngine::observe() const {
  if (observer_ && state_) observer_(*state_);
}

Eigen::Vector3d FusionEngine::current_a_ned() const {
  const Eigen::Matrix3d C = quat_to_rotation(q_);
  const Eigen::Vector3d g = gravity_body_ ? Eigen::Vector3d(C * *gravity_body_)
                                          : Eigen::Vector3d(0.0, 0.0, kStandardGravity);
  return C * accel_body_ - g;
}

void FusionEngine::step_predict(const Eigen::Vector3d& a_ned, TimeNs t) {
  state_ = predict_ned(*state_, a_ned, t, config_.sigma_a);
  ++counters_.predictions;
  observe();
}

void FusionEngine::propagate_to(TimeNs t) {
  if (t <= state_->t) return;
  if (!have_accel_ || !config_.is_enabled(FusionSensor::IMU)) {
    // Without inertial input the state is held.
    state_->t = t;
    return;
  }
  constexpr TimeNs kStep = static_cast<TimeNs>(kMaxPredictStepSeconds * 1e9);
  Eigen::Vector3d a_ned = current_a_ned();
  while (state_->t < t) {
    const TimeNs next = std::min(t, state_->t + kStep);
    step_predict(a_ned, next);
    a_ned.setZero();
  }
}

void FusionEngine::apply_update(const MeasurementPacket& packet) {
  state_ = update(*state_, packet, origin_.value_or(FrameOrigin{}));
  ++counters_.updates;
  observe();
}

std::optional<MeasurementPacket> FusionEngine::to_packet(const std::string& source, const StandardizedRecord& record) {
  MeasurementKind kind = MeasurementKind::UWB;
  if (auto it = config_.sources.find(source); it != config_.sources.end()) {
    kind = it->second;
  } else if (record.kind() == SensorKind::Location) {
    kind = MeasurementKind::GNSS;
  } else if (record.kind() == SensorKind::Bluetooth) {
    kind = MeasurementKind::Bluetooth;
  }
  if (!config_.is_enabled(sensor_of(kind))) return std::nullopt;

  MeasurementPacket packet;
  packet.kind = kind;
  packet.R = config_.R(kind);
  packet.t = record.time();
  if (const auto* loc = std::get_if<LocationReading>(&record.payload())) {
    if (!origin_) origin_ = FrameOrigin{loc->latitude, loc->longitude, loc->altitude};
    if (kind == MeasurementKind::GNSS) {
      packet.z = {loc->latitude, loc->longitude, loc->altitude};
    } else {
      packet.z = geodetic_to_ned(loc->latitude, loc->longitude, loc->altitude, *origin_);
    }
  } else if (const auto* pos = std::get_if<PositionReading>(&record.payload())) {
    if (kind == MeasurementKind::GNSS) {
      throw Error(ErrorCode::InvalidConfig, "source '" + source + "' is mapped to GNSS but carries local positions");
    }
    packet.z = {pos->position[0], pos->position[1], pos->position[2]};
  } else {
    return std::nullopt;
  }
  return packet;
}

std::optional<TrajectoryPoint> FusionEngine::process(const std::string& source, const StandardizedRecord& record) {
  ++counters_.processed;
  const TimeNs t = record.time();
  if (state_ && t < state_->t) {
    ++counters_.dropped_late;
    return std::nullopt;
  }

  switch (record.kind()) {
    case SensorKind::Accelerometer: {
      if (!config_.is_enabled(FusionSensor::IMU)) {
        ++counters_.ignored;
        break;
      }
      const auto& a = std::get<AxisReading>(record.payload());
      accel_body_ = {a.x, a.y, a.z};
      have_accel_ = true;
      if (state_) propagate_to(t);
      break;
    }
    case SensorKind::Orientation: {
      const auto& o = std::get<OrientationReading>(record.payload());
      const QuatXyzw q(o.qx, o.qy, o.qz, o.qw);
      (void)quat_to_rotation(q);
      q_ = q.normalized();
      last_orientation_t_ = t;
      break;
    }
    case SensorKind::Gyroscope: {
      const auto& w = std::get<AxisReading>(record.payload());
      omega_ = {w.x, w.y, w.z};
      const bool orientation_stale =
          !last_orientation_t_ || static_cast<double>(t - *last_orientation_t_) * 1e-9 > config_.orientation_timeout_s;
      if (last_gyro_t_ && orientation_stale && t > *last_gyro_t_) {
        q_ = integrate_gyro(q_, omega_, static_cast<double>(t - *last_gyro_t_) * 1e-9);
      }
      last_gyro_t_ = t;
      break;
    }
    case SensorKind::Gravity: {
      const auto& g = std::get<AxisReading>(record.payload());
      gravity_body_ = Eigen::Vector3d(g.x, g.y, g.z);
      break;
    }
    case SensorKind::Magnetometer: {
      const auto& m = std::get<AxisReading>(record.payload());
      mag_ = {m.x, m.y, m.z};
      break;
    }
    case SensorKind::UWB:
    case SensorKind::Bluetooth:
    case SensorKind::Location: {
      const auto packet = to_packet(source, record);
      if (!packet) {
        ++counters_.ignored;
        break;
      }
      if (!state_) {
        EkfState init;
        const Eigen::Vector3d z = packet->kind == MeasurementKind::GNSS
                                      ? geodetic_to_ned(packet->z.x(), packet->z.y(), packet->z.z(), *origin_)
                                      : packet->z;
        init.x.head<3>() = z;
        init.P.topLeftCorner<3, 3>() = packet->R;
        init.P.bottomRightCorner<3, 3>() = 10.0 * Eigen::Matrix3d::Identity();
        init.t = t;
        state_ = init;
        observe();
      } else {
        propagate_to(t);
        apply_update(*packet);
      }
      break;
    }
    default:
      ++counters_.ignored;
      break;
  }
  return latest();
}

// --- batch ------------------------------------------------------------------------

Trajectory run_filter(const std::vector<LabeledStream>& streams, const FusionConfig& config, FusionCounters* counters) {
  struct Item {
    TimeNs t;
    std::size_t stream;
    std::size_t index;
  };
  std::vector<Item> merged;
  bool has_position = false;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const auto& records = streams[s].dataset.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
      merged.push_back({records[i].time(), s, i});
      if (!is_position_kind(records[i].kind())) continue;
      MeasurementKind kind = records[i].kind() == SensorKind::Location    ? MeasurementKind::GNSS
                             : records[i].kind() == SensorKind::Bluetooth ? MeasurementKind::Bluetooth
                                                                          : MeasurementKind::UWB;
      if (auto it = config.sources.find(streams[s].label); it != config.sources.end()) kind = it->second;
      if (config.is_enabled(sensor_of(kind))) has_position = true;
    }
  }
  if (merged.empty()) throw Error(ErrorCode::EmptyStream, "no records to fuse");
  if (!has_position) throw Error(ErrorCode::NoPositionSensor, "no enabled position-bearing records");
  std::stable_sort(merged.begin(), merged.end(), [](const Item& a, const Item& b) { return a.t < b.t; });

  FusionEngine engine(config);
  Trajectory out;
  out.reserve(merged.size());
  for (const auto& item : merged) {
    if (auto point = engine.process(streams[item.stream].label, streams[item.stream].dataset.records()[item.index])) {
      out.push_back(*point);
    }
  }
  if (counters) *counters = engine.counters();
  return out;
}

Trajectory run_filter(const StandardizedDataset& dataset, const FusionConfig& config, FusionCounters* counters) {
  return run_filter(std::vector<LabeledStream>{{"", dataset}}, config, counters);
}

}  // namespace seampos
