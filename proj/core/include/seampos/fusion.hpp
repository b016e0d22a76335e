#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seampos/document.hpp"
#include "seampos/ekf.hpp"
#include "seampos/schema.hpp"

namespace seampos {

/// Sensor groups that can be switched on or off.
enum class FusionSensor { IMU, GNSS, UWB, VPS, Bluetooth };

std::string_view to_string(FusionSensor sensor) noexcept;

struct FusionConfig {
  /// Local frame anchor; when absent the first GNSS fix becomes the origin.
  std::optional<FrameOrigin> origin;
  double sigma_a = kDefaultSigmaA;
  std::map<MeasurementKind, Eigen::Matrix3d> r_overrides;
  std::set<FusionSensor> enabled{FusionSensor::IMU, FusionSensor::GNSS, FusionSensor::UWB, FusionSensor::VPS,
                                 FusionSensor::Bluetooth};
  /// Source label -> measurement kind for its position records. Position
  /// records from unlisted sources use their record kind (Location = GNSS).
  std::map<std::string, MeasurementKind> sources;
  /// Gyroscope integration takes over once orientation records are older than this.
  double orientation_timeout_s = 1.0;

  /// Keys: origin {lat, lon, alt}, sigma_a, R {GNSS|UWB|VPS|Bluetooth: number | [3] | [[3]x3]},
  /// enabled [names], sources {label: kind}, orientation_timeout_s.
  static FusionConfig from_document(const Document& doc);
  Document to_document() const;

  Eigen::Matrix3d R(MeasurementKind kind) const;
  bool is_enabled(FusionSensor sensor) const { return enabled.contains(sensor); }
};

struct TrajectoryPoint {
  TimeNs t = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // north, east, down
  Vector6d p_diag = Vector6d::Zero();

  Document to_document() const;
  static TrajectoryPoint from_document(const Document& doc);
};

using Trajectory = std::vector<TrajectoryPoint>;

std::string trajectory_to_ndjson(const Trajectory& trajectory);
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory_file(const std::string& path);

struct FusionCounters {
  std::size_t processed = 0;
  std::size_t predictions = 0;
  std::size_t updates = 0;
  std::size_t dropped_late = 0;
  std::size_t ignored = 0;  // disabled sensors and records before initialization

  Document to_document() const;
};

/// Sequential filter driver. Records must arrive in time order; older ones
/// are dropped and counted.
class FusionEngine {
 public:
  using StepObserver = std::function<void(const EkfState&)>;

  explicit FusionEngine(FusionConfig config);

  /// Feeds one record. Returns the estimate after it, or nullopt while the
  /// filter is uninitialized or the record was dropped.
  std::optional<TrajectoryPoint> process(const std::string& source, const StandardizedRecord& record);

  const std::optional<EkfState>& state() const noexcept { return state_; }
  std::optional<TrajectoryPoint> latest() const;
  const FusionCounters& counters() const noexcept { return counters_; }
  const std::optional<FrameOrigin>& origin() const noexcept { return origin_; }

  /// Called after every predict and update (test builds check P here).
  void set_step_observer(StepObserver observer) { observer_ = std::move(observer); }

 private:
  void propagate_to(TimeNs t);
  void step_predict(const Eigen::Vector3d& a_ned, TimeNs t);
  void apply_update(const MeasurementPacket& packet);
  std::optional<MeasurementPacket> to_packet(const std::string& source, const StandardizedRecord& record);
  Eigen::Vector3d current_a_ned() const;
  void observe() const;

  FusionConfig config_;
  std::optional<FrameOrigin> origin_;
  std::optional<EkfState> state_;
  FusionCounters counters_;
  StepObserver observer_;

  bool have_accel_ = false;
  Eigen::Vector3d accel_body_ = Eigen::Vector3d::Zero();
  std::optional<Eigen::Vector3d> gravity_body_;
  QuatXyzw q_{0.0, 0.0, 0.0, 1.0};
  std::optional<TimeNs> last_orientation_t_;
  std::optional<TimeNs> last_gyro_t_;
  Eigen::Vector3d omega_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d mag_ = Eigen::Vector3d::Zero();
};

/// One labelled input stream (the label selects the measurement role).
struct LabeledStream {
  std::string label;
  StandardizedDataset dataset;
};

/// Merges the streams by time (ties keep stream order) and runs the filter.
/// Throws EmptyStream without records and NoPositionSensor when no enabled
/// position-bearing record exists.
Trajectory run_filter(const std::vector<LabeledStream>& streams, const FusionConfig& config,
                      FusionCounters* counters = nullptr);
Trajectory run_filter(const StandardizedDataset& dataset, const FusionConfig& config,
                      FusionCounters* counters = nullptr);

}  // namespace seampos
