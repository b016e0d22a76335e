#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seampos/document.hpp"
#include "seampos/fusion.hpp"

namespace seampos {

/// Ground-truth polyline in the local NED frame.
class GroundTruthPath {
 public:
  /// Throws Error(InvalidPath) for fewer than two vertices or repeated
  /// consecutive vertices.
  explicit GroundTruthPath(std::vector<Eigen::Vector3d> vertices);

  /// {"vertices": [[n, e, d], ...]}
  static GroundTruthPath from_document(const Document& doc);
  static GroundTruthPath from_file(const std::string& path);
  Document to_document() const;

  const std::vector<Eigen::Vector3d>& vertices() const noexcept { return vertices_; }
  double length() const noexcept { return length_; }

 private:
  std::vector<Eigen::Vector3d> vertices_;
  double length_ = 0.0;
};

struct ErrorSummary {
  double mean = 0.0;
  double std = 0.0;  // population
  double rmse = 0.0;
  double median = 0.0;  // lower middle for even n
  double max = 0.0;
  std::size_t n = 0;

  Document to_document() const;
};

/// Shortest distance from `p` to any segment. `planar` ignores the down axis.
double point_to_path_distance(const Eigen::Vector3d& p, const GroundTruthPath& path, bool planar = false);

/// Throws Error(EmptySeries) for an empty series.
ErrorSummary summarize(std::span<const double> errors);

struct ErrorSample {
  TimeNs t = 0;
  double error = 0.0;
};

struct EvaluationResult {
  std::string label;
  ErrorSummary summary;
  std::vector<ErrorSample> series;

  /// {label, summary, series_csv_path}
  Document report(const std::string& series_csv_path) const;
  /// "t,error" header then one row per sample.
  std::string series_csv() const;
};

EvaluationResult evaluate_run(const Trajectory& trajectory, const GroundTruthPath& path, const std::string& label,
                              bool planar = false);

}  // namespace seampos
