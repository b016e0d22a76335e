#include "seampos/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seampos/error.hpp"

namespace seampos {

namespace {

double segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

std::string format_double(double v) {
  // Shortest round-trip representation, as used for documents.
  return nlohmann::json(v).dump();
}

}  // namespace

GroundTruthPath::GroundTruthPath(std::vector<Eigen::Vector3d> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw Error(ErrorCode::InvalidPath, "a path needs at least two vertices");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertices_[i].allFinite()) throw Error(ErrorCode::InvalidPath, "vertex " + std::to_string(i) + " is not finite");
    if (i > 0) {
      const double d = (vertices_[i] - vertices_[i - 1]).norm();
      if (d == 0.0) throw Error(ErrorCode::InvalidPath, "vertices " + std::to_string(i - 1) + " and " +
                                                            std::to_string(i) + " coincide");
      length_ += d;
    }
  }
}

GroundTruthPath GroundTruthPath::from_document(const Document& doc) {
  std::vector<Eigen::Vector3d> vertices;
  try {
    for (const auto& v : doc.at("vertices")) {
      if (!v.is_array() || v.size() != 3) throw Error(ErrorCode::InvalidPath, "each vertex must be [n, e, d]");
      vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidPath, e.what());
  }
  return GroundTruthPath(std::move(vertices));
}

GroundTruthPath GroundTruthPath::from_file(const std::string& path) { return from_document(read_document_file(path)); }

Document GroundTruthPath::to_document() const {
  Document doc = {{"vertices", Document::array()}};
  for (const auto& v : vertices_) doc["vertices"].push_back({v.x(), v.y(), v.z()});
  return doc;
}

Document ErrorSummary::to_document() const {
  return Document{{"mean", mean}, {"std", std}, {"rmse", rmse}, {"median", median}, {"max", max}, {"n", n}};
}

double point_to_path_distance(const Eigen::Vector3d& p, const GroundTruthPath& path, bool planar) {
  const auto flatten = [planar](const Eigen::Vector3d& v) {
    return planar ? Eigen::Vector3d(v.x(), v.y(), 0.0) : v;
  };
  const Eigen::Vector3d q = flatten(p);
  const auto& v = path.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) best = std::min(best, segment_distance(q, flatten(v[i - 1]), flatten(v[i])));
  return best;
}

ErrorSummary summarize(std::span<const double> errors) {
  if (errors.empty()) throw Error(ErrorCode::EmptySeries, "cannot summarize an empty series");
  ErrorSummary s;
  s.n = errors.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
  double sq = 0.0;
  double dev = 0.0;
  for (double e : errors) {
    sq += e * e;
    dev += (e - s.mean) * (e - s.mean);
  }
  s.rmse = std::sqrt(sq / n);
  s.std = std::sqrt(dev / n);
  std::vector<double> sorted(errors.begin(), errors.end());
  const std::size_t mid = (s.n - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  s.median = sorted[mid];
  s.max = *std::max_element(errors.begin(), errors.end());
  return s;
}

Document EvaluationResult::report(const std::string& series_csv_path) const {
  Document doc = Document::object();
  doc["label"] = label;
  doc["summary"] = summary.to_document();
  doc["series_csv_path"] = series_csv_path;
  return doc;
}

std::string EvaluationResult::series_csv() const {
  std::ostringstream out;
  out << "t,error\n";
  for (const auto& s : series) out << s.t << ',' << format_double(s.error) << '\n';
  return out.str();
}

EvaluationResult evaluate_run(const Trajectory& trajectory, const GroundTruthPath& path, const std::string& label,
                              bool planar) {
  if (trajectory.empty()) throw Error(ErrorCode::EmptySeries, "trajectory is empty");
  EvaluationResult result;
  result.label = label;
  std::vector<double> errors;
  errors.reserve(trajectory.size());
  for (const auto& point : trajectory) {
    const double d = point_to_path_distance(point.position, path, planar);
    result.series.push_back({point.t, d});
    errors.push_back(d);
  }
  result.summary = summarize(errors);
  return result;
}

}  // namespace seampos
