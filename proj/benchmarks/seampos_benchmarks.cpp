#include <random>

#include <benchmark/benchmark.h>

#include "seampos/ekf.hpp"
#include "seampos/fusion.hpp"
#include "seampos/jsonpath.hpp"
#include "seampos/trgm.hpp"
#include "seampos/validation.hpp"

using namespace seampos;

namespace {

constexpr TimeNs kT0 = 1705307400000000000LL;

const Document& sensor_document() {
  static const Document doc = Document::parse(R"({
    "sensor_data": {
      "Accelerometer": {"timestamp": 1705307400, "x": 0.12, "y": -0.03, "z": 9.79},
      "Gyroscope": {"timestamp": 1705307400, "x": 0.001, "y": 0.002, "z": -0.004}
    }
  })");
  return doc;
}

Document records(int n) {
  Document out = Document::array();
  for (int i = 0; i < n; ++i) {
    out.push_back({{"name", "Accelerometer"},
                   {"time", kT0 + i * 10'000'000LL},
                   {"values", {{"x", 0.1 * i}, {"y", 0.2}, {"z", 9.8}}}});
  }
  return out;
}

void BM_JsonPathGet(benchmark::State& state) {
  const auto path = jsonpath::parse_path("$.sensor_data.Accelerometer.timestamp");
  for (auto _ : state) benchmark::DoNotOptimize(jsonpath::get(sensor_document(), path));
}
BENCHMARK(BM_JsonPathGet);

void BM_JsonPathFilterSet(benchmark::State& state) {
  const auto path = jsonpath::parse_path("$[?(@.name == 'Accelerometer')].values.x");
  const Document doc = records(16);
  for (auto _ : state) benchmark::DoNotOptimize(jsonpath::set(doc, path, 1.5));
}
BENCHMARK(BM_JsonPathFilterSet);

void BM_ValidateDataset(benchmark::State& state) {
  const Document doc = records(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(validate_dataset(doc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValidateDataset)->Arg(1)->Arg(100);

void BM_ApplyScript(benchmark::State& state) {
  const auto output = StandardizedDataset::from_documents(Document::parse(R"([
    {"name": "Accelerometer", "time": 1705307400000000000, "values": {"x": 0.12, "y": -0.03, "z": 9.79}},
    {"name": "Gyroscope", "time": 1705307400000000000, "values": {"x": 0.001, "y": 0.002, "z": -0.004}}
  ])"));
  const auto script = derive_transformation_script(sensor_document(), output);
  for (auto _ : state) benchmark::DoNotOptimize(apply_script(script, sensor_document()));
}
BENCHMARK(BM_ApplyScript);

void BM_EkfPredict(benchmark::State& state) {
  EkfState s;
  s.P = Matrix6d::Identity();
  s.t = kT0;
  const Eigen::Vector3d a(0.1, 0.0, 0.0);
  for (auto _ : state) {
    s = predict_ned(s, a, s.t + 10'000'000, kDefaultSigmaA);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_EkfPredict);

void BM_EkfUpdate(benchmark::State& state) {
  const FrameOrigin origin{47.3769, 8.5417, 408.0};
  EkfState s;
  s.P = Matrix6d::Identity();
  s.t = kT0;
  const MeasurementPacket m{MeasurementKind::UWB, Eigen::Vector3d(1, 2, 0), default_R(MeasurementKind::UWB), kT0};
  for (auto _ : state) benchmark::DoNotOptimize(update(s, m, origin));
}
BENCHMARK(BM_EkfUpdate);

void BM_RunFilter(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<StandardizedRecord> recs;
  for (int k = 0; k < 6000; ++k) {
    const TimeNs t = kT0 + k * 10'000'000LL;
    recs.push_back(StandardizedRecord::make(SensorKind::Accelerometer, t,
                                            AxisReading{0.05 * n(rng), 0.05 * n(rng), 9.80665 + 0.05 * n(rng)}));
    if (k % 5 == 0) {
      recs.push_back(StandardizedRecord::make(SensorKind::UWB, t + 1,
                                              PositionReading{{0.01 * k + n(rng), n(rng), 0.0}}));
    }
  }
  const StandardizedDataset dataset(recs);
  FusionConfig cfg;
  cfg.origin = FrameOrigin{47.3769, 8.5417, 408.0};
  for (auto _ : state) benchmark::DoNotOptimize(run_filter(dataset, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(recs.size()));
}
BENCHMARK(BM_RunFilter)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
