// Throughput/latency benchmarks for the hot paths: event detection and
// featurization of raw gaze, descriptor computation, retrieval over a large
// database, prompt assembly, and the mock predictor.

#include <benchmark/benchmark.h>

#include <vector>

#include "gazeload/events.hpp"
#include "gazeload/features.hpp"
#include "gazeload/inference.hpp"
#include "gazeload/prompt.hpp"
#include "gazeload/retrieval.hpp"
#include "gazeload/rng.hpp"
#include "gazeload/rules.hpp"
#include "gazeload/synth.hpp"

namespace {

using namespace gazeload;

// One hour of one synthetic user's reading data at 90 Hz: 324,000 samples.
const GazeRecording& hour_recording() {
  static const GazeRecording rec = [] {
    SynthConfig cfg;
    cfg.users = 1;
    cfg.seconds_per_task = 3600;
    cfg.noise = 0.25;
    cfg.seed = 7;
    const SynthDataset data = synth_generate(cfg);
    for (const GazeRecording& r : data.recordings) {
      if (r.task == TaskId::Reading) return r;
    }
    return data.recordings.front();
  }();
  return rec;
}

FeatureTable random_table(Rng& rng, int window) {
  FeatureTable t;
  t.user_id = "bench";
  t.task = TaskId::Reading;
  t.end_second = window - 1;
  t.window = window;
  t.cells.resize(std::size_t(kFeatureCount) * window);
  t.column_missing.assign(std::size_t(window), 0);
  for (double& c : t.cells) c = rng.normal();
  return t;
}

RetrievalDb large_db(int n_records) {
  Rng rng(11);
  std::vector<RetrievalRecord> records;
  records.reserve(std::size_t(n_records));
  for (int i = 0; i < n_records; ++i) {
    RetrievalRecord r;
    r.user_id = "u" + std::to_string(i % 97);
    r.task = TaskId::Reading;
    r.window_id = i;
    r.profile = i % 3 == 0 ? "High-Reactor" : (i % 3 == 1 ? "Low-Reactor" : "Restless");
    r.label = Level(i % 3);
    r.table = random_table(rng, 5);
    r.descriptor = descriptor(r.table);
    records.push_back(std::move(r));
  }
  return RetrievalDb::build(std::move(records));
}

void BM_DetectEvents(benchmark::State& state) {
  const GazeRecording& rec = hour_recording();
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_events(rec));
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(rec.samples.size()));
}
BENCHMARK(BM_DetectEvents)->Unit(benchmark::kMillisecond);

void BM_FeaturizeHour(benchmark::State& state) {
  const GazeRecording& rec = hour_recording();
  for (auto _ : state) {
    benchmark::DoNotOptimize(featurize_recording(rec));
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(rec.samples.size()));
}
BENCHMARK(BM_FeaturizeHour)->Unit(benchmark::kMillisecond);

void BM_Descriptor(benchmark::State& state) {
  Rng rng(3);
  const FeatureTable table = random_table(rng, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(descriptor(table));
  }
}
BENCHMARK(BM_Descriptor);

void BM_RetrieveTop3(benchmark::State& state) {
  static const RetrievalDb db = large_db(50000);
  Rng rng(5);
  std::vector<FeatureTable> queries;
  for (int i = 0; i < 64; ++i) queries.push_back(random_table(rng, 5));
  RetrieveOptions opt;
  opt.k = 3;
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieve(db, queries[q], "", opt));
    q = (q + 1) % queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RetrieveTop3)->Unit(benchmark::kMicrosecond);

void BM_AssemblePrompts(benchmark::State& state) {
  Rng rng(9);
  const FeatureTable table = random_table(rng, 5);
  const FeatureTable ref = random_table(rng, 5);
  PromptContext pc;
  pc.task = TaskId::Reading;
  pc.window = 5;
  pc.table = &table;
  pc.refs.push_back({&ref, Level::High});
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_prompts(pc));
  }
}
BENCHMARK(BM_AssemblePrompts)->Unit(benchmark::kMicrosecond);

void BM_MockPredict(benchmark::State& state) {
  Rng rng(13);
  const FeatureTable table = random_table(rng, 5);
  GuidanceRule rule;
  rule.task = TaskId::Reading;
  rule.entries = {{kSacRatio, 1, '+', -0.5, 0.5},
                  {kFixDur, 2, '-', -0.5, 0.5},
                  {kAvgPupilSize, 3, '+', -0.5, 0.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mock_predict(rule, nullptr, {}, table));
  }
}
BENCHMARK(BM_MockPredict)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
