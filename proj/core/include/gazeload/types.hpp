#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gazeload {

// ---------------------------------------------------------------------------
// Tasks and load levels

enum class TaskId { Reading, Gaming, Audio };

const char* to_string(TaskId task);
TaskId parse_task(const std::string& token);  // throws InputError listing known tasks

enum class Level : int { Low = 0, Moderate = 1, High = 2 };

const char* to_string(Level level);
Level parse_level(const std::string& token);  // throws InputError

// ---------------------------------------------------------------------------
// Raw signal

struct GazeSample {
  std::int64_t timestamp_ns = 0;
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double pupil = 0.0;   // device units; meaningful only when valid
  bool valid = false;
};

struct GazeRecording {
  std::string user_id;
  TaskId task = TaskId::Reading;
  std::vector<GazeSample> samples;  // strictly increasing timestamps
  double nominal_rate_hz = 90.0;

  // Number of whole seconds covered: ceil(last timestamp / 1e9), 0 if empty.
  int duration_seconds() const;
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind { Fixation, Saccade, Blink, Gap };

struct GazeEvent {
  EventKind kind = EventKind::Fixation;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;       // end > start
  double amplitude_deg = 0.0;    // saccades only: start-point to end-point distance

  double duration_seconds() const { return double(end_ns - start_ns) * 1e-9; }
};

// ---------------------------------------------------------------------------
// Per-second features

inline constexpr int kFeatureCount = 7;

enum Feature : int {
  kFixDur = 0,
  kSacDur = 1,
  kSacAmp = 2,
  kFixRatio = 3,
  kSacRatio = 4,
  kBlinkCount = 5,
  kAvgPupilSize = 6,
};

// Canonical short names, in the fixed order used everywhere (tables,
// descriptors, rules, prompts, serialized files).
const std::array<std::string, kFeatureCount>& feature_names();
int feature_index(const std::string& name);  // throws InputError on unknown name

// Quality flags for degenerate seconds.
enum FeatureFlag : unsigned {
  kFlagNoFixations = 1u << 0,
  kFlagNoSaccades = 1u << 1,
  kFlagNoPupil = 1u << 2,
};

struct FeatureVector {
  int second = 0;                              // window [second, second+1) s
  std::array<double, kFeatureCount> values{};  // fixed feature order
  unsigned flags = 0;
};

// A per-second feature sequence for one (user, task) recording. Values are
// raw after extraction and z-scores after normalize().
struct FeatureSeries {
  std::string user_id;
  TaskId task = TaskId::Reading;
  std::vector<FeatureVector> seconds;  // ascending, usually 0..duration-1
  bool zscored = false;
};

struct PopulationStats {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};  // population convention
  std::string source;                          // split tag, e.g. "train"
  std::int64_t count = 0;
};

// T-second analysis window, K=7 rows by T columns of z-scores.
// Column t holds second end_second - (T-1) + t.
struct FeatureTable {
  std::string user_id;
  TaskId task = TaskId::Reading;
  int end_second = 0;
  int window = 0;                     // T
  std::vector<double> cells;          // size K*T, row-major: cells[k*T + t]
  std::vector<std::uint8_t> column_missing;  // size T; 1 = zero-filled column

  double cell(int k, int t) const { return cells[size_t(k) * window + t]; }
  double& cell(int k, int t) { return cells[size_t(k) * window + t]; }
};

}  // namespace gazeload
