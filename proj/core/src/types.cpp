#include "gazeload/types.hpp"

#include <cmath>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

const char* to_string(TaskId task) {
  switch (task) {
    case TaskId::Reading: return "reading";
    case TaskId::Gaming: return "gaming";
    case TaskId::Audio: return "audio";
  }
  return "?";
}

TaskId parse_task(const std::string& token) {
  std::string t = to_lower(trim(token));
  if (t == "reading") return TaskId::Reading;
  if (t == "gaming") return TaskId::Gaming;
  if (t == "audio") return TaskId::Audio;
  throw InputError("unknown task id '" + token +
                   "' (known tasks: reading, gaming, audio)");
}

const char* to_string(Level level) {
  switch (level) {
    case Level::Low: return "Low";
    case Level::Moderate: return "Moderate";
    case Level::High: return "High";
  }
  return "?";
}

Level parse_level(const std::string& token) {
  std::string t = to_lower(trim(token));
  if (t == "low") return Level::Low;
  if (t == "moderate") return Level::Moderate;
  if (t == "high") return Level::High;
  throw InputError("unknown load level '" + token +
                   "' (expected Low, Moderate or High)");
}

int GazeRecording::duration_seconds() const {
  if (samples.empty()) return 0;
  return int(std::ceil(double(samples.back().timestamp_ns) * 1e-9));
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "fix_dur",   "sac_dur",   "sac_amp",        "fix_ratio",
      "sac_ratio", "blink_count", "avg_pupil_size"};
  return names;
}

int feature_index(const std::string& name) {
  const auto& names = feature_names();
  for (int i = 0; i < kFeatureCount; ++i) {
    if (names[size_t(i)] == name) return i;
  }
  throw InputError("unknown feature '" + name + "'");
}

}  // namespace gazeload
