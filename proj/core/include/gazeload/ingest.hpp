#pragma once

#include <string>

#include "gazeload/types.hpp"

namespace gazeload {

// Column names in a raw gaze CSV. Defaults match the canonical header:
//   timestamp_ns,yaw_deg,pitch_deg,pupil,valid
struct IngestSchema {
  std::string timestamp = "timestamp_ns";
  std::string yaw = "yaw_deg";
  std::string pitch = "pitch_deg";
  std::string pupil = "pupil";
  std::string valid = "valid";
};

// Loads a raw gaze CSV. Rules:
//  - timestamps must be strictly increasing; the first offending line is
//    reported otherwise
//  - rows with non-finite yaw/pitch/pupil, or pupil <= 0, are kept but marked
//    invalid (mark-then-exclude; event detection decides blink vs gap)
//  - the valid column accepts only 0 or 1
// user_id/task are written by the caller.
GazeRecording ingest_recording(const std::string& path,
                               const IngestSchema& schema = {},
                               double nominal_rate_hz = 90.0);

// Serializes a recording back to the canonical CSV format.
std::string recording_to_csv(const GazeRecording& rec);

}  // namespace gazeload
