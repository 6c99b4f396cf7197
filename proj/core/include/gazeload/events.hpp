#pragma once

#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

struct IvtConfig {
  double velocity_threshold_deg_s = 30.0;  // below => fixation, else saccade
  double blink_min_ms = 70.0;              // invalid-run duration window that
  double blink_max_ms = 500.0;             // counts as a blink; outside => gap
  double min_fixation_ms = 0.0;            // >0 merges shorter fixations into
                                           // an adjacent saccade
};

struct DetectResult {
  std::vector<GazeEvent> events;  // ordered by start, same-kind non-overlapping
  int zero_dt_pairs = 0;          // skipped degenerate pairs (data-quality)
};

// Velocity-threshold event detection.
//
// Each adjacent sample pair is assigned to exactly one event: pairs with both
// endpoints valid are classified fixation/saccade by angular speed
// sqrt(dyaw^2 + dpitch^2)/dt; maximal same-class pair runs collapse into one
// event. Pairs touching an invalid sample form invalid episodes spanning from
// the last valid sample before the run to the first valid sample after it
// (clamped at recording edges, with one nominal period appended when the
// recording ends invalid); an episode whose duration falls inside
// [blink_min_ms, blink_max_ms] is a blink, anything else a gap. Because every
// pair lands in exactly one event, per-second event times partition the
// recording.
DetectResult detect_events(const GazeRecording& rec, const IvtConfig& cfg = {});

}  // namespace gazeload
