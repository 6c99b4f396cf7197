#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeload/labels.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

// Synthetic cohort generator. Users are drawn from three behavioral
// archetypes (High-Reactor, Low-Reactor, Restless) that differ in pupil
// baseline/variability, blink rate, and gaze dispersion. Each user performs
// all three tasks; difficulty follows fixed level blocks (60 s for reading
// and gaming, 30 s for audio) cycling Low -> Moderate -> High -> Moderate,
// and each level shifts the per-second oculomotor targets in a task-specific
// direction:
//   reading: higher load -> fewer/shorter saccades, longer fixations,
//            fewer blinks, larger pupil
//   gaming:  higher load -> more but smaller saccades, fewer blinks,
//            larger pupil
//   audio:   higher load -> larger pupil, slightly fewer blinks
// The `noise` knob scales every stochastic perturbation; at 0 the generator
// is driven purely by the deterministic targets.
struct SynthConfig {
  int users = 30;
  int seconds_per_task = 300;
  double noise = 0.25;
  std::uint64_t seed = 7;
  double rate_hz = 90.0;
  std::string user_prefix = "u";
};

struct SynthUser {
  std::string user_id;
  std::string archetype;
};

struct SynthDataset {
  std::vector<SynthUser> users;
  std::vector<GazeRecording> recordings;  // user-major, tasks in enum order
  std::vector<LabeledSecond> labels;      // per-second ground truth
  std::vector<SpanRow> spans;             // task activity spans
};

SynthDataset synth_generate(const SynthConfig& cfg);

// CSV format: user,archetype
std::string users_to_csv(const std::vector<SynthUser>& users);
std::vector<SynthUser> users_from_csv_text(const std::string& text);

}  // namespace gazeload
