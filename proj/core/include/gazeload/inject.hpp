#pragma once

#include <cstdint>
#include <vector>

#include "gazeload/labels.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

struct NoiseResult {
  std::vector<LabeledSecond> labels;
  std::size_t flipped = 0;
};

// Flips exactly round(rate * n) labels, chosen by a seeded shuffle, to an
// adjacent level: Low -> Moderate, High -> Moderate, Moderate -> Low or High
// with equal probability. rate must lie in [0, 1].
NoiseResult inject_label_noise(const std::vector<LabeledSecond>& labels, double rate,
                               std::uint64_t seed);

struct MissingResult {
  GazeRecording recording;
  std::size_t dropped = 0;
};

// Drops round(ratio * n_valid) of the valid samples (seeded choice without
// replacement) and repairs them by linear interpolation of yaw/pitch/pupil
// between the nearest surviving valid samples (nearest-value fill at the
// edges). Repaired samples are marked valid; originally invalid samples are
// left untouched.
MissingResult inject_missing(const GazeRecording& recording, double ratio,
                             std::uint64_t seed);

}  // namespace gazeload
