#include "gazeload/inject.hpp"

#include <algorithm>
#include <cmath>

#include "gazeload/error.hpp"
#include "gazeload/rng.hpp"

namespace gazeload {

namespace {

// First `take` elements of a seeded shuffle of 0..n-1.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t take, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(take);
  return idx;
}

}  // namespace

NoiseResult inject_label_noise(const std::vector<LabeledSecond>& labels, double rate,
                               std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InputError("noise rate must lie in [0, 1]");
  NoiseResult out;
  out.labels = labels;
  const std::size_t n_flip = static_cast<std::size_t>(
      std::llround(rate * static_cast<double>(labels.size())));
  Rng rng(seed);
  for (std::size_t i : sample_indices(labels.size(), n_flip, rng)) {
    Level& level = out.labels[i].level;
    switch (level) {
      case Level::Low:
        level = Level::Moderate;
        break;
      case Level::High:
        level = Level::Moderate;
        break;
      case Level::Moderate:
        level = rng.uniform() < 0.5 ? Level::Low : Level::High;
        break;
    }
    ++out.flipped;
  }
  return out;
}

MissingResult inject_missing(const GazeRecording& recording, double ratio,
                             std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InputError("missing ratio must lie in [0, 1]");
  MissingResult out;
  out.recording = recording;
  auto& samples = out.recording.samples;

  std::vector<std::size_t> valid_idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].valid) valid_idx.push_back(i);
  }
  const std::size_t n_drop = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(valid_idx.size())));
  if (n_drop == 0) return out;
  if (n_drop >= valid_idx.size()) {
    throw InputError("missing ratio would drop every valid sample of " +
                     recording.user_id);
  }

  Rng rng(seed);
  std::vector<std::size_t> drop_pos = sample_indices(valid_idx.size(), n_drop, rng);
  std::vector<bool> dropped(samples.size(), false);
  for (std::size_t p : drop_pos) dropped[valid_idx[p]] = true;

  // Anchors are valid samples that survived the drop.
  std::vector<std::size_t> anchors;
  for (std::size_t i : valid_idx) {
    if (!dropped[i]) anchors.push_back(i);
  }

  for (std::size_t i : valid_idx) {
    if (!dropped[i]) continue;
    const auto next = std::lower_bound(anchors.begin(), anchors.end(), i);
    GazeSample& s = samples[i];
    if (next == anchors.begin()) {
      const GazeSample& a = samples[anchors.front()];
      s.yaw_deg = a.yaw_deg;
      s.pitch_deg = a.pitch_deg;
      s.pupil = a.pupil;
    } else if (next == anchors.end()) {
      const GazeSample& a = samples[anchors.back()];
      s.yaw_deg = a.yaw_deg;
      s.pitch_deg = a.pitch_deg;
      s.pupil = a.pupil;
    } else {
      const GazeSample& hi = samples[*next];
      const GazeSample& lo = samples[*(next - 1)];
      const double span = static_cast<double>(hi.timestamp_ns - lo.timestamp_ns);
      const double f =
          span > 0.0 ? static_cast<double>(s.timestamp_ns - lo.timestamp_ns) / span : 0.0;
      s.yaw_deg = lo.yaw_deg + f * (hi.yaw_deg - lo.yaw_deg);
      s.pitch_deg = lo.pitch_deg + f * (hi.pitch_deg - lo.pitch_deg);
      s.pupil = lo.pupil + f * (hi.pupil - lo.pupil);
    }
    s.valid = true;
    ++out.dropped;
  }
  return out;
}

}  // namespace gazeload
