#include "gazeload/events.hpp"

#include <algorithm>
#include <cmath>

#include "gazeload/error.hpp"

namespace gazeload {

namespace {

double angular_distance(const GazeSample& a, const GazeSample& b) {
  const double dy = b.yaw_deg - a.yaw_deg;
  const double dp = b.pitch_deg - a.pitch_deg;
  return std::sqrt(dy * dy + dp * dp);
}

// Index of the sample at exactly ts; boundary timestamps always correspond to
// real samples.
int sample_at(const std::vector<GazeSample>& samples, std::int64_t ts) {
  auto it = std::lower_bound(samples.begin(), samples.end(), ts,
                             [](const GazeSample& s, std::int64_t t) {
                               return s.timestamp_ns < t;
                             });
  if (it == samples.end() || it->timestamp_ns != ts) return -1;
  return int(it - samples.begin());
}

}  // namespace

DetectResult detect_events(const GazeRecording& rec, const IvtConfig& cfg) {
  DetectResult result;
  const auto& s = rec.samples;
  const size_t n = s.size();
  if (n == 0) return result;
  const std::int64_t period_ns =
      std::int64_t(std::llround(1e9 / (rec.nominal_rate_hz > 0 ? rec.nominal_rate_hz : 90.0)));

  // Pair classes: 0 fixation, 1 saccade, 2 invalid, 3 skip (zero dt).
  enum { kFix = 0, kSac = 1, kInvalid = 2, kSkip = 3 };
  auto classify = [&](size_t i) -> int {
    const GazeSample& a = s[i];
    const GazeSample& b = s[i + 1];
    if (!a.valid || !b.valid) return kInvalid;
    const double dt = double(b.timestamp_ns - a.timestamp_ns) * 1e-9;
    if (dt <= 0.0) return kSkip;
    const double v = angular_distance(a, b) / dt;
    return v < cfg.velocity_threshold_deg_s ? kFix : kSac;
  };

  auto& events = result.events;
  size_t i = 0;
  if (n == 1) {
    // A single sample cannot form a pair; an invalid singleton still yields
    // a gap/blink below via the invalid-sample path only if n > 1, so handle
    // it explicitly.
    if (!s[0].valid) {
      GazeEvent e;
      e.start_ns = s[0].timestamp_ns;
      e.end_ns = s[0].timestamp_ns + period_ns;
      const double ms = double(e.end_ns - e.start_ns) * 1e-6;
      e.kind = (ms >= cfg.blink_min_ms && ms <= cfg.blink_max_ms) ? EventKind::Blink
                                                                  : EventKind::Gap;
      events.push_back(e);
    }
    return result;
  }

  while (i + 1 < n) {
    int cls = classify(i);
    if (cls == kSkip) {
      ++result.zero_dt_pairs;
      ++i;
      continue;
    }
    size_t j = i;  // run of pairs [i, j]
    while (j + 1 < n - 1) {
      int next = classify(j + 1);
      if (next != cls) break;
      ++j;
    }
    GazeEvent e;
    e.start_ns = s[i].timestamp_ns;
    e.end_ns = s[j + 1].timestamp_ns;
    if (cls == kInvalid) {
      // Extend by one nominal period when the episode runs off either edge
      // of the recording (no bracketing valid sample to land on).
      if (!s[j + 1].valid) e.end_ns = s[j + 1].timestamp_ns + period_ns;
      const double ms = double(e.end_ns - e.start_ns) * 1e-6;
      e.kind = (ms >= cfg.blink_min_ms && ms <= cfg.blink_max_ms) ? EventKind::Blink
                                                                  : EventKind::Gap;
    } else if (cls == kSac) {
      e.kind = EventKind::Saccade;
      e.amplitude_deg = angular_distance(s[i], s[j + 1]);
    } else {
      e.kind = EventKind::Fixation;
    }
    events.push_back(e);
    i = j + 1;
  }

  if (cfg.min_fixation_ms > 0.0) {
    // Merge sub-threshold fixations into an adjacent saccade (following one
    // preferred); isolated short fixations are kept as-is.
    for (size_t k = 0; k < events.size();) {
      if (events[k].kind != EventKind::Fixation ||
          events[k].duration_seconds() * 1e3 >= cfg.min_fixation_ms) {
        ++k;
        continue;
      }
      size_t sac = events.size();
      if (k + 1 < events.size() && events[k + 1].kind == EventKind::Saccade &&
          events[k + 1].start_ns == events[k].end_ns) {
        sac = k + 1;
        events[sac].start_ns = events[k].start_ns;
      } else if (k > 0 && events[k - 1].kind == EventKind::Saccade &&
                 events[k - 1].end_ns == events[k].start_ns) {
        sac = k - 1;
        events[sac].end_ns = events[k].end_ns;
      }
      if (sac == events.size()) {
        ++k;
        continue;
      }
      const int a = sample_at(s, events[sac].start_ns);
      const int b = sample_at(s, events[sac].end_ns);
      if (a >= 0 && b >= 0) events[sac].amplitude_deg = angular_distance(s[size_t(a)], s[size_t(b)]);
      events.erase(events.begin() + std::ptrdiff_t(k));
      if (sac == k + 1 || k == 0) continue;
      --k;  // re-examine after merging backward
    }
  }

  return result;
}

}  // namespace gazeload
