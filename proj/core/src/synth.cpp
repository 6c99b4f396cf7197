#include "gazeload/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gazeload/csv.hpp"
#include "gazeload/error.hpp"
#include "gazeload/rng.hpp"

namespace gazeload {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ArchParams {
  const char* name;
  double pupil_base;   // device units
  double pupil_drift;  // slow drift amplitude, drives pupil variability
  double pupil_noise;  // per-sample jitter scale (multiplied by cfg.noise)
  double blink_rate;   // blinks per second
  double sac_amp;      // saccade amplitude, degrees
  double kappa;        // mean reversion of the fixation center walk
};

const ArchParams kArchetypes[3] = {
    {"High-Reactor", 388.62, 128.0, 20.0, 1.10, 5.0, 0.19},
    {"Low-Reactor", 285.00, 58.0, 10.0, 0.85, 4.5, 0.25},
    {"Restless", 198.87, 82.0, 14.0, 2.04, 6.0, 0.15},
};

// Per-user realization of an archetype (small trait jitter keeps users of
// one archetype similar but not identical).
struct UserParams {
  ArchParams base;
  double drift_phase = 0.0;
  double drift_period = 5400.0;  // samples
};

UserParams realize_user(const ArchParams& arch, Rng& rng) {
  UserParams p;
  p.base = arch;
  p.base.pupil_base = arch.pupil_base + 12.0 * rng.normal();
  p.base.pupil_drift = arch.pupil_drift * (1.0 + 0.10 * rng.normal());
  p.base.blink_rate = std::max(0.2, arch.blink_rate * (1.0 + 0.08 * rng.normal()));
  p.base.sac_amp = std::max(1.0, arch.sac_amp * (1.0 + 0.06 * rng.normal()));
  p.base.kappa = std::clamp(arch.kappa * (1.0 + 0.05 * rng.normal()), 0.05, 0.9);
  p.drift_phase = rng.uniform() * 2.0 * kPi;
  p.drift_period = 4500.0 + static_cast<double>(rng.below(1801));
  return p;
}

struct LevelParams {
  double n_sac;        // saccades per second
  double amp_mult;     // saccade amplitude multiplier
  double blink_mult;   // blink rate multiplier
  double pupil_shift;  // additive pupil shift, device units
};

LevelParams level_params(TaskId task, int level) {
  const double l = static_cast<double>(level);  // 0=Low, 1=Moderate, 2=High
  switch (task) {
    case TaskId::Reading:
      return {4.0 - l, 1.0, 1.2 - 0.2 * l, 35.0 * (l - 1.0)};
    case TaskId::Gaming:
      return {4.0 + 2.0 * l, 1.15 - 0.15 * l, 1.25 - 0.25 * l, 35.0 * (l - 1.0)};
    case TaskId::Audio:
      return {3.0, 1.0, 1.1 - 0.1 * l, 40.0 * (l - 1.0)};
  }
  return {3.0, 1.0, 1.0, 0.0};
}

// Difficulty schedule: fixed blocks cycling Low, Moderate, High, Moderate.
int schedule_level(TaskId task, int second) {
  static const int pattern[4] = {0, 1, 2, 1};
  const int block = (task == TaskId::Audio) ? 30 : 60;
  return pattern[(second / block) % 4];
}

// Error-diffused rounding: emits integers whose long-run mean equals the
// requested rate, deterministically.
int diffuse(double& acc, double rate) {
  acc += std::max(0.0, rate);
  const int count = static_cast<int>(std::floor(acc));
  acc -= count;
  return count;
}

enum class SegKind { Fixation, Saccade, Blink };

struct Segment {
  SegKind kind;
  int length;
};

GazeRecording generate_recording(const std::string& user_id, TaskId task,
                                 const UserParams& user, const SynthConfig& cfg,
                                 int spp, Rng& rng) {
  GazeRecording rec;
  rec.user_id = user_id;
  rec.task = task;
  rec.nominal_rate_hz = cfg.rate_hz;
  rec.samples.reserve(static_cast<std::size_t>(cfg.seconds_per_task) * spp);

  const int sac_len = std::max(2, spp / 22);   // ~44 ms at 90 Hz
  const int blink_len = std::max(4, spp / 9);  // ~110 ms gap at 90 Hz
  const double jitter = 0.04 * (1.0 + cfg.noise);
  const std::int64_t rate_int = spp;

  double yaw = 0.0;
  double pitch = 0.0;
  double acc_sac = 0.5;
  double acc_blink = 0.5;
  std::int64_t index = 0;

  auto emit = [&](double y, double p, double pupil, bool valid) {
    GazeSample s;
    s.timestamp_ns = index * 1000000000LL / rate_int;
    s.yaw_deg = y;
    s.pitch_deg = p;
    s.pupil = valid ? pupil : 0.0;
    s.valid = valid;
    rec.samples.push_back(s);
    ++index;
  };

  for (int sec = 0; sec < cfg.seconds_per_task; ++sec) {
    const LevelParams lvl = level_params(task, schedule_level(task, sec));

    const double sac_rate = lvl.n_sac + cfg.noise * 0.8 * rng.normal();
    int n_sac = std::clamp(diffuse(acc_sac, sac_rate), 1, 8);
    const double blink_rate =
        user.base.blink_rate * lvl.blink_mult * (1.0 + cfg.noise * 0.3 * rng.normal());
    int n_blink = std::clamp(diffuse(acc_blink, blink_rate), 0, 3);

    // Keep at least two fixation samples around every event.
    auto budget = [&] {
      return n_sac * sac_len + n_blink * blink_len + 2 * (n_sac + n_blink + 1);
    };
    while (budget() > spp && n_blink > 0) --n_blink;
    while (budget() > spp && n_sac > 1) --n_sac;

    std::vector<Segment> specials;
    for (int i = 0; i < n_sac; ++i) specials.push_back({SegKind::Saccade, sac_len});
    for (int i = 0; i < n_blink; ++i) specials.push_back({SegKind::Blink, blink_len});
    rng.shuffle(specials);

    int used = 0;
    for (const Segment& s : specials) used += s.length;
    const int n_chunks = static_cast<int>(specials.size()) + 1;
    const int remaining = spp - used;
    const int base_len = remaining / n_chunks;
    const int extra = remaining % n_chunks;

    std::vector<Segment> layout;
    for (int i = 0; i < n_chunks; ++i) {
      layout.push_back({SegKind::Fixation, base_len + (i < extra ? 1 : 0)});
      if (i < static_cast<int>(specials.size())) layout.push_back(specials[i]);
    }

    auto pupil_at = [&](std::int64_t idx) {
      const double drift = user.base.pupil_drift *
                           std::sin(2.0 * kPi * static_cast<double>(idx) / user.drift_period +
                                    user.drift_phase);
      return std::max(40.0, user.base.pupil_base + lvl.pupil_shift + drift +
                                user.base.pupil_noise * cfg.noise * rng.normal());
    };

    for (const Segment& seg : layout) {
      if (seg.kind == SegKind::Fixation) {
        for (int i = 0; i < seg.length; ++i) {
          emit(yaw + jitter * rng.normal(), pitch + jitter * rng.normal(),
               pupil_at(index), true);
        }
      } else if (seg.kind == SegKind::Saccade) {
        const double amp = std::max(
            0.5, user.base.sac_amp * lvl.amp_mult * (1.0 + cfg.noise * 0.15 * rng.normal()));
        const double theta = rng.uniform() * 2.0 * kPi;
        const double ty = yaw * (1.0 - user.base.kappa) + amp * std::cos(theta);
        const double tp = pitch * (1.0 - user.base.kappa) + amp * std::sin(theta);
        for (int i = 1; i <= seg.length; ++i) {
          const double f = static_cast<double>(i) / seg.length;
          emit(yaw + f * (ty - yaw), pitch + f * (tp - pitch), pupil_at(index), true);
        }
        yaw = ty;
        pitch = tp;
      } else {
        for (int i = 0; i < seg.length; ++i) emit(yaw, pitch, 0.0, false);
      }
    }
  }
  return rec;
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& cfg) {
  if (cfg.users < 1) throw InputError("synth: need at least one user");
  if (cfg.seconds_per_task < 1) throw InputError("synth: need at least one second per task");
  if (!(cfg.noise >= 0.0)) throw InputError("synth: noise must be >= 0");
  const int spp = static_cast<int>(std::llround(cfg.rate_hz));
  if (spp < 20) throw InputError("synth: sampling rate must be at least 20 Hz");

  int width = 2;
  for (int v = cfg.users; v >= 100; v /= 10) ++width;

  SynthDataset out;
  const TaskId tasks[3] = {TaskId::Reading, TaskId::Gaming, TaskId::Audio};
  for (int u = 0; u < cfg.users; ++u) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", cfg.user_prefix.c_str(), width, u + 1);
    const std::string user_id = buf;
    const ArchParams& arch = kArchetypes[u % 3];
    Rng user_rng(mix_seed(cfg.seed, 0x1000 + static_cast<std::uint64_t>(u)));
    const UserParams params = realize_user(arch, user_rng);
    out.users.push_back({user_id, arch.name});

    for (int t = 0; t < 3; ++t) {
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(u) * 8 + t + 1));
      out.recordings.push_back(generate_recording(user_id, tasks[t], params, cfg, spp, rng));

      for (int sec = 0; sec < cfg.seconds_per_task; ++sec) {
        LabeledSecond l;
        l.user = user_id;
        l.task = tasks[t];
        l.second = sec;
        l.level = static_cast<Level>(schedule_level(tasks[t], sec));
        l.source = LabelSource::Synthetic;
        out.labels.push_back(std::move(l));
      }

      // Audio sessions are organized in discrete blocks; the other tasks run
      // as one continuous span.
      const int block = (tasks[t] == TaskId::Audio) ? 30 : cfg.seconds_per_task;
      for (int start = 0; start < cfg.seconds_per_task; start += block) {
        SpanRow row;
        row.user = user_id;
        row.task = tasks[t];
        row.span = {start, std::min(start + block, cfg.seconds_per_task)};
        out.spans.push_back(std::move(row));
      }
    }
  }
  return out;
}

std::string users_to_csv(const std::vector<SynthUser>& users) {
  std::string out = "user,archetype\n";
  for (const SynthUser& u : users) {
    out += u.user_id;
    out += ',';
    out += u.archetype;
    out += '\n';
  }
  return out;
}

std::vector<SynthUser> users_from_csv_text(const std::string& text) {
  const CsvTable table = parse_csv(text, "users");
  require_csv_header(table, {"user", "archetype"}, "users");
  std::vector<SynthUser> out;
  for (const auto& row : table.rows) out.push_back({row[0], row[1]});
  return out;
}

}  // namespace gazeload
