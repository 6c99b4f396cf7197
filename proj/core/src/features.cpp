#include "gazeload/features.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gazeload/csv.hpp"
#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

namespace {
constexpr std::int64_t kSecondNs = 1000000000;
}

FeatureVector extract_features(const GazeRecording& rec,
                               const std::vector<GazeEvent>& events, int second) {
  const std::int64_t w0 = std::int64_t(second) * kSecondNs;
  const std::int64_t w1 = w0 + kSecondNs;

  FeatureVector f;
  f.second = second;

  double fix_time = 0.0, sac_time = 0.0;
  double fix_dur_sum = 0.0, sac_dur_sum = 0.0, amp_sum = 0.0;
  int fix_n = 0, sac_n = 0, blink_n = 0;
  for (const auto& e : events) {
    if (e.end_ns <= w0 || e.start_ns >= w1) continue;
    const double overlap =
        double(std::min(e.end_ns, w1) - std::max(e.start_ns, w0)) * 1e-9;
    switch (e.kind) {
      case EventKind::Fixation:
        fix_time += overlap;
        fix_dur_sum += overlap;
        ++fix_n;
        break;
      case EventKind::Saccade:
        sac_time += overlap;
        sac_dur_sum += overlap;
        amp_sum += e.amplitude_deg;
        ++sac_n;
        break;
      case EventKind::Blink:
        if (e.start_ns >= w0 && e.start_ns < w1) ++blink_n;
        break;
      case EventKind::Gap:
        break;
    }
  }

  double pupil_sum = 0.0;
  int pupil_n = 0;
  auto lo = std::lower_bound(rec.samples.begin(), rec.samples.end(), w0,
                             [](const GazeSample& s, std::int64_t t) {
                               return s.timestamp_ns < t;
                             });
  for (auto it = lo; it != rec.samples.end() && it->timestamp_ns < w1; ++it) {
    if (it->valid) {
      pupil_sum += it->pupil;
      ++pupil_n;
    }
  }

  f.values[kFixDur] = fix_n > 0 ? fix_dur_sum / fix_n : 0.0;
  f.values[kSacDur] = sac_n > 0 ? sac_dur_sum / sac_n : 0.0;
  f.values[kSacAmp] = sac_n > 0 ? amp_sum / sac_n : 0.0;
  f.values[kFixRatio] = fix_time;
  f.values[kSacRatio] = sac_time;
  f.values[kBlinkCount] = blink_n;
  f.values[kAvgPupilSize] = pupil_n > 0 ? pupil_sum / pupil_n : 0.0;
  if (fix_n == 0) f.flags |= kFlagNoFixations;
  if (sac_n == 0) f.flags |= kFlagNoSaccades;
  if (pupil_n == 0) f.flags |= kFlagNoPupil;
  return f;
}

FeatureSeries featurize_recording(const GazeRecording& rec, const IvtConfig& cfg) {
  FeatureSeries series;
  series.user_id = rec.user_id;
  series.task = rec.task;
  const DetectResult det = detect_events(rec, cfg);
  const int duration = rec.duration_seconds();
  series.seconds.reserve(size_t(std::max(duration, 0)));
  // Events are start-ordered, so advance a cursor instead of rescanning.
  size_t first_candidate = 0;
  std::vector<GazeEvent> in_window;
  for (int sec = 0; sec < duration; ++sec) {
    const std::int64_t w0 = std::int64_t(sec) * kSecondNs;
    const std::int64_t w1 = w0 + kSecondNs;
    while (first_candidate < det.events.size() &&
           det.events[first_candidate].end_ns <= w0) {
      ++first_candidate;
    }
    in_window.clear();
    for (size_t i = first_candidate; i < det.events.size(); ++i) {
      if (det.events[i].start_ns >= w1) break;
      in_window.push_back(det.events[i]);
    }
    series.seconds.push_back(extract_features(rec, in_window, sec));
  }
  return series;
}

PopulationStats fit_population_stats(const std::vector<FeatureVector>& seconds,
                                     const std::string& source) {
  if (seconds.empty()) throw InputError("cannot fit population stats on empty input");
  PopulationStats stats;
  stats.source = source;
  stats.count = std::int64_t(seconds.size());
  for (int k = 0; k < kFeatureCount; ++k) {
    double sum = 0.0;
    for (const auto& s : seconds) sum += s.values[size_t(k)];
    const double mean = sum / double(seconds.size());
    double sq = 0.0;
    for (const auto& s : seconds) {
      const double d = s.values[size_t(k)] - mean;
      sq += d * d;
    }
    stats.mean[size_t(k)] = mean;
    stats.stddev[size_t(k)] = std::sqrt(sq / double(seconds.size()));
  }
  return stats;
}

namespace {
constexpr double kDegenerateStd = 1e-12;
}

FeatureVector normalize(const FeatureVector& raw, const PopulationStats& stats) {
  FeatureVector z = raw;
  for (int k = 0; k < kFeatureCount; ++k) {
    const double sd = stats.stddev[size_t(k)];
    z.values[size_t(k)] =
        sd < kDegenerateStd ? 0.0 : (raw.values[size_t(k)] - stats.mean[size_t(k)]) / sd;
  }
  return z;
}

FeatureSeries normalize(const FeatureSeries& raw, const PopulationStats& stats) {
  FeatureSeries z = raw;
  for (auto& s : z.seconds) s = normalize(s, stats);
  z.zscored = true;
  return z;
}

FeatureVector denormalize(const FeatureVector& z, const PopulationStats& stats) {
  FeatureVector raw = z;
  for (int k = 0; k < kFeatureCount; ++k) {
    const double sd = stats.stddev[size_t(k)];
    raw.values[size_t(k)] =
        sd < kDegenerateStd ? stats.mean[size_t(k)]
                            : z.values[size_t(k)] * sd + stats.mean[size_t(k)];
  }
  return raw;
}

FeatureTable build_table(const FeatureSeries& zscored, int end_second, int window) {
  if (window < 1) throw InputError("window must be >= 1");
  if (end_second < window - 1) {
    throw InputError("insufficient history: end_second " + std::to_string(end_second) +
                     " needs at least " + std::to_string(window) + " seconds");
  }
  FeatureTable table;
  table.user_id = zscored.user_id;
  table.task = zscored.task;
  table.end_second = end_second;
  table.window = window;
  table.cells.assign(size_t(kFeatureCount) * size_t(window), 0.0);
  table.column_missing.assign(size_t(window), 0);

  for (int t = 0; t < window; ++t) {
    const int sec = end_second - (window - 1) + t;
    const FeatureVector* fv = nullptr;
    // Seconds are normally dense and sorted with seconds[i].second == i.
    if (sec >= 0 && size_t(sec) < zscored.seconds.size() &&
        zscored.seconds[size_t(sec)].second == sec) {
      fv = &zscored.seconds[size_t(sec)];
    } else {
      for (const auto& s : zscored.seconds) {
        if (s.second == sec) {
          fv = &s;
          break;
        }
      }
    }
    if (fv == nullptr) {
      table.column_missing[size_t(t)] = 1;
      continue;
    }
    for (int k = 0; k < kFeatureCount; ++k) table.cell(k, t) = fv->values[size_t(k)];
  }
  return table;
}

std::string render_markdown(const FeatureTable& table) {
  std::string out = "| Feature |";
  for (int t = 0; t < table.window; ++t) {
    const int back = table.window - 1 - t;
    out += back == 0 ? " t |" : " t-" + std::to_string(back) + " |";
  }
  out += "\n|---|";
  for (int t = 0; t < table.window; ++t) out += "---|";
  out += "\n";
  const auto& names = feature_names();
  for (int k = 0; k < kFeatureCount; ++k) {
    out += "| " + names[size_t(k)] + " |";
    for (int t = 0; t < table.window; ++t) {
      out += " " + format_cell(table.cell(k, t)) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string features_to_csv(const std::vector<FeatureSeries>& series) {
  std::string out = "user,task,second,flags";
  for (const auto& name : feature_names()) out += "," + name;
  out += "\n";
  for (const FeatureSeries& s : series) {
    for (const FeatureVector& fv : s.seconds) {
      out += s.user_id;
      out += ',';
      out += to_string(s.task);
      out += ',';
      out += std::to_string(fv.second);
      out += ',';
      out += std::to_string(fv.flags);
      for (int k = 0; k < kFeatureCount; ++k) {
        out += ',';
        out += format_fixed(fv.values[size_t(k)], 6);
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<FeatureSeries> features_from_csv_text(const std::string& text) {
  std::vector<std::string> expected = {"user", "task", "second", "flags"};
  for (const auto& name : feature_names()) expected.push_back(name);
  const CsvTable table = parse_csv(text, "features");
  require_csv_header(table, expected, "features");

  std::vector<FeatureSeries> out;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string& user = row[0];
    const TaskId task = parse_task(row[1]);
    if (out.empty() || out.back().user_id != user || out.back().task != task) {
      FeatureSeries s;
      s.user_id = user;
      s.task = task;
      s.zscored = false;
      out.push_back(std::move(s));
    }
    FeatureVector fv;
    try {
      fv.second = std::stoi(row[2]);
      fv.flags = unsigned(std::stoul(row[3]));
      for (int k = 0; k < kFeatureCount; ++k) {
        fv.values[size_t(k)] = std::stod(row[size_t(4 + k)]);
      }
    } catch (const std::exception&) {
      throw ParseError("features:" + std::to_string(table.line_numbers[i]) +
                       ": malformed numeric field");
    }
    out.back().seconds.push_back(fv);
  }
  return out;
}

std::string stats_to_json(const PopulationStats& stats) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["stddev"] = stats.stddev;
  j["source"] = stats.source;
  j["count"] = stats.count;
  return j.dump();
}

PopulationStats stats_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad stats file: ") + e.what());
  }
  PopulationStats stats;
  try {
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto stddev = j.at("stddev").get<std::vector<double>>();
    if (mean.size() != kFeatureCount || stddev.size() != kFeatureCount) {
      throw ParseError("stats file must carry " + std::to_string(kFeatureCount) +
                       " feature entries");
    }
    std::copy(mean.begin(), mean.end(), stats.mean.begin());
    std::copy(stddev.begin(), stddev.end(), stats.stddev.begin());
    stats.source = j.value("source", "");
    stats.count = j.value("count", std::int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad stats file: ") + e.what());
  }
  return stats;
}

}  // namespace gazeload
