#include "gazeload/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "gazeload/csv.hpp"
#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

namespace {

double parse_double_field(const std::string& s, const std::string& path, int line) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    // from_chars rejects "nan"/"inf" spellings only on some libraries; fall
    // back to strtod for those, then treat unparseable as an error.
    char* end = nullptr;
    v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || t.empty()) {
      throw ParseError(path + ":" + std::to_string(line) +
                       ": bad numeric field '" + s + "'");
    }
  }
  return v;
}

std::int64_t parse_int_field(const std::string& s, const std::string& path, int line) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(path + ":" + std::to_string(line) +
                     ": bad integer field '" + s + "'");
  }
  return v;
}

}  // namespace

GazeRecording ingest_recording(const std::string& path, const IngestSchema& schema,
                               double nominal_rate_hz) {
  CsvTable csv = read_csv(path);
  const int c_ts = csv.column(schema.timestamp);
  const int c_yaw = csv.column(schema.yaw);
  const int c_pitch = csv.column(schema.pitch);
  const int c_pupil = csv.column(schema.pupil);
  const int c_valid = csv.column(schema.valid);
  if (c_ts < 0 || c_yaw < 0 || c_pitch < 0 || c_pupil < 0 || c_valid < 0) {
    throw ParseError(path + ": missing required column (need " + schema.timestamp +
                     "," + schema.yaw + "," + schema.pitch + "," + schema.pupil +
                     "," + schema.valid + ")");
  }
  if (csv.rows.empty()) throw InputError("recording has no samples: " + path);

  GazeRecording rec;
  rec.nominal_rate_hz = nominal_rate_hz;
  rec.samples.reserve(csv.rows.size());
  std::int64_t prev_ts = 0;
  bool first = true;
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const int line = csv.line_numbers[i];
    GazeSample s;
    s.timestamp_ns = parse_int_field(row[size_t(c_ts)], path, line);
    s.yaw_deg = parse_double_field(row[size_t(c_yaw)], path, line);
    s.pitch_deg = parse_double_field(row[size_t(c_pitch)], path, line);
    s.pupil = parse_double_field(row[size_t(c_pupil)], path, line);
    const std::string v = trim(row[size_t(c_valid)]);
    if (v == "1") {
      s.valid = true;
    } else if (v == "0") {
      s.valid = false;
    } else {
      throw ParseError(path + ":" + std::to_string(line) +
                       ": valid flag must be 0 or 1, got '" + v + "'");
    }
    if (!first && s.timestamp_ns <= prev_ts) {
      throw ParseError(path + ":" + std::to_string(line) +
                       ": timestamps not strictly increasing");
    }
    // Unusable measurements are downgraded rather than dropped so the
    // invalid-run logic can classify the gap.
    if (s.valid && (!std::isfinite(s.yaw_deg) || !std::isfinite(s.pitch_deg) ||
                    !std::isfinite(s.pupil) || s.pupil <= 0.0)) {
      s.valid = false;
    }
    prev_ts = s.timestamp_ns;
    first = false;
    rec.samples.push_back(s);
  }
  return rec;
}

std::string recording_to_csv(const GazeRecording& rec) {
  std::string out = "timestamp_ns,yaw_deg,pitch_deg,pupil,valid\n";
  char buf[160];
  for (const auto& s : rec.samples) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.3f,%d\n",
                  static_cast<long long>(s.timestamp_ns), s.yaw_deg, s.pitch_deg,
                  s.pupil, s.valid ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace gazeload
