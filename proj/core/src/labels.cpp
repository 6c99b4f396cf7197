#include "gazeload/labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "gazeload/csv.hpp"
#include "gazeload/error.hpp"
#include "gazeload/io.hpp"
#include "gazeload/rng.hpp"

namespace gazeload {

const char* to_string(LabelSource source) {
  switch (source) {
    case LabelSource::Reported: return "reported";
    case LabelSource::Interpolated: return "interpolated";
    case LabelSource::Synthetic: return "synthetic";
  }
  return "interpolated";
}

LabelSource parse_label_source(const std::string& token) {
  if (token == "reported") return LabelSource::Reported;
  if (token == "interpolated") return LabelSource::Interpolated;
  if (token == "synthetic") return LabelSource::Synthetic;
  throw InputError("unknown label source '" + token + "'");
}

Level aggregate_label(const std::string& level7) {
  const std::string t = to_lower(trim(level7));
  if (t == "very low" || t == "low" || t == "moderate-low") return Level::Low;
  if (t == "moderate") return Level::Moderate;
  if (t == "moderate-high" || t == "high" || t == "very high") return Level::High;
  throw InputError("unknown 7-point load label '" + level7 + "'");
}

namespace {

struct PreparedReports {
  std::vector<LoadReport> reports;  // sorted by timestamp
  std::vector<int> seconds;         // floor(timestamp) per report
  std::vector<Level> levels;        // aggregated per report
};

std::vector<TaskSpan> prepare_spans(std::vector<TaskSpan> spans) {
  if (spans.empty()) throw InputError("no task spans given");
  std::sort(spans.begin(), spans.end(),
            [](const TaskSpan& a, const TaskSpan& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].start_s >= spans[i].end_s) {
      throw InputError("task span [" + std::to_string(spans[i].start_s) + "," +
                       std::to_string(spans[i].end_s) + ") is empty");
    }
    if (i > 0 && spans[i].start_s < spans[i - 1].end_s) {
      throw InputError("task spans overlap at second " + std::to_string(spans[i].start_s));
    }
  }
  return spans;
}

PreparedReports prepare_reports(std::vector<LoadReport> reports,
                                const std::vector<TaskSpan>& spans) {
  if (reports.empty()) throw InputError("no load reports given");
  std::stable_sort(reports.begin(), reports.end(),
                   [](const LoadReport& a, const LoadReport& b) {
                     return a.timestamp_s < b.timestamp_s;
                   });
  PreparedReports out;
  for (const LoadReport& r : reports) {
    const bool inside = std::any_of(spans.begin(), spans.end(), [&](const TaskSpan& s) {
      return r.timestamp_s >= s.start_s && r.timestamp_s < s.end_s;
    });
    if (!inside) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3f", r.timestamp_s);
      throw InputError("load report at t=" + std::string(buf) +
                       "s falls outside every task span");
    }
    out.seconds.push_back(static_cast<int>(std::floor(r.timestamp_s)));
    out.levels.push_back(aggregate_label(r.level7));
    out.reports.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<LabeledSecond> interpolate_labels(const std::vector<LoadReport>& reports,
                                              const std::vector<TaskSpan>& spans_in,
                                              const std::string& user, TaskId task) {
  const std::vector<TaskSpan> spans = prepare_spans(spans_in);
  const PreparedReports rep = prepare_reports(reports, spans);
  const std::size_t n = rep.reports.size();

  // Assigns the level for one task second according to the task's fill policy.
  auto assign = [&](int s, std::size_t lo, std::size_t hi) -> Level {
    // Reports in [lo, hi) are the candidates (whole list, or one audio span).
    if (task == TaskId::Gaming) {
      // Largest report index whose second is <= s.
      std::size_t i = lo;
      bool found = false;
      for (std::size_t j = lo; j < hi; ++j) {
        if (rep.seconds[j] <= s) {
          i = j;
          found = true;
        }
      }
      if (!found) return rep.levels[lo];     // back-fill before the first report
      if (i + 1 >= hi) return rep.levels[i];  // forward-fill after the last
      const double t1 = rep.reports[i].timestamp_s;
      const double t2 = rep.reports[i + 1].timestamp_s;
      const int boundary = static_cast<int>(std::floor(t1 + 0.8 * (t2 - t1)));
      return s < boundary ? rep.levels[i + 1] : rep.levels[i];
    }
    // Reading and audio: back-fill to the next report at or after s.
    for (std::size_t j = lo; j < hi; ++j) {
      if (rep.seconds[j] >= s) return rep.levels[j];
    }
    return rep.levels[hi - 1];  // forward-fill the tail
  };

  std::vector<LabeledSecond> out;
  for (const TaskSpan& span : spans) {
    std::size_t lo = 0;
    std::size_t hi = n;
    if (task == TaskId::Audio) {
      // Audio fills are local to each task block.
      lo = hi = n;
      for (std::size_t j = 0; j < n; ++j) {
        const double t = rep.reports[j].timestamp_s;
        if (t >= span.start_s && t < span.end_s) {
          if (lo == n) lo = j;
          hi = j + 1;
        }
      }
      if (lo == n) {
        throw InputError("audio span [" + std::to_string(span.start_s) + "," +
                         std::to_string(span.end_s) + ") has no load report");
      }
    }
    for (int s = span.start_s; s < span.end_s; ++s) {
      LabeledSecond ls;
      ls.user = user;
      ls.task = task;
      ls.second = s;
      ls.level = assign(s, lo, hi);
      ls.source = LabelSource::Interpolated;
      for (std::size_t j = lo; j < hi; ++j) {
        if (rep.seconds[j] == s && rep.levels[j] == ls.level) {
          ls.source = LabelSource::Reported;
          break;
        }
      }
      out.push_back(std::move(ls));
    }
  }
  return out;
}

SplitManifest split_users(std::vector<std::string> user_ids, double train_ratio,
                          std::uint64_t seed) {
  if (user_ids.empty()) throw InputError("cannot split an empty user list");
  if (!(train_ratio >= 0.0 && train_ratio <= 1.0)) {
    throw InputError("train ratio must lie in [0, 1]");
  }
  std::set<std::string> seen;
  for (const std::string& id : user_ids) {
    if (!seen.insert(id).second) throw InputError("duplicate user id '" + id + "'");
  }
  std::sort(user_ids.begin(), user_ids.end());
  Rng rng(seed);
  rng.shuffle(user_ids);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_ratio * static_cast<double>(user_ids.size())));
  SplitManifest split;
  split.train.assign(user_ids.begin(), user_ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(user_ids.begin() + static_cast<std::ptrdiff_t>(n_train), user_ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string split_to_text(const SplitManifest& split) {
  std::string out;
  for (const std::string& id : split.train) out += "train " + id + "\n";
  for (const std::string& id : split.test) out += "test " + id + "\n";
  return out;
}

SplitManifest split_from_text(const std::string& text) {
  SplitManifest split;
  int line_no = 0;
  for (const std::string& raw : split_lines(text)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) {
      throw ParseError("split manifest line " + std::to_string(line_no) +
                       ": expected '<split> <user>'");
    }
    const std::string tag = line.substr(0, sp);
    const std::string id = trim(line.substr(sp + 1));
    if (tag == "train") {
      split.train.push_back(id);
    } else if (tag == "test") {
      split.test.push_back(id);
    } else {
      throw ParseError("split manifest line " + std::to_string(line_no) +
                       ": unknown split '" + tag + "'");
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string labels_to_csv(const std::vector<LabeledSecond>& labels) {
  std::string out = "user,task,second,level3,source\n";
  for (const LabeledSecond& l : labels) {
    out += l.user;
    out += ',';
    out += to_string(l.task);
    out += ',';
    out += std::to_string(l.second);
    out += ',';
    out += to_string(l.level);
    out += ',';
    out += to_string(l.source);
    out += '\n';
  }
  return out;
}

namespace {

int parse_int_field(const std::string& s, const char* what, std::size_t line) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + " line " + std::to_string(line) +
                     ": invalid integer '" + s + "'");
  }
}

double parse_double_field(const std::string& s, const char* what, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + " line " + std::to_string(line) +
                     ": invalid number '" + s + "'");
  }
}

}  // namespace

std::vector<LabeledSecond> labels_from_csv_text(const std::string& text) {
  const CsvTable table = parse_csv(text, "labels");
  require_csv_header(table, {"user", "task", "second", "level3", "source"}, "labels");
  std::vector<LabeledSecond> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    LabeledSecond l;
    l.user = row[0];
    l.task = parse_task(row[1]);
    l.second = parse_int_field(row[2], "label", table.line_numbers[i]);
    l.level = parse_level(row[3]);
    l.source = parse_label_source(row[4]);
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LoadReport> reports_from_csv_text(const std::string& text) {
  const CsvTable table = parse_csv(text, "reports");
  require_csv_header(table, {"user", "task", "timestamp_s", "level7"}, "reports");
  std::vector<LoadReport> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    LoadReport r;
    r.user = row[0];
    r.task = parse_task(row[1]);
    r.timestamp_s = parse_double_field(row[2], "report", table.line_numbers[i]);
    r.level7 = row[3];
    aggregate_label(r.level7);  // validate early
    out.push_back(std::move(r));
  }
  return out;
}

std::string reports_to_csv(const std::vector<LoadReport>& reports) {
  std::string out = "user,task,timestamp_s,level7\n";
  for (const LoadReport& r : reports) {
    out += r.user;
    out += ',';
    out += to_string(r.task);
    out += ',';
    out += format_fixed(r.timestamp_s, 3);
    out += ',';
    out += r.level7;
    out += '\n';
  }
  return out;
}

std::vector<SpanRow> spans_from_csv_text(const std::string& text) {
  const CsvTable table = parse_csv(text, "spans");
  require_csv_header(table, {"user", "task", "start_s", "end_s"}, "spans");
  std::vector<SpanRow> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    SpanRow s;
    s.user = row[0];
    s.task = parse_task(row[1]);
    s.span.start_s = parse_int_field(row[2], "span", table.line_numbers[i]);
    s.span.end_s = parse_int_field(row[3], "span", table.line_numbers[i]);
    out.push_back(std::move(s));
  }
  return out;
}

std::string spans_to_csv(const std::vector<SpanRow>& spans) {
  std::string out = "user,task,start_s,end_s\n";
  for (const SpanRow& s : spans) {
    out += s.user;
    out += ',';
    out += to_string(s.task);
    out += ',';
    out += std::to_string(s.span.start_s);
    out += ',';
    out += std::to_string(s.span.end_s);
    out += '\n';
  }
  return out;
}

}  // namespace gazeload
