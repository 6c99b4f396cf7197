#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

enum class LabelSource { Reported, Interpolated, Synthetic };

const char* to_string(LabelSource source);
LabelSource parse_label_source(const std::string& token);

// One second of ground truth for (user, task).
struct LabeledSecond {
  std::string user;
  TaskId task = TaskId::Reading;
  int second = 0;
  Level level = Level::Low;
  LabelSource source = LabelSource::Interpolated;
};

// A self-reported load annotation on the 7-point scale.
struct LoadReport {
  std::string user;
  TaskId task = TaskId::Reading;
  double timestamp_s = 0.0;
  std::string level7;  // very low | low | moderate-low | moderate |
                       // moderate-high | high | very high
};

// Collapses the 7-point scale onto 3 levels: {very low, low, moderate-low} ->
// Low, {moderate} -> Moderate, {moderate-high, high, very high} -> High.
// Unknown tokens are an error.
Level aggregate_label(const std::string& level7);

// Task seconds [start_s, end_s) that belong to actual task activity.
struct TaskSpan {
  int start_s = 0;
  int end_s = 0;
};

// Expands sparse reports into one label per task second for a single
// (user, task) group. Reports must fall inside a span.
//  - audio: within each span, a report back-fills to the previous report or
//    the span start; seconds after the last report forward-fill. Every span
//    needs at least one report.
//  - reading: back-fill across the ordered task seconds to the preceding
//    report; trailing seconds forward-fill from the last report.
//  - gaming: asymmetric 80/20 split between consecutive reports r1@t1, r2@t2:
//    the boundary second is floor(t1 + 0.8*(t2-t1)); task seconds in
//    [floor(t1), boundary) take r2's label (the backward share) and
//    [boundary, floor(t2)) take r1's label; the segments before the first
//    and after the last report back/forward-fill to the span edges.
// The second containing a report is tagged Reported when it ends up carrying
// that report's own label, Interpolated otherwise.
std::vector<LabeledSecond> interpolate_labels(const std::vector<LoadReport>& reports,
                                              const std::vector<TaskSpan>& spans,
                                              const std::string& user, TaskId task);

struct SplitManifest {
  std::vector<std::string> train;  // sorted
  std::vector<std::string> test;   // sorted
};

// Seeded shuffle then round(ratio * n) users into train; splits are disjoint
// and cover the input. Duplicate ids are an error.
SplitManifest split_users(std::vector<std::string> user_ids, double train_ratio,
                          std::uint64_t seed);

std::string split_to_text(const SplitManifest& split);
SplitManifest split_from_text(const std::string& text);

// CSV formats (documented headers):
//   labels:  user,task,second,level3,source
//   reports: user,task,timestamp_s,level7
//   spans:   user,task,start_s,end_s
std::string labels_to_csv(const std::vector<LabeledSecond>& labels);
std::vector<LabeledSecond> labels_from_csv_text(const std::string& text);
std::vector<LoadReport> reports_from_csv_text(const std::string& text);
std::string reports_to_csv(const std::vector<LoadReport>& reports);
struct SpanRow {
  std::string user;
  TaskId task = TaskId::Reading;
  TaskSpan span;
};
std::vector<SpanRow> spans_from_csv_text(const std::string& text);
std::string spans_to_csv(const std::vector<SpanRow>& spans);

}  // namespace gazeload
