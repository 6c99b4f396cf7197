#pragma once

#include <string>
#include <vector>

#include "gazeload/events.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

// Features for the one-second window [second, second+1):
//   fix_dur / sac_dur  mean event duration (s), events clipped to the window
//   sac_amp            mean saccade amplitude (deg), unclipped
//   fix_ratio/sac_ratio  in-window event time / 1 s
//   blink_count        blinks whose start lies in the window
//   avg_pupil_size     mean pupil over valid in-window samples
// Degenerate inputs produce zeros plus a quality flag.
FeatureVector extract_features(const GazeRecording& rec,
                               const std::vector<GazeEvent>& events, int second);

// All seconds 0..duration-1 for one recording (raw, not z-scored).
FeatureSeries featurize_recording(const GazeRecording& rec,
                                  const IvtConfig& cfg = {});

// Population mean/stddev per feature over the given per-second vectors
// (population stddev, i.e. divide by N). `source` tags the originating split.
PopulationStats fit_population_stats(const std::vector<FeatureVector>& seconds,
                                     const std::string& source);

// z = (x - mean) / stddev; a degenerate stddev (< 1e-12) maps to z = 0.
FeatureVector normalize(const FeatureVector& raw, const PopulationStats& stats);
FeatureSeries normalize(const FeatureSeries& raw, const PopulationStats& stats);

// Inverse transform (degenerate stddev maps back to the mean).
FeatureVector denormalize(const FeatureVector& z, const PopulationStats& stats);

// Assembles the K x T z-score table whose columns are seconds
// end_second-(T-1) .. end_second. Seconds absent from the series yield
// zero-filled, flagged columns. end_second < T-1 is an error.
FeatureTable build_table(const FeatureSeries& zscored, int end_second, int window);

// Deterministic markdown rendering:
//   | Feature | t-4 | ... | t |
// one row per feature in canonical order, cells formatted %+.2f.
std::string render_markdown(const FeatureTable& table);

// CSV format (raw feature values, %.6f):
//   user,task,second,flags,fix_dur,sac_dur,sac_amp,fix_ratio,sac_ratio,
//   blink_count,avg_pupil_size
// Reading groups contiguous (user, task) runs back into series.
std::string features_to_csv(const std::vector<FeatureSeries>& series);
std::vector<FeatureSeries> features_from_csv_text(const std::string& text);

// Single-line JSON round trip for population statistics.
std::string stats_to_json(const PopulationStats& stats);
PopulationStats stats_from_json(const std::string& text);

}  // namespace gazeload
