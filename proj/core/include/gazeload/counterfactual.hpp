#pragma once

#include <string>
#include <vector>

#include "gazeload/inference.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

// Negates one feature row of the table across all timesteps; the other rows
// are untouched. Applying it twice restores the input.
FeatureTable perturb_feature(const FeatureTable& table, int feature);

// True when the explanation names the feature (plain substring containment).
bool mentions_feature(const std::string& reasoning, int feature);

// Keyword heuristic for direction phrasing: sign > 0 expects one of
// {increase, rising, higher, elevated}, sign < 0 one of {decrease, falling,
// lower, suppressed}; sign 0 is vacuously consistent. The feature must also
// be named. This is a transparent, versioned heuristic — it scores surface
// phrasing, nothing deeper.
bool direction_consistent(const std::string& reasoning, int feature, int sign);

// One report row per perturbed (feature, rank). Rates are percentages;
// attribution is computed over flipped samples only.
struct CounterfactualRow {
  TaskId task = TaskId::Reading;
  int feature = 0;
  int rank = 0;
  int samples = 0;
  int flipped = 0;
  double flip_rate = 0.0;
  double direction_correct = 0.0;
  double attribution_correct = 0.0;
};

struct CounterfactualConfig {
  int top_features = 3;  // leading rule entries to perturb, one at a time
};

// Perturbs the top-ranked rule features one at a time over the sample set
// and scores flips and explanation quality. The context supplies the rule,
// backend, and retrieval setup; rows come back in rule-rank order.
std::vector<CounterfactualRow> counterfactual_run(const std::vector<FeatureTable>& samples,
                                                  const SessionContext& context,
                                                  const CounterfactualConfig& cfg);

// CSV format: task,feature,rank,samples,flip_rate,direction_correct,attribution_correct
std::string counterfactual_to_csv(const std::vector<CounterfactualRow>& rows);

}  // namespace gazeload
