#include "gazeload/counterfactual.hpp"

#include <algorithm>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

FeatureTable perturb_feature(const FeatureTable& table, int feature) {
  if (feature < 0 || feature >= kFeatureCount) {
    throw InputError("perturb: feature index " + std::to_string(feature) +
                     " out of range");
  }
  FeatureTable out = table;
  for (int t = 0; t < out.window; ++t) {
    double& v = out.cells[size_t(feature) * size_t(out.window) + size_t(t)];
    v = -v;
  }
  return out;
}

bool mentions_feature(const std::string& reasoning, int feature) {
  if (feature < 0 || feature >= kFeatureCount) {
    throw InputError("feature index " + std::to_string(feature) + " out of range");
  }
  return reasoning.find(feature_names()[size_t(feature)]) != std::string::npos;
}

namespace {

const char* const kIncreaseWords[] = {"increase", "rising", "higher", "elevated"};
const char* const kDecreaseWords[] = {"decrease", "falling", "lower", "suppressed"};

bool contains_any(const std::string& text, const char* const* words, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (text.find(words[i]) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

bool direction_consistent(const std::string& reasoning, int feature, int sign) {
  if (!mentions_feature(reasoning, feature)) return false;
  const std::string text = to_lower(reasoning);
  if (sign > 0) return contains_any(text, kIncreaseWords, 4);
  if (sign < 0) return contains_any(text, kDecreaseWords, 4);
  return true;
}

std::vector<CounterfactualRow> counterfactual_run(const std::vector<FeatureTable>& samples,
                                                  const SessionContext& context,
                                                  const CounterfactualConfig& cfg) {
  if (context.rule == nullptr) throw InputError("counterfactual run needs a rule");
  const GuidanceRule& rule = *context.rule;
  const int n_features =
      std::min<int>(cfg.top_features, static_cast<int>(rule.entries.size()));

  std::vector<CounterfactualRow> rows;
  for (int e = 0; e < n_features; ++e) {
    const RuleEntry& entry = rule.entries[size_t(e)];
    CounterfactualRow row;
    row.feature = entry.feature;
    row.rank = entry.rank;

    int direction_ok = 0;
    int attribution_ok = 0;
    for (const FeatureTable& table : samples) {
      row.task = table.task;
      const WindowPrediction base = predict_window(table, context);
      const FeatureTable perturbed = perturb_feature(table, entry.feature);
      const WindowPrediction after = predict_window(perturbed, context);
      ++row.samples;

      const bool usable = !base.parse_failed && !after.parse_failed;
      const bool flipped = usable && after.label != base.label;
      if (flipped) ++row.flipped;

      // Sign of the perturbed feature's window mean, which the explanation
      // should describe.
      double mean = 0.0;
      for (int t = 0; t < perturbed.window; ++t) mean += perturbed.cell(entry.feature, t);
      const int sign = mean > 0.0 ? 1 : (mean < 0.0 ? -1 : 0);
      if (usable && direction_consistent(after.reasoning, entry.feature, sign)) {
        ++direction_ok;
      }
      if (flipped && mentions_feature(after.reasoning, entry.feature)) ++attribution_ok;
    }

    if (row.samples > 0) {
      row.flip_rate = 100.0 * row.flipped / row.samples;
      row.direction_correct = 100.0 * direction_ok / row.samples;
    }
    if (row.flipped > 0) {
      row.attribution_correct = 100.0 * attribution_ok / row.flipped;
    }
    rows.push_back(row);
  }

  std::sort(rows.begin(), rows.end(),
            [](const CounterfactualRow& a, const CounterfactualRow& b) {
              return a.rank < b.rank;
            });
  return rows;
}

std::string counterfactual_to_csv(const std::vector<CounterfactualRow>& rows) {
  std::string out = "task,feature,rank,samples,flip_rate,direction_correct,attribution_correct\n";
  for (const CounterfactualRow& r : rows) {
    out += std::string(to_string(r.task)) + "," + feature_names()[size_t(r.feature)] + "," +
           std::to_string(r.rank) + "," + std::to_string(r.samples) + "," +
           format_fixed(r.flip_rate, 2) + "," + format_fixed(r.direction_correct, 2) + "," +
           format_fixed(r.attribution_correct, 2) + "\n";
  }
  return out;
}

}  // namespace gazeload
