#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

// One scored prediction. `parse_failed` marks outputs the response parser
// could not read; those never count as correct.
struct EvalPair {
  std::string user;
  Level truth = Level::Low;
  Level pred = Level::Low;
  bool parse_failed = false;
};

struct ConfusionMatrix {
  // counts[truth][pred], parse failures tallied separately per true class.
  std::array<std::array<std::int64_t, 3>, 3> counts{};
  std::array<std::int64_t, 3> parse_failures{};

  std::int64_t total() const;          // includes parse failures
  std::int64_t row_total(int t) const; // includes parse failures
  std::int64_t col_total(int p) const;
};

ConfusionMatrix confusion(const std::vector<EvalPair>& pairs);

// Aligned-sequence form; throws InputError on length mismatch.
ConfusionMatrix confusion(const std::vector<Level>& truth, const std::vector<Level>& pred);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Accuracy counts every scored window in the denominator, so a parse failure
// is as costly as a misclassification. Undefined ratios (0/0) collapse to 0;
// macro scores are unweighted means over the three classes.
struct MetricReport {
  ConfusionMatrix cm;
  double accuracy = 0.0;
  std::array<ClassMetrics, 3> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

MetricReport compute_metrics(const ConfusionMatrix& cm);

struct UserAccuracy {
  std::string user;
  std::int64_t n = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
};

// Per-user accuracy, sorted by user id.
std::vector<UserAccuracy> per_user_accuracy(const std::vector<EvalPair>& pairs);

// CSV format: metric,class,value (confusion cells listed as
// confusion_<truth>_<pred> rows, parse failures as parse_failed_<truth>).
std::string metric_report_to_csv(const MetricReport& report);
// CSV format: user,accuracy
std::string per_user_to_csv(const std::vector<UserAccuracy>& rows);
// Cumulative distribution of per-user accuracy; CSV format: accuracy,cum_fraction
std::string accuracy_cdf_csv(const std::vector<UserAccuracy>& rows);
// Human-readable block for terminals/logs.
std::string metric_report_summary(const MetricReport& report);

}  // namespace gazeload
