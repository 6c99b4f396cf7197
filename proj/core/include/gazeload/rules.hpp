#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

class LlmClient;

struct GroupStat {
  double mean = 0.0;
  double stddev = 0.0;  // population convention
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::int64_t count = 0;
};

// Per-feature, per-level statistics of z-scored second-level features for one
// task. Indexed [feature][level].
struct GroupedStats {
  TaskId task = TaskId::Reading;
  std::array<std::array<GroupStat, 3>, kFeatureCount> stats{};

  const GroupStat& at(int feature, Level level) const {
    return stats[size_t(feature)][size_t(int(level))];
  }
  std::string digest() const;  // content hash, recorded in rule provenance
};

// Linear-interpolation quantile of an unsorted sample (the convention used
// for all quartiles/medians here).
double quantile(std::vector<double> values, double p);

// Throws InputError naming the first level that has no samples.
GroupedStats grouped_stats(const std::vector<FeatureVector>& zscored_seconds,
                           const std::vector<Level>& labels, TaskId task);

struct RankedFeature {
  int feature = 0;
  double score = 0.0;  // |mean_high - mean_low| / pooled std; +inf sentinel
};

inline constexpr double kDefaultMinSeparation = 0.3;

// Separation ranking between the High and Low groups. Features scoring below
// min_sep are excluded; ties break by canonical feature order. Zero pooled
// spread with distinct means scores +infinity.
std::vector<RankedFeature> discriminative_rank(const GroupedStats& stats,
                                               double min_sep = kDefaultMinSeparation);

struct RuleEntry {
  int feature = 0;
  int rank = 1;          // 1-based
  char direction = '+';  // '+': value rises with load, '-': falls
  double cut_low = 0.0;  // ascending cutpoints in z-space
  double cut_high = 0.0;
};

struct GuidanceRule {
  TaskId task = TaskId::Reading;
  std::vector<RuleEntry> entries;  // ordered by rank
  std::string prompt_text;         // deterministic rendering of the entries
  std::string provenance;          // "fallback", "llm", "fallback-after-llm-failure"
  std::string stats_digest;
  std::string transfer_from;  // nonempty when applied across tasks
  std::vector<std::string> warnings;
};

// Band classification for one entry. direction '+': below cut_low is Low and
// above cut_high is High; direction '-' mirrors the mapping.
Level evaluate_entry(const RuleEntry& entry, double value);

struct RuleGenOptions {
  double min_sep = kDefaultMinSeparation;
  double temperature = 0.0;
};

// Builds the guidance rule for one task. With a client, the grouped stats are
// sent out for structured entries (one retry on unparseable output, then the
// deterministic fallback with a warning). Without a client the deterministic
// fallback runs directly: direction = sign(mean_high - mean_low), cutpoints at
// the midpoints of adjacent group medians, sorted ascending. If every feature
// falls below min_sep the top 3 by raw score are used and a warning recorded.
GuidanceRule generate_rule(const GroupedStats& stats, LlmClient* client = nullptr,
                           const RuleGenOptions& options = {});

// The exchange format used when a client generates entries; exposed for
// client implementations and tests.
std::string rule_request_system_text();
std::string rule_request_user_text(const GroupedStats& stats);
std::optional<std::vector<RuleEntry>> parse_rule_entries(const std::string& text);

struct RuleStore {
  std::vector<GuidanceRule> rules;
};

// Exact task match; unknown task throws InputError listing stored tasks.
// With transfer_from set, that task's rule is returned instead, tagged so the
// substitution is visible downstream.
GuidanceRule select_rule(const RuleStore& store, TaskId task,
                         std::optional<TaskId> transfer_from = std::nullopt);

std::string rules_to_jsonl(const RuleStore& store);
RuleStore rules_from_jsonl(const std::string& text);

}  // namespace gazeload
