#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeload/inference.hpp"
#include "gazeload/labels.hpp"
#include "gazeload/metrics.hpp"
#include "gazeload/profiles.hpp"
#include "gazeload/rules.hpp"
#include "gazeload/synth.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

// Everything one end-to-end run consumes: raw recordings, per-second ground
// truth, and the train/test membership.
struct Dataset {
  std::vector<GazeRecording> recordings;
  std::vector<LabeledSecond> labels;
  std::vector<std::string> train_users;
  std::vector<std::string> test_users;
};

// Convenience: synthetic cohort plus a seeded user split.
Dataset dataset_from_synth(const SynthDataset& synth, double train_ratio,
                           std::uint64_t split_seed);

// Loads raw recordings named <user>_<task>.csv from `raw_dir` (task names
// reading/gaming/audio; the last underscore separates user from task), the
// label CSV, and the split manifest.
Dataset load_dataset(const std::string& raw_dir, const std::string& labels_path,
                     const std::string& split_path);

struct PipelineConfig {
  int window = 5;
  int k = 3;
  bool use_rules = true;      // off: prompts fall back to generic guidance
  bool use_profiles = true;   // off: population baseline, untagged retrieval
  bool use_retrieval = true;  // off: no reference examples
  std::vector<TaskId> eval_tasks = {TaskId::Reading, TaskId::Gaming};
  TaskId calibration_task = TaskId::Audio;
  std::vector<int> k_range = {2, 3, 4, 5};
  std::uint64_t profile_seed = 42;
  double min_separation = kDefaultMinSeparation;
  LlmClient* client = nullptr;       // prediction backend; null = mock
  LlmClient* rule_client = nullptr;  // rule generation; null = fallback
  bool exclude_same_user = false;
  bool flattened_cosine = false;
  // Robustness injections: train-label flips and test-recording sample drops.
  double label_noise = 0.0;
  double missing_ratio = 0.0;
  std::uint64_t perturb_seed = 99;
};

struct PipelineResult {
  MetricReport report;
  std::vector<EvalPair> pairs;  // one per evaluated second
  std::vector<PredictionLogEntry> log;
  PopulationStats stats;
  RuleStore rules;
  ProfileModel profile_model;           // empty when profiles are off
  std::vector<UserProfile> profiles;    // train + test users
  std::string metrics_csv;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

// Runs featurize -> stats -> rules -> profiles -> retrieval db -> predict ->
// evaluate over the dataset. Training artifacts come from train users only;
// EvalPairs score test users' seconds against the (uncorrupted) ground
// truth. Deterministic for fixed config and dataset.
PipelineResult run_pipeline(const Dataset& data, const PipelineConfig& cfg);

// Built-in rule used for mock arbitration when task rules are disabled:
// pupil up, fixation duration up, blinks down, banded at +/-0.5 z (the
// magnitude guide's "typical" band).
GuidanceRule generic_rule(TaskId task);

}  // namespace gazeload
