#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gazeload/types.hpp"

namespace gazeload {

// Window descriptor: per feature row, in canonical feature order,
// [mean, population std, least-squares slope over column index 0..T-1],
// giving 3*K values. A one-column table has slope 0.
std::vector<double> descriptor(const FeatureTable& table);

// Euclidean distance between descriptors of equal length; length mismatch is
// an error.
double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b);

// Cosine distance (1 - cosine similarity) over the flattened K*T cells of two
// tables; a zero-norm operand yields similarity 0. The comparison baseline
// used by the --similarity flat-cosine ablation switch.
double flattened_cosine_distance(const FeatureTable& a, const FeatureTable& b);

struct RetrievalRecord {
  std::string user_id;
  TaskId task = TaskId::Reading;
  int window_id = 0;  // end_second of the source window
  std::string profile;
  Level label = Level::Low;
  std::vector<double> descriptor;
  FeatureTable table;
};

class RetrievalDb {
public:
  // Orders records deterministically by (user_id, task, window_id) keeping
  // duplicate insertions in input order, verifies every record is fully
  // tagged, and refuses records from outside train_users when provided.
  static RetrievalDb build(std::vector<RetrievalRecord> records,
                           const std::optional<std::set<std::string>>& train_users =
                               std::nullopt);

  const std::vector<RetrievalRecord>& records() const { return records_; }
  int window() const { return window_; }

  // Record ids matching (task, profile); empty profile matches any.
  std::vector<int> filter(TaskId task, const std::string& profile) const;

private:
  std::vector<RetrievalRecord> records_;
  int window_ = 0;
};

struct RetrieveOptions {
  int k = 3;
  bool exclude_same_user = false;
  bool flattened_cosine = false;
};

struct RetrievalHit {
  int record_id = 0;
  double distance = 0.0;
};

struct RetrievalResult {
  std::vector<RetrievalHit> hits;  // ascending distance, ties by insertion order
  bool fallback_task_only = false; // (task, profile) bucket was empty; widened
};

// Linear scan over the (task, profile) bucket; widens to task-only with a
// fallback flag when the bucket is empty. Deterministic for fixed inputs.
RetrievalResult retrieve(const RetrievalDb& db, const FeatureTable& query,
                         const std::string& profile, const RetrieveOptions& options = {});

std::string db_to_jsonl(const RetrievalDb& db);
RetrievalDb db_from_jsonl(const std::string& text);

}  // namespace gazeload
