#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gazeload/llm_client.hpp"
#include "gazeload/profiles.hpp"
#include "gazeload/prompt.hpp"
#include "gazeload/retrieval.hpp"
#include "gazeload/rules.hpp"
#include "gazeload/types.hpp"

namespace gazeload {

struct ParsedResponse {
  Level label = Level::Low;
  std::string reasoning;
};

// Scans for the first line starting with "Cognitive Load:" (case-insensitive,
// tolerant of markdown emphasis and brackets) and takes the first
// Low/Moderate/High token after the colon; reasoning is everything after the
// first "Reasoning:" marker. Returns nullopt when no valid label is found.
std::optional<ParsedResponse> parse_response(const std::string& text);

// Deterministic stand-in for a remote model. Arbitration:
//  (a) each rule entry classifies its feature's row mean against the entry's
//      cutpoints (direction-aware); votes are combined weighted by 1/rank
//  (b) a reference validates iff the sign of the top-ranked feature's row
//      mean matches the query's
//  (c) if at least two validated references agree on one label with a unique
//      majority, that label overrides the provisional vote
//  (d) output follows the required Cognitive Load/Reasoning shape and names
//      the deciding features and any overriding references.
// Ties in (a) resolve to the highest-ranked entry's band among the tied
// labels, then to Low < Moderate < High order. A tied reference majority in
// (c) does not override.
std::string mock_predict(const GuidanceRule& rule, const UserProfile* profile,
                         const std::vector<ReferenceExample>& refs,
                         const FeatureTable& table);

struct WindowPrediction {
  int end_second = 0;
  Level label = Level::Low;
  std::string reasoning;
  double latency_seconds = 0.0;
  int attempts = 0;
  bool carried = false;       // trailing partial window, no model call
  bool parse_failed = false;  // counted as misclassification downstream
  int refs_used = 0;
  bool retrieval_fallback = false;
};

struct SecondPrediction {
  int second = 0;
  Level label = Level::Low;
  bool backfilled = false;  // label copied from a later window end
  bool carried = false;     // trailing seconds after the last full window
  bool parse_failed = false;
};

struct SessionResult {
  std::string user_id;
  TaskId task = TaskId::Reading;
  int window = 0;
  std::vector<WindowPrediction> windows;  // ceil(duration / T) entries
  std::vector<SecondPrediction> seconds;  // one per second of the recording
};

struct SessionContext {
  const GuidanceRule* rule = nullptr;     // required
  const UserProfile* profile = nullptr;   // optional
  const RetrievalDb* db = nullptr;        // null disables retrieval
  LlmClient* client = nullptr;            // null selects the mock backend
  int window = 5;
  int k = 3;
  bool exclude_same_user = false;
  bool flattened_cosine = false;
  int max_attempts = 3;
  double temperature = 0.0;
  // Render the prompt's guidance slot with the generic feature definitions
  // instead of the rule (the rule still drives the mock's arbitration).
  bool generic_guidance = false;
};

// Predicts one window: retrieves references (when a database is present),
// assembles the prompts, and queries the backend (mock when `client` is
// null; a remote backend gets one extra invoke round on a parse failure).
WindowPrediction predict_window(const FeatureTable& table, const SessionContext& context);

// Slides non-overlapping windows ending at T-1, 2T-1, ... through the
// z-scored series, predicts each, and back-fills window labels onto their T
// seconds. A trailing partial window carries the last full window's label
// without a model call and is flagged. A parse failure after one re-invoke
// yields a flagged error prediction. Recordings shorter than T are an error.
SessionResult run_session(const FeatureSeries& zscored, const SessionContext& context);

struct PredictionLogEntry {
  std::string user;
  TaskId task = TaskId::Reading;
  int window_end = 0;
  Level label = Level::Low;
  std::string reasoning;
  double latency_seconds = 0.0;
  std::string backend;
  bool carried = false;
  bool parse_failed = false;
};

std::string predictions_to_jsonl(const std::vector<PredictionLogEntry>& entries);
std::vector<PredictionLogEntry> predictions_from_jsonl(const std::string& text);

// Expands contiguous window-level entries of one session back to per-second
// predictions (each window covers the seconds since the previous one).
std::vector<SecondPrediction> expand_to_seconds(
    const std::vector<WindowPrediction>& windows);

}  // namespace gazeload
