#include "gazeload/inference.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "gazeload/error.hpp"
#include "gazeload/features.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

using nlohmann::json;

namespace {

// First maximal run of letters at or after pos.
std::string first_word(const std::string& s, size_t pos) {
  size_t b = pos;
  while (b < s.size() && !std::isalpha(static_cast<unsigned char>(s[b]))) ++b;
  size_t e = b;
  while (e < s.size() && std::isalpha(static_cast<unsigned char>(s[e]))) ++e;
  return s.substr(b, e - b);
}

std::optional<Level> level_from_word(const std::string& word) {
  const std::string w = to_lower(word);
  if (w == "low") return Level::Low;
  if (w == "moderate") return Level::Moderate;
  if (w == "high") return Level::High;
  return std::nullopt;
}

// Strips leading markdown decoration so "**Cognitive Load:** [High]" and
// "> Cognitive Load: High" both match.
size_t content_start(const std::string& line) {
  size_t b = 0;
  while (b < line.size()) {
    const char c = line[b];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '#' ||
        c == '-' || c == '>' || c == '[' || c == '`') {
      ++b;
    } else {
      break;
    }
  }
  return b;
}

}  // namespace

std::optional<ParsedResponse> parse_response(const std::string& text) {
  const auto lines = split_lines(text);
  std::optional<Level> label;
  size_t label_line = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t b = content_start(lines[i]);
    const std::string body = lines[i].substr(b);
    if (!starts_with_icase(body, "cognitive load")) continue;
    const size_t colon = body.find(':');
    if (colon == std::string::npos) continue;
    label = level_from_word(first_word(body, colon + 1));
    if (label) {
      label_line = i;
      break;
    }
  }
  if (!label) return std::nullopt;

  ParsedResponse out;
  out.label = *label;
  for (size_t i = label_line; i < lines.size(); ++i) {
    const size_t b = content_start(lines[i]);
    const std::string body = lines[i].substr(b);
    if (!starts_with_icase(body, "reasoning")) continue;
    const size_t colon = body.find(':');
    if (colon == std::string::npos) continue;
    std::string reasoning = trim(body.substr(colon + 1));
    for (size_t j = i + 1; j < lines.size(); ++j) {
      const std::string extra = trim(lines[j]);
      if (extra.empty()) break;
      reasoning += "\n" + extra;
    }
    out.reasoning = reasoning;
    break;
  }
  return out;
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

const char* trend_word(double v) {
  const int s = sign_of(v);
  return s > 0 ? "elevated" : (s < 0 ? "suppressed" : "stable");
}

std::array<double, kFeatureCount> row_means(const FeatureTable& table) {
  std::array<double, kFeatureCount> means{};
  for (int k = 0; k < kFeatureCount; ++k) {
    double sum = 0.0;
    for (int t = 0; t < table.window; ++t) sum += table.cell(k, t);
    means[size_t(k)] = sum / table.window;
  }
  return means;
}

}  // namespace

std::string mock_predict(const GuidanceRule& rule, const UserProfile* profile,
                         const std::vector<ReferenceExample>& refs,
                         const FeatureTable& table) {
  if (rule.entries.empty()) {
    throw InputError("mock backend needs a rule with at least one entry");
  }
  const auto means = row_means(table);
  const auto& names = feature_names();

  std::array<double, 3> votes{};
  std::vector<Level> entry_bands;
  entry_bands.reserve(rule.entries.size());
  for (const auto& e : rule.entries) {
    const Level band = evaluate_entry(e, means[size_t(e.feature)]);
    entry_bands.push_back(band);
    votes[size_t(int(band))] += 1.0 / double(e.rank);
  }
  const double top_vote = *std::max_element(votes.begin(), votes.end());
  std::array<bool, 3> tied{};
  for (int l = 0; l < 3; ++l) tied[size_t(l)] = votes[size_t(l)] == top_vote;
  Level provisional = Level::Low;
  bool resolved = false;
  for (size_t i = 0; i < entry_bands.size() && !resolved; ++i) {
    if (tied[size_t(int(entry_bands[i]))]) {
      provisional = entry_bands[i];
      resolved = true;
    }
  }
  if (!resolved) {
    for (int l = 0; l < 3; ++l) {
      if (tied[size_t(l)]) {
        provisional = Level(l);
        break;
      }
    }
  }

  const RuleEntry& top = rule.entries.front();
  const int query_sign = sign_of(means[size_t(top.feature)]);
  std::vector<size_t> validated;
  std::vector<size_t> excluded;
  for (size_t i = 0; i < refs.size(); ++i) {
    const auto ref_means = row_means(*refs[i].table);
    if (sign_of(ref_means[size_t(top.feature)]) == query_sign) {
      validated.push_back(i);
    } else {
      excluded.push_back(i);
    }
  }
  std::array<int, 3> ref_votes{};
  for (size_t i : validated) ++ref_votes[size_t(int(refs[i].label))];
  int best_count = 0;
  Level ref_label = Level::Low;
  bool unique = false;
  for (int l = 0; l < 3; ++l) {
    if (ref_votes[size_t(l)] > best_count) {
      best_count = ref_votes[size_t(l)];
      ref_label = Level(l);
      unique = true;
    } else if (ref_votes[size_t(l)] == best_count && best_count > 0) {
      unique = false;
    }
  }
  const bool overridden = unique && best_count >= 2 && ref_label != provisional;
  const Level final_label = overridden ? ref_label : provisional;

  std::string reasoning = "Task logic for " + std::string(to_string(rule.task)) + ": ";
  for (size_t i = 0; i < rule.entries.size(); ++i) {
    const auto& e = rule.entries[i];
    if (i > 0) reasoning += ", ";
    reasoning += names[size_t(e.feature)] + " is " +
                 trend_word(means[size_t(e.feature)]) + " (mean z=" +
                 format_cell(means[size_t(e.feature)]) + ")";
  }
  reasoning += "; the rank-weighted vote gives " + std::string(to_string(provisional)) + ".";
  if (!refs.empty()) {
    reasoning += " Validated " + std::to_string(validated.size()) + " of " +
                 std::to_string(refs.size()) + " reference examples on the dominant " +
                 names[size_t(top.feature)] + " state";
    if (!excluded.empty()) {
      reasoning += "; excluded";
      for (size_t i = 0; i < excluded.size(); ++i) {
        reasoning += (i == 0 ? " example " : ", example ") +
                     std::to_string(excluded[i] + 1);
      }
      reasoning += " for a conflicting " + names[size_t(top.feature)] + " trend";
    }
    reasoning += ".";
    if (overridden) {
      reasoning += " The " + std::to_string(best_count) +
                   " agreeing validated references labeled " +
                   std::string(to_string(ref_label)) + " override the provisional " +
                   std::string(to_string(provisional)) + ".";
    } else if (!validated.empty()) {
      reasoning += " Validated references are consistent with the provisional classification.";
    }
  }
  if (profile != nullptr) {
    reasoning += " Interpreted against the " + profile->profile_name + " profile baselines.";
  }

  return "Cognitive Load: " + std::string(to_string(final_label)) + "\nReasoning: " +
         reasoning + "\n";
}

WindowPrediction predict_window(const FeatureTable& table, const SessionContext& context) {
  if (context.rule == nullptr) throw InputError("session context has no rule");

  WindowPrediction wp;
  wp.end_second = table.end_second;

  std::vector<ReferenceExample> refs;
  if (context.db != nullptr) {
    RetrieveOptions opt;
    opt.k = context.k;
    opt.exclude_same_user = context.exclude_same_user;
    opt.flattened_cosine = context.flattened_cosine;
    const RetrievalResult rr = retrieve(*context.db, table,
                                        context.profile ? context.profile->profile_name
                                                        : std::string(),
                                        opt);
    wp.retrieval_fallback = rr.fallback_task_only;
    for (const auto& hit : rr.hits) {
      const auto& rec = context.db->records()[size_t(hit.record_id)];
      refs.push_back({&rec.table, rec.label});
    }
    wp.refs_used = int(refs.size());
  }

  PromptContext pc;
  pc.task = table.task;
  pc.window = table.window;
  pc.rule = context.generic_guidance ? nullptr : context.rule;
  pc.profile = context.profile;
  pc.refs = refs;
  pc.table = &table;
  const PromptPair prompts = assemble_prompts(pc);

  if (context.client == nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string text = mock_predict(*context.rule, context.profile, refs, table);
    wp.latency_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    wp.attempts = 1;
    const auto parsed = parse_response(text);
    if (!parsed) throw Error("internal", "mock output failed to parse");
    wp.label = parsed->label;
    wp.reasoning = parsed->reasoning;
  } else {
    std::optional<ParsedResponse> parsed;
    double latency = 0.0;
    int attempts = 0;
    for (int round = 0; round < 2 && !parsed; ++round) {
      const LlmResult r =
          invoke(*context.client, prompts, context.max_attempts, context.temperature);
      latency += r.latency_seconds;
      attempts += r.attempts;
      parsed = parse_response(r.text);
    }
    wp.latency_seconds = latency;
    wp.attempts = attempts;
    if (parsed) {
      wp.label = parsed->label;
      wp.reasoning = parsed->reasoning;
    } else {
      wp.parse_failed = true;
      wp.reasoning = "unparseable model output after retry";
    }
  }
  return wp;
}

SessionResult run_session(const FeatureSeries& zscored, const SessionContext& context) {
  if (context.rule == nullptr) throw InputError("session context has no rule");
  const int T = context.window;
  if (T < 1) throw InputError("window must be >= 1");
  const int duration = int(zscored.seconds.size());
  if (duration < T) {
    throw InputError("recording has " + std::to_string(duration) +
                     " seconds; shorter than window " + std::to_string(T));
  }

  SessionResult result;
  result.user_id = zscored.user_id;
  result.task = zscored.task;
  result.window = T;
  result.seconds.resize(size_t(duration));

  for (int end = T - 1; end < duration; end += T) {
    const FeatureTable table = build_table(zscored, end, T);
    WindowPrediction wp = predict_window(table, context);

    for (int s = end - T + 1; s <= end; ++s) {
      auto& sp = result.seconds[size_t(s)];
      sp.second = s;
      sp.label = wp.label;
      sp.backfilled = s != end;
      sp.parse_failed = wp.parse_failed;
    }
    result.windows.push_back(std::move(wp));
  }

  const int last_full_end = (duration / T) * T - 1;
  if (last_full_end < duration - 1) {
    const WindowPrediction& prev = result.windows.back();
    WindowPrediction carry;
    carry.end_second = duration - 1;
    carry.label = prev.label;
    carry.carried = true;
    carry.parse_failed = prev.parse_failed;
    carry.reasoning = "carried forward from the window ending at second " +
                      std::to_string(prev.end_second);
    for (int s = last_full_end + 1; s < duration; ++s) {
      auto& sp = result.seconds[size_t(s)];
      sp.second = s;
      sp.label = carry.label;
      sp.carried = true;
      sp.parse_failed = carry.parse_failed;
    }
    result.windows.push_back(std::move(carry));
  }
  return result;
}

std::string predictions_to_jsonl(const std::vector<PredictionLogEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    json j;
    j["user"] = e.user;
    j["task"] = to_string(e.task);
    j["window_end"] = e.window_end;
    j["label"] = to_string(e.label);
    j["reasoning"] = e.reasoning;
    j["latency"] = e.latency_seconds;
    j["backend"] = e.backend;
    if (e.carried) j["carried"] = true;
    if (e.parse_failed) j["parse_failed"] = true;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<PredictionLogEntry> predictions_from_jsonl(const std::string& text) {
  std::vector<PredictionLogEntry> out;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad prediction record: ") + e.what());
    }
    PredictionLogEntry e;
    e.user = j.at("user").get<std::string>();
    e.task = parse_task(j.at("task").get<std::string>());
    e.window_end = j.at("window_end").get<int>();
    e.label = parse_level(j.at("label").get<std::string>());
    e.reasoning = j.value("reasoning", "");
    e.latency_seconds = j.value("latency", 0.0);
    e.backend = j.value("backend", "");
    e.carried = j.value("carried", false);
    e.parse_failed = j.value("parse_failed", false);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<SecondPrediction> expand_to_seconds(
    const std::vector<WindowPrediction>& windows) {
  std::vector<SecondPrediction> seconds;
  if (windows.empty()) return seconds;
  int prev_end = -1;
  for (const auto& w : windows) {
    for (int s = prev_end + 1; s <= w.end_second; ++s) {
      SecondPrediction sp;
      sp.second = s;
      sp.label = w.label;
      sp.backfilled = !w.carried && s != w.end_second;
      sp.carried = w.carried;
      sp.parse_failed = w.parse_failed;
      seconds.push_back(sp);
    }
    prev_end = w.end_second;
  }
  return seconds;
}

}  // namespace gazeload
