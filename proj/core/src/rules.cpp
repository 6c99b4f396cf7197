#include "gazeload/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"
#include "gazeload/llm_client.hpp"

namespace gazeload {

using nlohmann::json;

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double pos = p * double(values.size() - 1);
  const size_t i = size_t(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - double(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

std::string GroupedStats::digest() const {
  std::string blob = to_string(task);
  char buf[160];
  for (int f = 0; f < kFeatureCount; ++f) {
    for (int l = 0; l < 3; ++l) {
      const auto& g = stats[size_t(f)][size_t(l)];
      std::snprintf(buf, sizeof(buf), "|%.9g,%.9g,%.9g,%.9g,%.9g,%lld", g.mean,
                    g.stddev, g.median, g.q25, g.q75, static_cast<long long>(g.count));
      blob += buf;
    }
  }
  return hex64(fnv1a64(blob));
}

GroupedStats grouped_stats(const std::vector<FeatureVector>& zscored_seconds,
                           const std::vector<Level>& labels, TaskId task) {
  if (zscored_seconds.size() != labels.size()) {
    throw InputError("feature/label length mismatch: " +
                     std::to_string(zscored_seconds.size()) + " vs " +
                     std::to_string(labels.size()));
  }
  GroupedStats out;
  out.task = task;
  for (int l = 0; l < 3; ++l) {
    std::vector<size_t> members;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (int(labels[i]) == l) members.push_back(i);
    }
    if (members.empty()) {
      throw InputError(std::string("no samples for level ") + to_string(Level(l)) +
                       " in task " + to_string(task));
    }
    std::vector<double> column(members.size());
    for (int f = 0; f < kFeatureCount; ++f) {
      double sum = 0.0;
      for (size_t i = 0; i < members.size(); ++i) {
        column[i] = zscored_seconds[members[i]].values[size_t(f)];
        sum += column[i];
      }
      GroupStat g;
      g.count = std::int64_t(members.size());
      g.mean = sum / double(members.size());
      double sq = 0.0;
      for (double v : column) sq += (v - g.mean) * (v - g.mean);
      g.stddev = std::sqrt(sq / double(members.size()));
      g.median = quantile(column, 0.5);
      g.q25 = quantile(column, 0.25);
      g.q75 = quantile(column, 0.75);
      out.stats[size_t(f)][size_t(l)] = g;
    }
  }
  return out;
}

namespace {

double separation_score(const GroupedStats& stats, int feature) {
  const GroupStat& lo = stats.at(feature, Level::Low);
  const GroupStat& hi = stats.at(feature, Level::High);
  const double nl = double(lo.count), nh = double(hi.count);
  const double pooled_var =
      (nl * lo.stddev * lo.stddev + nh * hi.stddev * hi.stddev) / (nl + nh);
  const double pooled = std::sqrt(pooled_var);
  const double gap = std::fabs(hi.mean - lo.mean);
  if (pooled < 1e-12) {
    return gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return gap / pooled;
}

void sort_ranked(std::vector<RankedFeature>& ranked) {
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.feature < b.feature;
                   });
}

}  // namespace

std::vector<RankedFeature> discriminative_rank(const GroupedStats& stats,
                                               double min_sep) {
  std::vector<RankedFeature> ranked;
  for (int f = 0; f < kFeatureCount; ++f) {
    const double s = separation_score(stats, f);
    if (s >= min_sep) ranked.push_back({f, s});
  }
  sort_ranked(ranked);
  return ranked;
}

Level evaluate_entry(const RuleEntry& entry, double value) {
  if (entry.direction == '+') {
    if (value < entry.cut_low) return Level::Low;
    if (value > entry.cut_high) return Level::High;
    return Level::Moderate;
  }
  if (value < entry.cut_low) return Level::High;
  if (value > entry.cut_high) return Level::Low;
  return Level::Moderate;
}

namespace {

std::string band_text(const RuleEntry& e) {
  const std::string lo = format_fixed(e.cut_low, 2);
  const std::string hi = format_fixed(e.cut_high, 2);
  const char* below = e.direction == '+' ? "Low" : "High";
  const char* above = e.direction == '+' ? "High" : "Low";
  return "z < " + lo + " -> " + below + "; " + lo + " <= z <= " + hi +
         " -> Moderate; z > " + hi + " -> " + std::string(above);
}

std::string render_prompt_text(TaskId task, const std::vector<RuleEntry>& entries) {
  std::string out = "Task: " + std::string(to_string(task)) + "\n";
  out += "Ranked discriminative gaze features with z-score thresholds:\n";
  const auto& names = feature_names();
  for (const auto& e : entries) {
    out += std::to_string(e.rank) + ". " + names[size_t(e.feature)] + " (direction " +
           e.direction + "): " + band_text(e) + "\n";
  }
  return out;
}

std::vector<RuleEntry> fallback_entries(const GroupedStats& stats,
                                        const std::vector<RankedFeature>& ranked) {
  std::vector<RuleEntry> entries;
  int rank = 1;
  for (const auto& rf : ranked) {
    const GroupStat& lo = stats.at(rf.feature, Level::Low);
    const GroupStat& mid = stats.at(rf.feature, Level::Moderate);
    const GroupStat& hi = stats.at(rf.feature, Level::High);
    RuleEntry e;
    e.feature = rf.feature;
    e.rank = rank++;
    e.direction = hi.mean >= lo.mean ? '+' : '-';
    double c1 = (lo.median + mid.median) / 2.0;
    double c2 = (mid.median + hi.median) / 2.0;
    if (c1 > c2) std::swap(c1, c2);
    e.cut_low = c1;
    e.cut_high = c2;
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

std::string rule_request_system_text() {
  return "You derive cognitive-load guidance rules from grouped gaze-feature "
         "statistics.\nRespond with one line per selected feature, most "
         "discriminative first, in exactly this format:\nRANK <n>: "
         "feature=<name> direction=<+|-> cutpoints=<low>,<high>\nUse only the "
         "listed feature names. The two cutpoints are z-scores splitting "
         "Low/Moderate/High bands.";
}

std::string rule_request_user_text(const GroupedStats& stats) {
  std::string out = "Task: " + std::string(to_string(stats.task)) + "\n";
  out += "Grouped z-score statistics (per feature and load level):\n";
  out += "feature,level,mean,std,median,q25,q75,count\n";
  const auto& names = feature_names();
  char buf[200];
  for (int f = 0; f < kFeatureCount; ++f) {
    for (int l = 0; l < 3; ++l) {
      const auto& g = stats.stats[size_t(f)][size_t(l)];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%lld\n",
                    names[size_t(f)].c_str(), to_string(Level(l)), g.mean, g.stddev,
                    g.median, g.q25, g.q75, static_cast<long long>(g.count));
      out += buf;
    }
  }
  return out;
}

std::optional<std::vector<RuleEntry>> parse_rule_entries(const std::string& text) {
  std::vector<RuleEntry> entries;
  std::vector<bool> seen(kFeatureCount, false);
  for (const auto& raw_line : split_lines(text)) {
    const std::string line = trim(raw_line);
    if (!starts_with_icase(line, "rank")) continue;
    RuleEntry e;
    const size_t colon = line.find(':');
    if (colon == std::string::npos) return std::nullopt;
    try {
      e.rank = std::stoi(trim(line.substr(4, colon - 4)));
    } catch (...) {
      return std::nullopt;
    }
    std::string rest = line.substr(colon + 1);
    auto grab = [&](const std::string& key) -> std::optional<std::string> {
      const size_t at = rest.find(key + "=");
      if (at == std::string::npos) return std::nullopt;
      size_t start = at + key.size() + 1;
      size_t end = rest.find(' ', start);
      if (end == std::string::npos) end = rest.size();
      return trim(rest.substr(start, end - start));
    };
    auto fname = grab("feature");
    auto dir = grab("direction");
    auto cuts = grab("cutpoints");
    if (!fname || !dir || !cuts) return std::nullopt;
    try {
      e.feature = feature_index(*fname);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (*dir != "+" && *dir != "-") return std::nullopt;
    e.direction = (*dir)[0];
    auto parts = split(*cuts, ',');
    if (parts.size() != 2) return std::nullopt;
    try {
      e.cut_low = std::stod(trim(parts[0]));
      e.cut_high = std::stod(trim(parts[1]));
    } catch (...) {
      return std::nullopt;
    }
    if (e.cut_low > e.cut_high) std::swap(e.cut_low, e.cut_high);
    if (seen[size_t(e.feature)]) return std::nullopt;
    seen[size_t(e.feature)] = true;
    entries.push_back(e);
  }
  if (entries.empty()) return std::nullopt;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RuleEntry& a, const RuleEntry& b) { return a.rank < b.rank; });
  for (size_t i = 0; i < entries.size(); ++i) entries[i].rank = int(i + 1);
  return entries;
}

GuidanceRule generate_rule(const GroupedStats& stats, LlmClient* client,
                           const RuleGenOptions& options) {
  GuidanceRule rule;
  rule.task = stats.task;
  rule.stats_digest = stats.digest();

  if (client != nullptr) {
    const std::string system = rule_request_system_text();
    const std::string user = rule_request_user_text(stats);
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::string reply;
      try {
        reply = client->request(system, user, options.temperature);
      } catch (const Error& err) {
        rule.warnings.push_back(std::string("rule client error: ") + err.what());
        break;
      }
      auto parsed = parse_rule_entries(reply);
      if (parsed) {
        rule.entries = std::move(*parsed);
        rule.provenance = "llm";
        rule.prompt_text = render_prompt_text(rule.task, rule.entries);
        return rule;
      }
      rule.warnings.push_back("unparseable rule output (attempt " +
                              std::to_string(attempt + 1) + ")");
    }
    rule.provenance = "fallback-after-llm-failure";
  } else {
    rule.provenance = "fallback";
  }

  auto ranked = discriminative_rank(stats, options.min_sep);
  if (ranked.empty()) {
    rule.warnings.push_back(
        "all features below min separation " + format_fixed(options.min_sep, 2) +
        "; falling back to top-3 by raw score");
    std::vector<RankedFeature> all;
    for (int f = 0; f < kFeatureCount; ++f) all.push_back({f, separation_score(stats, f)});
    sort_ranked(all);
    all.resize(3);
    ranked = all;
  }
  rule.entries = fallback_entries(stats, ranked);
  rule.prompt_text = render_prompt_text(rule.task, rule.entries);
  return rule;
}

GuidanceRule select_rule(const RuleStore& store, TaskId task,
                         std::optional<TaskId> transfer_from) {
  const TaskId wanted = transfer_from.value_or(task);
  for (const auto& rule : store.rules) {
    if (rule.task == wanted) {
      GuidanceRule out = rule;
      if (transfer_from && *transfer_from != task) {
        out.transfer_from = to_string(*transfer_from);
        out.task = task;
      }
      return out;
    }
  }
  std::string known;
  for (const auto& rule : store.rules) {
    if (!known.empty()) known += ", ";
    known += to_string(rule.task);
  }
  throw InputError("no rule for task " + std::string(to_string(wanted)) +
                   " (stored tasks: " + (known.empty() ? "none" : known) + ")");
}

std::string rules_to_jsonl(const RuleStore& store) {
  std::string out;
  const auto& names = feature_names();
  for (const auto& rule : store.rules) {
    json j;
    j["task"] = to_string(rule.task);
    j["provenance"] = rule.provenance;
    j["stats_digest"] = rule.stats_digest;
    if (!rule.transfer_from.empty()) j["transfer_from"] = rule.transfer_from;
    json entries = json::array();
    for (const auto& e : rule.entries) {
      entries.push_back({{"feature", names[size_t(e.feature)]},
                         {"rank", e.rank},
                         {"direction", std::string(1, e.direction)},
                         {"cutpoints", {e.cut_low, e.cut_high}}});
    }
    j["entries"] = entries;
    j["prompt_text"] = rule.prompt_text;
    j["warnings"] = rule.warnings;
    out += j.dump() + "\n";
  }
  return out;
}

RuleStore rules_from_jsonl(const std::string& text) {
  RuleStore store;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad rule record: ") + e.what());
    }
    GuidanceRule rule;
    rule.task = parse_task(j.at("task").get<std::string>());
    rule.provenance = j.value("provenance", "");
    rule.stats_digest = j.value("stats_digest", "");
    rule.transfer_from = j.value("transfer_from", "");
    rule.prompt_text = j.value("prompt_text", "");
    for (const auto& je : j.at("entries")) {
      RuleEntry e;
      e.feature = feature_index(je.at("feature").get<std::string>());
      e.rank = je.at("rank").get<int>();
      const std::string d = je.at("direction").get<std::string>();
      if (d != "+" && d != "-") throw ParseError("bad rule direction '" + d + "'");
      e.direction = d[0];
      e.cut_low = je.at("cutpoints").at(0).get<double>();
      e.cut_high = je.at("cutpoints").at(1).get<double>();
      rule.entries.push_back(e);
    }
    if (j.contains("warnings")) {
      for (const auto& w : j["warnings"]) rule.warnings.push_back(w.get<std::string>());
    }
    store.rules.push_back(std::move(rule));
  }
  return store;
}

}  // namespace gazeload
