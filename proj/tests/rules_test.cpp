#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gazeload/error.hpp"
#include "gazeload/llm_client.hpp"
#include "gazeload/rules.hpp"

namespace {

using namespace gazeload;

FeatureVector fv(int second, double value_for_all) {
  FeatureVector v;
  v.second = second;
  v.values.fill(value_for_all);
  return v;
}

// A grouped-stats table where only the listed features carry signal. Counts
// default to 2 so pooled spreads are well defined.
GroupedStats blank_stats(TaskId task = TaskId::Reading) {
  GroupedStats s;
  s.task = task;
  for (auto& row : s.stats) {
    for (auto& g : row) {
      g.count = 2;
      g.stddev = 1.0;
    }
  }
  return s;
}

void set_levels(GroupedStats& s, int feature, double lo_mean, double hi_mean,
                double lo_med, double mid_med, double hi_med, double stddev = 1.0) {
  auto& row = s.stats[std::size_t(feature)];
  row[0].mean = lo_mean;
  row[0].median = lo_med;
  row[0].stddev = stddev;
  row[1].median = mid_med;
  row[2].mean = hi_mean;
  row[2].median = hi_med;
  row[2].stddev = stddev;
}

// Scripted client: returns queued replies in order, throws when the queue
// holds an error marker.
class ScriptedClient : public LlmClient {
public:
  explicit ScriptedClient(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}
  std::string name() const override { return "scripted"; }
  std::string request(const std::string& system_text, const std::string& user_text,
                      double temperature) override {
    last_system = system_text;
    last_user = user_text;
    last_temperature = temperature;
    REQUIRE(calls < int(replies_.size()));
    const std::string reply = replies_[std::size_t(calls++)];
    if (reply == "<throw>") throw BackendError("scripted failure", true);
    return reply;
  }

  int calls = 0;
  std::string last_system;
  std::string last_user;
  double last_temperature = -1.0;

private:
  std::vector<std::string> replies_;
};

}  // namespace

TEST_CASE("quantile uses linear interpolation between order statistics") {
  CHECK(quantile({1.0, 2.0, 3.0}, 0.5) == 2.0);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.25) == 1.5);  // order-free
  CHECK(quantile({1.0, 2.0, 3.0}, 0.75) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 2.0, 3.0}, 1.0) == 3.0);
  CHECK(quantile({5.0}, 0.25) == 5.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK_THROWS_AS(quantile({}, 0.5), InputError);
}

TEST_CASE("grouped stats aggregate per feature and level") {
  std::vector<FeatureVector> seconds = {fv(0, 8.0), fv(1, 12.0), fv(2, 1.0),
                                        fv(3, 5.0), fv(4, 5.0), fv(5, 5.0)};
  std::vector<Level> labels = {Level::Low,  Level::Low,  Level::Moderate,
                               Level::High, Level::High, Level::High};
  const GroupedStats s = grouped_stats(seconds, labels, TaskId::Gaming);
  CHECK(s.task == TaskId::Gaming);
  for (int f = 0; f < kFeatureCount; ++f) {
    const GroupStat& lo = s.at(f, Level::Low);
    CHECK(lo.mean == 10.0);
    CHECK(lo.stddev == 2.0);  // population convention
    CHECK(lo.median == 10.0);
    CHECK(lo.q25 == 9.0);
    CHECK(lo.q75 == 11.0);
    CHECK(lo.count == 2);
    CHECK(s.at(f, Level::Moderate).count == 1);
    const GroupStat& hi = s.at(f, Level::High);
    CHECK(hi.mean == 5.0);
    CHECK(hi.stddev == 0.0);
    CHECK(hi.count == 3);
  }
  CHECK(!s.digest().empty());
  GroupedStats tweaked = s;
  tweaked.stats[0][0].mean += 1e-6;
  CHECK(tweaked.digest() != s.digest());

  // Every level must be represented.
  std::vector<Level> partial = {Level::Low, Level::Low,  Level::High,
                                Level::High, Level::High, Level::High};
  CHECK_THROWS_WITH_AS(grouped_stats(seconds, partial, TaskId::Reading),
                       doctest::Contains("Moderate"), InputError);
  seconds.pop_back();
  CHECK_THROWS_AS(grouped_stats(seconds, labels, TaskId::Reading), InputError);
}

TEST_CASE("separation ranking: scores, threshold, infinity, tie order") {
  GroupedStats s = blank_stats();
  // feature 0: gap 4, pooled std sqrt((2*1+2*1)/4) = 1 -> score 4
  set_levels(s, 0, 0.0, 4.0, 0.0, 2.0, 4.0);
  // feature 1: gap 0.2 -> below the 0.3 default threshold
  set_levels(s, 1, 0.0, 0.2, 0.0, 0.1, 0.2);
  // feature 2: zero spread, distinct means -> +infinity sentinel
  set_levels(s, 2, 0.0, 1.0, 0.0, 0.5, 1.0, 0.0);
  // feature 3: same score as feature 0 -> tie broken by feature order
  set_levels(s, 3, 1.0, 5.0, 1.0, 3.0, 5.0);
  // feature 4: unequal group spreads; pooled std = sqrt((2*1+2*9)/4)
  set_levels(s, 4, 0.0, 2.0, 0.0, 1.0, 2.0);
  s.stats[4][2].stddev = 3.0;

  const auto ranked = discriminative_rank(s);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].feature == 2);
  CHECK(std::isinf(ranked[0].score));
  CHECK(ranked[1].feature == 0);
  CHECK(ranked[1].score == 4.0);
  CHECK(ranked[2].feature == 3);
  CHECK(ranked[2].score == 4.0);
  CHECK(ranked[3].feature == 4);
  CHECK(ranked[3].score == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));

  // A permissive threshold admits feature 1 as well.
  CHECK(discriminative_rank(s, 0.1).size() == 5);
  // Zero spread with equal means is no signal, not infinity.
  GroupedStats flat = blank_stats();
  set_levels(flat, 5, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0);
  CHECK(discriminative_rank(flat).empty());
}

TEST_CASE("entry bands are direction-aware with inclusive moderate edges") {
  RuleEntry plus{kAvgPupilSize, 1, '+', -0.5, 0.5};
  CHECK(evaluate_entry(plus, -1.0) == Level::Low);
  CHECK(evaluate_entry(plus, -0.5) == Level::Moderate);
  CHECK(evaluate_entry(plus, 0.0) == Level::Moderate);
  CHECK(evaluate_entry(plus, 0.5) == Level::Moderate);
  CHECK(evaluate_entry(plus, 0.7) == Level::High);

  RuleEntry minus{kFixRatio, 2, '-', -0.5, 0.5};
  CHECK(evaluate_entry(minus, -1.0) == Level::High);
  CHECK(evaluate_entry(minus, -0.5) == Level::Moderate);
  CHECK(evaluate_entry(minus, 0.5) == Level::Moderate);
  CHECK(evaluate_entry(minus, 0.7) == Level::Low);
}

TEST_CASE("fallback rule: direction from means, cutpoints from medians") {
  GroupedStats s = blank_stats(TaskId::Reading);
  // feature 1 rises with load; feature 5 falls, with the stronger separation.
  set_levels(s, 1, -1.0, 1.0, -1.0, 0.0, 1.0);
  set_levels(s, 5, 2.0, -2.0, 1.0, 0.0, -1.0);

  const GuidanceRule rule = generate_rule(s);
  CHECK(rule.task == TaskId::Reading);
  CHECK(rule.provenance == "fallback");
  CHECK(rule.stats_digest == s.digest());
  CHECK(rule.transfer_from.empty());
  CHECK(rule.warnings.empty());
  REQUIRE(rule.entries.size() == 2);

  CHECK(rule.entries[0].feature == 5);
  CHECK(rule.entries[0].rank == 1);
  CHECK(rule.entries[0].direction == '-');
  // medians +1, 0, -1 -> midpoints +0.5 and -0.5, stored ascending
  CHECK(rule.entries[0].cut_low == -0.5);
  CHECK(rule.entries[0].cut_high == 0.5);

  CHECK(rule.entries[1].feature == 1);
  CHECK(rule.entries[1].rank == 2);
  CHECK(rule.entries[1].direction == '+');
  CHECK(rule.entries[1].cut_low == -0.5);
  CHECK(rule.entries[1].cut_high == 0.5);

  CHECK(rule.prompt_text ==
        "Task: reading\n"
        "Ranked discriminative gaze features with z-score thresholds:\n"
        "1. blink_count (direction -): z < -0.50 -> High; -0.50 <= z <= 0.50 -> "
        "Moderate; z > 0.50 -> Low\n"
        "2. sac_dur (direction +): z < -0.50 -> Low; -0.50 <= z <= 0.50 -> "
        "Moderate; z > 0.50 -> High\n");
}

TEST_CASE("all-weak stats fall back to the top three raw scores with a warning") {
  GroupedStats s = blank_stats();
  set_levels(s, 0, 0.0, 0.20, 0.0, 0.1, 0.2);
  set_levels(s, 3, 0.0, 0.15, 0.0, 0.075, 0.15);
  set_levels(s, 6, 0.0, 0.10, 0.0, 0.05, 0.10);
  const GuidanceRule rule = generate_rule(s);
  REQUIRE(rule.entries.size() == 3);
  CHECK(rule.entries[0].feature == 0);
  CHECK(rule.entries[1].feature == 3);
  CHECK(rule.entries[2].feature == 6);
  REQUIRE(rule.warnings.size() == 1);
  CHECK(rule.warnings[0].find("below min separation") != std::string::npos);
}

TEST_CASE("structured replies parse into ranked entries") {
  const auto entries = parse_rule_entries(
      "Here are the rules you asked for:\n"
      "RANK 1: feature=avg_pupil_size direction=+ cutpoints=-0.25,0.75\n"
      "rank 2: feature=fix_ratio direction=- cutpoints=1.5,-1.5\n"
      "Hope that helps!\n");
  REQUIRE(entries.has_value());
  REQUIRE(entries->size() == 2);
  CHECK((*entries)[0].feature == kAvgPupilSize);
  CHECK((*entries)[0].rank == 1);
  CHECK((*entries)[0].direction == '+');
  CHECK((*entries)[0].cut_low == -0.25);
  CHECK((*entries)[0].cut_high == 0.75);
  CHECK((*entries)[1].feature == kFixRatio);
  CHECK((*entries)[1].direction == '-');
  // Reversed cutpoints are normalized to ascending order.
  CHECK((*entries)[1].cut_low == -1.5);
  CHECK((*entries)[1].cut_high == 1.5);

  // Out-of-order ranks are sorted, then renumbered 1..n.
  const auto reordered = parse_rule_entries(
      "RANK 7: feature=sac_amp direction=+ cutpoints=0,1\n"
      "RANK 2: feature=fix_dur direction=- cutpoints=0,1\n");
  REQUIRE(reordered.has_value());
  CHECK((*reordered)[0].feature == kFixDur);
  CHECK((*reordered)[0].rank == 1);
  CHECK((*reordered)[1].feature == kSacAmp);
  CHECK((*reordered)[1].rank == 2);

  CHECK(!parse_rule_entries("").has_value());
  CHECK(!parse_rule_entries("no structured lines at all").has_value());
  CHECK(!parse_rule_entries("RANK 1: feature=bogus direction=+ cutpoints=0,1\n")
             .has_value());
  CHECK(!parse_rule_entries("RANK 1: feature=fix_dur direction=* cutpoints=0,1\n")
             .has_value());
  CHECK(!parse_rule_entries("RANK 1: feature=fix_dur direction=+ cutpoints=0\n")
             .has_value());
  CHECK(!parse_rule_entries(  // duplicated feature
             "RANK 1: feature=fix_dur direction=+ cutpoints=0,1\n"
             "RANK 2: feature=fix_dur direction=- cutpoints=0,1\n")
             .has_value());
}

TEST_CASE("client-backed generation: success, retry, and fallback") {
  GroupedStats s = blank_stats(TaskId::Gaming);
  set_levels(s, 2, -1.0, 1.0, -1.0, 0.0, 1.0);

  SUBCASE("a parseable reply wins on the first attempt") {
    ScriptedClient client(
        {"RANK 1: feature=sac_ratio direction=+ cutpoints=-0.4,0.4\n"});
    const GuidanceRule rule = generate_rule(s, &client);
    CHECK(client.calls == 1);
    CHECK(rule.provenance == "llm");
    REQUIRE(rule.entries.size() == 1);
    CHECK(rule.entries[0].feature == kSacRatio);
    CHECK(rule.warnings.empty());
    // The outgoing request carries the task and the grouped statistics table.
    CHECK(client.last_system.find("RANK <n>") != std::string::npos);
    CHECK(client.last_user.find("Task: gaming") != std::string::npos);
    CHECK(client.last_user.find("feature,level,mean,std,median,q25,q75,count") !=
          std::string::npos);
  }

  SUBCASE("one unparseable reply is retried") {
    ScriptedClient client(
        {"gibberish", "RANK 1: feature=sac_amp direction=- cutpoints=-1,1\n"});
    const GuidanceRule rule = generate_rule(s, &client);
    CHECK(client.calls == 2);
    CHECK(rule.provenance == "llm");
    REQUIRE(rule.entries.size() == 1);
    CHECK(rule.entries[0].feature == kSacAmp);
    CHECK(rule.warnings.size() == 1);
  }

  SUBCASE("two unparseable replies fall back deterministically") {
    ScriptedClient client({"gibberish", "more gibberish"});
    const GuidanceRule rule = generate_rule(s, &client);
    CHECK(client.calls == 2);
    CHECK(rule.provenance == "fallback-after-llm-failure");
    REQUIRE(rule.entries.size() == 1);
    CHECK(rule.entries[0].feature == 2);  // the deterministic ranking
    CHECK(rule.warnings.size() == 2);
  }

  SUBCASE("a client error falls back without a second attempt") {
    ScriptedClient client({"<throw>", "unreached"});
    const GuidanceRule rule = generate_rule(s, &client);
    CHECK(client.calls == 1);
    CHECK(rule.provenance == "fallback-after-llm-failure");
    REQUIRE(rule.entries.size() == 1);
    CHECK(rule.warnings.size() == 1);
  }

  SUBCASE("the configured temperature reaches the client") {
    ScriptedClient client({"RANK 1: feature=sac_amp direction=+ cutpoints=0,1\n"});
    RuleGenOptions opts;
    opts.temperature = 0.35;
    generate_rule(s, &client, opts);
    CHECK(client.last_temperature == 0.35);
  }
}

TEST_CASE("rule selection matches tasks exactly and tags transfers") {
  GroupedStats reading = blank_stats(TaskId::Reading);
  set_levels(reading, 0, -1.0, 1.0, -1.0, 0.0, 1.0);
  GroupedStats gaming = blank_stats(TaskId::Gaming);
  set_levels(gaming, 4, -1.0, 1.0, -1.0, 0.0, 1.0);

  RuleStore store;
  store.rules.push_back(generate_rule(reading));
  store.rules.push_back(generate_rule(gaming));

  const GuidanceRule direct = select_rule(store, TaskId::Gaming);
  CHECK(direct.task == TaskId::Gaming);
  CHECK(direct.entries[0].feature == 4);
  CHECK(direct.transfer_from.empty());

  const GuidanceRule moved = select_rule(store, TaskId::Audio, TaskId::Reading);
  CHECK(moved.task == TaskId::Audio);
  CHECK(moved.transfer_from == "reading");
  CHECK(moved.entries[0].feature == 0);

  CHECK_THROWS_WITH_AS(select_rule(store, TaskId::Audio),
                       doctest::Contains("audio"), InputError);
  CHECK_THROWS_WITH_AS(select_rule(store, TaskId::Audio),
                       doctest::Contains("reading"), InputError);
}

TEST_CASE("rule stores round-trip through JSONL") {
  GroupedStats s = blank_stats(TaskId::Audio);
  set_levels(s, 3, 1.0, -1.0, 0.75, 0.0, -0.75);
  GuidanceRule rule = generate_rule(s);
  rule.transfer_from = "reading";
  rule.warnings.push_back("synthetic warning");
  RuleStore store;
  store.rules.push_back(rule);

  const RuleStore back = rules_from_jsonl(rules_to_jsonl(store));
  REQUIRE(back.rules.size() == 1);
  const GuidanceRule& r = back.rules[0];
  CHECK(r.task == TaskId::Audio);
  CHECK(r.provenance == rule.provenance);
  CHECK(r.stats_digest == rule.stats_digest);
  CHECK(r.transfer_from == "reading");
  CHECK(r.prompt_text == rule.prompt_text);
  REQUIRE(r.entries.size() == rule.entries.size());
  CHECK(r.entries[0].feature == rule.entries[0].feature);
  CHECK(r.entries[0].direction == rule.entries[0].direction);
  CHECK(r.entries[0].cut_low == rule.entries[0].cut_low);
  CHECK(r.entries[0].cut_high == rule.entries[0].cut_high);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0] == "synthetic warning");

  CHECK_THROWS_AS(rules_from_jsonl("{not json"), ParseError);
}
