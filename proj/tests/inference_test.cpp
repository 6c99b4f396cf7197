#include <doctest.h>

#include <array>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "gazeload/error.hpp"
#include "gazeload/inference.hpp"
#include "gazeload/rng.hpp"

namespace {

using namespace gazeload;

FeatureTable make_table(int window, double fill = 0.0) {
  FeatureTable t;
  t.user_id = "probe";
  t.task = TaskId::Reading;
  t.end_second = window - 1;
  t.window = window;
  t.cells.assign(std::size_t(kFeatureCount) * std::size_t(window), fill);
  t.column_missing.assign(std::size_t(window), 0);
  return t;
}

void set_row(FeatureTable& t, int feature, double value) {
  for (int c = 0; c < t.window; ++c) t.cell(feature, c) = value;
}

RuleEntry entry(int feature, int rank, char direction = '+', double lo = -0.5,
                double hi = 0.5) {
  return RuleEntry{feature, rank, direction, lo, hi};
}

GuidanceRule single_pupil_rule() {
  GuidanceRule rule;
  rule.task = TaskId::Reading;
  rule.entries = {entry(kAvgPupilSize, 1)};
  rule.prompt_text = "pupil rule";
  rule.provenance = "fallback";
  return rule;
}

Level mock_label(const GuidanceRule& rule, const std::vector<ReferenceExample>& refs,
                 const FeatureTable& table) {
  const auto parsed = parse_response(mock_predict(rule, nullptr, refs, table));
  REQUIRE(parsed.has_value());
  return parsed->label;
}

// Independent reimplementation of the documented arbitration, used to
// cross-check the mock on random inputs.
Level arbitration_oracle(const GuidanceRule& rule,
                         const std::vector<ReferenceExample>& refs,
                         const FeatureTable& table) {
  auto mean_of = [](const FeatureTable& t, int k) {
    double s = 0.0;
    for (int c = 0; c < t.window; ++c) s += t.cell(k, c);
    return s / t.window;
  };
  auto band_of = [](const RuleEntry& e, double v) {
    if (e.direction == '+') {
      return v < e.cut_low ? Level::Low : (v > e.cut_high ? Level::High : Level::Moderate);
    }
    return v < e.cut_low ? Level::High : (v > e.cut_high ? Level::Low : Level::Moderate);
  };
  std::array<double, 3> votes{};
  std::vector<Level> bands;
  for (const auto& e : rule.entries) {
    bands.push_back(band_of(e, mean_of(table, e.feature)));
    votes[std::size_t(int(bands.back()))] += 1.0 / e.rank;
  }
  double top = votes[0];
  for (double v : votes) top = std::max(top, v);
  Level provisional = Level::Low;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (votes[std::size_t(int(bands[i]))] == top) {
      provisional = bands[i];
      break;
    }
  }
  auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  const int top_feature = rule.entries.front().feature;
  const int qs = sign(mean_of(table, top_feature));
  std::array<int, 3> counts{};
  for (const auto& r : refs) {
    if (sign(mean_of(*r.table, top_feature)) == qs) ++counts[std::size_t(int(r.label))];
  }
  int best = 0;
  for (int c : counts) best = std::max(best, c);
  int n_at_best = 0;
  Level winner = Level::Low;
  for (int l = 0; l < 3; ++l) {
    if (best > 0 && counts[std::size_t(l)] == best) {
      ++n_at_best;
      winner = Level(l);
    }
  }
  if (n_at_best == 1 && best >= 2 && winner != provisional) return winner;
  return provisional;
}

// Scripted chat backend shared by the predict_window and invoke tests.
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
    if (reply == "<retryable>") throw BackendError("scripted hiccup", true);
    if (reply == "<fatal>") throw BackendError("scripted auth failure", false);
    return reply;
  }

  int calls = 0;
  std::string last_system;
  std::string last_user;
  double last_temperature = -1.0;

private:
  std::vector<std::string> replies_;
};

FeatureSeries z_series(const std::vector<double>& pupil_z) {
  FeatureSeries s;
  s.user_id = "u01";
  s.task = TaskId::Reading;
  s.zscored = true;
  for (std::size_t i = 0; i < pupil_z.size(); ++i) {
    FeatureVector v;
    v.second = int(i);
    v.values[kAvgPupilSize] = pupil_z[i];
    s.seconds.push_back(v);
  }
  return s;
}

}  // namespace

TEST_CASE("responses parse leniently but never invent a label") {
  auto p = parse_response("Cognitive Load: High\nReasoning: pupil is elevated.\n");
  REQUIRE(p.has_value());
  CHECK(p->label == Level::High);
  CHECK(p->reasoning == "pupil is elevated.");

  p = parse_response("Summary first.\n**Cognitive Load:** [Moderate]\nReasoning: x\n");
  REQUIRE(p.has_value());
  CHECK(p->label == Level::Moderate);

  p = parse_response("cognitive load: low");
  REQUIRE(p.has_value());
  CHECK(p->label == Level::Low);
  CHECK(p->reasoning.empty());

  p = parse_response(
      "Cognitive Load: High\nReasoning: first line\nsecond line\n\nignored tail\n");
  REQUIRE(p.has_value());
  CHECK(p->reasoning == "first line\nsecond line");

  CHECK(!parse_response("").has_value());
  CHECK(!parse_response("Load: High").has_value());
  CHECK(!parse_response("Cognitive Load is High").has_value());
  CHECK(!parse_response("Cognitive Load: extreme\n").has_value());
}

TEST_CASE("mock arbitration: rank-weighted voting") {
  FeatureTable table = make_table(5);

  GuidanceRule rule = single_pupil_rule();
  set_row(table, kAvgPupilSize, 1.0);
  CHECK(mock_label(rule, {}, table) == Level::High);
  set_row(table, kAvgPupilSize, -1.0);
  CHECK(mock_label(rule, {}, table) == Level::Low);
  set_row(table, kAvgPupilSize, 0.2);
  CHECK(mock_label(rule, {}, table) == Level::Moderate);

  // Rank 1 outweighs ranks 2 and 3 combined (1 > 1/2 + 1/3).
  rule.entries = {entry(kAvgPupilSize, 1), entry(kFixDur, 2), entry(kSacAmp, 3)};
  set_row(table, kAvgPupilSize, 1.0);
  set_row(table, kFixDur, -1.0);
  set_row(table, kSacAmp, -1.0);
  CHECK(mock_label(rule, {}, table) == Level::High);

  // A '-' entry inverts its band.
  rule.entries = {entry(kBlinkCount, 1, '-')};
  set_row(table, kBlinkCount, 1.0);
  CHECK(mock_label(rule, {}, table) == Level::Low);

  CHECK_THROWS_AS(mock_predict(GuidanceRule{}, nullptr, {}, table), InputError);
}

TEST_CASE("mock arbitration: exact vote ties go to the best-ranked entry") {
  // weight(rank 2) = 1/2 and weight(rank 3) + weight(rank 6) rounds to
  // exactly 1/2, so High and Low tie; the rank-2 entry's band must win.
  GuidanceRule rule;
  rule.task = TaskId::Reading;
  rule.entries = {entry(kFixDur, 2), entry(kSacDur, 3), entry(kSacAmp, 6)};
  FeatureTable table = make_table(5);
  set_row(table, kFixDur, 1.0);   // High, weight 1/2
  set_row(table, kSacDur, -1.0);  // Low, weight 1/3
  set_row(table, kSacAmp, -1.0);  // Low, weight 1/6
  CHECK(mock_label(rule, {}, table) == Level::High);

  // Mirrored bands flip the winner with the same tie.
  set_row(table, kFixDur, -1.0);
  set_row(table, kSacDur, 1.0);
  set_row(table, kSacAmp, 1.0);
  CHECK(mock_label(rule, {}, table) == Level::Low);
}

TEST_CASE("mock arbitration: reference validation and override") {
  const GuidanceRule rule = single_pupil_rule();
  FeatureTable query = make_table(5);
  set_row(query, kAvgPupilSize, 1.0);  // provisional High, top-feature sign +

  FeatureTable agree_a = make_table(5);
  set_row(agree_a, kAvgPupilSize, 0.4);
  FeatureTable agree_b = make_table(5);
  set_row(agree_b, kAvgPupilSize, 2.0);
  FeatureTable conflict = make_table(5);
  set_row(conflict, kAvgPupilSize, -1.0);

  // Two validated references with a unique majority override the vote.
  std::vector<ReferenceExample> refs = {{&agree_a, Level::Moderate},
                                        {&agree_b, Level::Moderate}};
  CHECK(mock_label(rule, refs, query) == Level::Moderate);
  const std::string text = mock_predict(rule, nullptr, refs, query);
  CHECK(text.find("override the provisional High") != std::string::npos);

  // One validated reference is not enough.
  refs = {{&agree_a, Level::Moderate}};
  CHECK(mock_label(rule, refs, query) == Level::High);

  // A reference with the opposite dominant-feature trend is excluded.
  refs = {{&agree_a, Level::Moderate}, {&conflict, Level::Moderate}};
  CHECK(mock_label(rule, refs, query) == Level::High);
  CHECK(mock_predict(rule, nullptr, refs, query).find("excluded example 2") !=
        std::string::npos);

  // A tied majority (2 vs 2) does not override.
  FeatureTable agree_c = make_table(5);
  set_row(agree_c, kAvgPupilSize, 0.9);
  FeatureTable agree_d = make_table(5);
  set_row(agree_d, kAvgPupilSize, 1.4);
  refs = {{&agree_a, Level::Moderate},
          {&agree_b, Level::Moderate},
          {&agree_c, Level::Low},
          {&agree_d, Level::Low}};
  CHECK(mock_label(rule, refs, query) == Level::High);

  // Agreement with the provisional label is reported, not an override.
  refs = {{&agree_a, Level::High}, {&agree_b, Level::High}};
  CHECK(mock_label(rule, refs, query) == Level::High);
  CHECK(mock_predict(rule, nullptr, refs, query)
            .find("consistent with the provisional") != std::string::npos);
}

TEST_CASE("mock output agrees with an independent oracle on random inputs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    GuidanceRule rule;
    rule.task = TaskId::Gaming;
    std::vector<int> features = {0, 1, 2, 3, 4, 5, 6};
    rng.shuffle(features);
    for (int r = 0; r < 3; ++r) {
      const char dir = rng.uniform() < 0.5 ? '+' : '-';
      rule.entries.push_back(entry(features[std::size_t(r)], r + 1, dir, -0.4, 0.6));
    }
    auto random_table = [&]() {
      FeatureTable t = make_table(5);
      for (double& c : t.cells) c = rng.uniform() * 4.0 - 2.0;
      return t;
    };
    const FeatureTable query = random_table();
    std::vector<FeatureTable> ref_tables;
    for (int i = 0; i < int(rng.below(5)); ++i) ref_tables.push_back(random_table());
    std::vector<ReferenceExample> refs;
    for (const auto& rt : ref_tables) {
      refs.push_back({&rt, Level(int(rng.below(3)))});
    }
    CAPTURE(trial);
    CHECK(mock_label(rule, refs, query) == arbitration_oracle(rule, refs, query));
  }
}

TEST_CASE("invoke retries transport failures but not auth failures") {
  const PromptPair prompts{"s", "u"};

  ScriptedClient flaky({"<retryable>", "<retryable>", "ok"});
  const LlmResult r = invoke(flaky, prompts, 3);
  CHECK(r.text == "ok");
  CHECK(r.attempts == 3);
  CHECK(r.latency_seconds >= 0.0);

  ScriptedClient fatal({"<fatal>", "unreached"});
  CHECK_THROWS_AS(invoke(fatal, prompts, 3), BackendError);
  CHECK(fatal.calls == 1);

  ScriptedClient hopeless({"<retryable>", "<retryable>", "<retryable>"});
  try {
    invoke(hopeless, prompts, 3);
    FAIL("expected BackendError");
  } catch (const BackendError& err) {
    CHECK(!err.retryable());
    CHECK(std::string(err.what()).find("exhausted 3 attempts") != std::string::npos);
  }
  CHECK(hopeless.calls == 3);
}

TEST_CASE("predict_window: mock path, retrieval plumbing, remote retry") {
  const GuidanceRule rule = single_pupil_rule();
  FeatureTable table = make_table(5);
  set_row(table, kAvgPupilSize, 1.0);

  SessionContext ctx;
  ctx.rule = &rule;

  SUBCASE("mock backend without retrieval") {
    const WindowPrediction wp = predict_window(table, ctx);
    CHECK(wp.label == Level::High);
    CHECK(wp.attempts == 1);
    CHECK(!wp.parse_failed);
    CHECK(wp.refs_used == 0);
    CHECK(!wp.retrieval_fallback);
    CHECK(wp.end_second == 4);
    CHECK(!wp.reasoning.empty());
  }

  SUBCASE("retrieved references flow into the mock's arbitration") {
    FeatureTable near_a = make_table(5);
    near_a.user_id = "u1";
    set_row(near_a, kAvgPupilSize, 0.9);
    FeatureTable near_b = make_table(5);
    near_b.user_id = "u2";
    set_row(near_b, kAvgPupilSize, 1.1);
    auto record = [](const FeatureTable& t, Level label) {
      RetrievalRecord r;
      r.user_id = t.user_id;
      r.task = t.task;
      r.window_id = t.end_second;
      r.profile = "Restless";
      r.label = label;
      r.table = t;
      r.descriptor = descriptor(t);
      return r;
    };
    const RetrievalDb db = RetrievalDb::build(
        {record(near_a, Level::Moderate), record(near_b, Level::Moderate)});
    ctx.db = &db;

    const WindowPrediction wp = predict_window(table, ctx);
    CHECK(wp.refs_used == 2);
    CHECK(wp.label == Level::Moderate);  // two agreeing validated references
    CHECK(!wp.retrieval_fallback);       // null profile matches any bucket

    UserProfile profile;
    profile.profile_name = "High-Reactor";  // no such bucket in the db
    ctx.profile = &profile;
    const WindowPrediction fb = predict_window(table, ctx);
    CHECK(fb.retrieval_fallback);
    CHECK(fb.refs_used == 2);
  }

  SUBCASE("a remote backend gets one re-invoke before a parse failure") {
    ScriptedClient garbage({"nonsense", "still nonsense"});
    ctx.client = &garbage;
    const WindowPrediction wp = predict_window(table, ctx);
    CHECK(garbage.calls == 2);
    CHECK(wp.parse_failed);
    CHECK(wp.attempts == 2);
    CHECK(wp.reasoning == "unparseable model output after retry");

    ScriptedClient second_try({"nonsense", "Cognitive Load: Low\nReasoning: r.\n"});
    ctx.client = &second_try;
    const WindowPrediction ok = predict_window(table, ctx);
    CHECK(ok.label == Level::Low);
    CHECK(!ok.parse_failed);
    CHECK(ok.attempts == 2);
  }

  SUBCASE("generic guidance swaps the prompt slot but not the arbitration") {
    ScriptedClient probe({"Cognitive Load: Low\nReasoning: r.\n"});
    ctx.client = &probe;
    ctx.generic_guidance = true;
    predict_window(table, ctx);
    CHECK(probe.last_user.find("No task-specific rule available.") != std::string::npos);
    CHECK(probe.last_user.find("pupil rule") == std::string::npos);

    ScriptedClient probe2({"Cognitive Load: Low\nReasoning: r.\n"});
    ctx.client = &probe2;
    ctx.generic_guidance = false;
    predict_window(table, ctx);
    CHECK(probe2.last_user.find("pupil rule") != std::string::npos);
  }

  SUBCASE("a missing rule is an input error") {
    SessionContext bare;
    CHECK_THROWS_AS(predict_window(table, bare), InputError);
  }
}

TEST_CASE("sessions tile whole windows and carry the trailing partial") {
  const GuidanceRule rule = single_pupil_rule();
  SessionContext ctx;
  ctx.rule = &rule;
  ctx.window = 5;

  SUBCASE("an exact multiple produces no carried window") {
    const FeatureSeries series =
        z_series({1, 1, 1, 1, 1, -1, -1, -1, -1, -1});  // 10 seconds
    const SessionResult r = run_session(series, ctx);
    REQUIRE(r.windows.size() == 2);
    CHECK(r.windows[0].end_second == 4);
    CHECK(r.windows[0].label == Level::High);
    CHECK(r.windows[1].end_second == 9);
    CHECK(r.windows[1].label == Level::Low);
    CHECK(!r.windows[0].carried);
    CHECK(!r.windows[1].carried);

    REQUIRE(r.seconds.size() == 10);
    for (int s = 0; s < 5; ++s) {
      CHECK(r.seconds[std::size_t(s)].label == Level::High);
      CHECK(r.seconds[std::size_t(s)].backfilled == (s != 4));
      CHECK(!r.seconds[std::size_t(s)].carried);
    }
    for (int s = 5; s < 10; ++s) CHECK(r.seconds[std::size_t(s)].label == Level::Low);
  }

  SUBCASE("a trailing partial window repeats the last label without a call") {
    const FeatureSeries series =
        z_series({1, 1, 1, 1, 1, -1, -1, -1, -1, -1, 9, 9});  // 12 seconds
    const SessionResult r = run_session(series, ctx);
    REQUIRE(r.windows.size() == 3);
    CHECK(r.windows[2].end_second == 11);
    CHECK(r.windows[2].carried);
    CHECK(r.windows[2].label == Level::Low);  // copied, not recomputed
    CHECK(r.windows[2].attempts == 0);
    CHECK(r.windows[2].reasoning.find("carried forward") != std::string::npos);
    CHECK(r.seconds[10].carried);
    CHECK(r.seconds[11].carried);
    CHECK(r.seconds[11].label == Level::Low);
    CHECK(!r.seconds[11].backfilled);
  }

  SUBCASE("short recordings and degenerate windows are rejected") {
    CHECK_THROWS_WITH_AS(run_session(z_series({1, 1, 1, 1}), ctx),
                         doctest::Contains("shorter than window"), InputError);
    ctx.window = 0;
    CHECK_THROWS_AS(run_session(z_series({1, 1, 1, 1, 1}), ctx), InputError);
  }
}

TEST_CASE("window predictions expand to the seconds they cover") {
  WindowPrediction w1;
  w1.end_second = 4;
  w1.label = Level::High;
  WindowPrediction w2;
  w2.end_second = 9;
  w2.label = Level::Low;
  w2.parse_failed = true;
  WindowPrediction w3;
  w3.end_second = 11;
  w3.label = Level::Low;
  w3.carried = true;

  const auto seconds = expand_to_seconds({w1, w2, w3});
  REQUIRE(seconds.size() == 12);
  for (int s = 0; s <= 4; ++s) {
    CHECK(seconds[std::size_t(s)].second == s);
    CHECK(seconds[std::size_t(s)].label == Level::High);
    CHECK(seconds[std::size_t(s)].backfilled == (s != 4));
    CHECK(!seconds[std::size_t(s)].parse_failed);
  }
  for (int s = 5; s <= 9; ++s) {
    CHECK(seconds[std::size_t(s)].label == Level::Low);
    CHECK(seconds[std::size_t(s)].parse_failed);
  }
  for (int s = 10; s <= 11; ++s) {
    CHECK(seconds[std::size_t(s)].carried);
    CHECK(!seconds[std::size_t(s)].backfilled);
  }
  CHECK(expand_to_seconds({}).empty());
}

TEST_CASE("prediction logs round-trip through JSONL") {
  PredictionLogEntry a;
  a.user = "u01";
  a.task = TaskId::Gaming;
  a.window_end = 9;
  a.label = Level::Moderate;
  a.reasoning = "vote";
  a.latency_seconds = 0.25;
  a.backend = "mock";
  PredictionLogEntry b;
  b.user = "u02";
  b.task = TaskId::Audio;
  b.window_end = 14;
  b.label = Level::Low;
  b.backend = "carried";
  b.carried = true;
  b.parse_failed = true;

  const auto back = predictions_from_jsonl(predictions_to_jsonl({a, b}));
  REQUIRE(back.size() == 2);
  CHECK(back[0].user == "u01");
  CHECK(back[0].task == TaskId::Gaming);
  CHECK(back[0].window_end == 9);
  CHECK(back[0].label == Level::Moderate);
  CHECK(back[0].reasoning == "vote");
  CHECK(back[0].latency_seconds == 0.25);
  CHECK(back[0].backend == "mock");
  CHECK(!back[0].carried);
  CHECK(back[1].carried);
  CHECK(back[1].parse_failed);
  CHECK_THROWS_AS(predictions_from_jsonl("{nope"), ParseError);
}

TEST_CASE("the HTTP chat backend: payload, auth, retry classification") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  std::string seen_body;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                ++hits;
                seen_auth = req.get_header_value("Authorization");
                seen_body = req.body;
                res.set_content(
                    R"({"choices":[{"message":{"content":"Cognitive Load: High\nReasoning: remote."}}]})",
                    "application/json");
              });
  server.Post("/flaky/chat", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits == 1) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})",
                    "application/json");
  });
  server.Post("/denied/chat", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  server.Post("/broken/chat", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"unexpected\":true}", "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteClientConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.model = "test-model";
  cfg.api_key_env = "GAZELOAD_TEST_KEY";

  {
    setenv("GAZELOAD_TEST_KEY", "sk-unit", 1);
    auto client = make_remote_client(cfg);
    CHECK(client->name() == "remote:test-model");
    const std::string text = client->request("SYS", "USR", 0.5);
    CHECK(text == "Cognitive Load: High\nReasoning: remote.");
    CHECK(seen_auth == "Bearer sk-unit");
    const auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.5);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "SYS");
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(body["messages"][1]["content"] == "USR");

    // Without the environment variable no Authorization header is sent.
    unsetenv("GAZELOAD_TEST_KEY");
    client->request("SYS", "USR", 0.0);
    CHECK(seen_auth.empty());
  }

  {
    hits = 0;
    RemoteClientConfig flaky = cfg;
    flaky.path = "/flaky/chat";
    auto client = make_remote_client(flaky);
    const LlmResult r = invoke(*client, {"s", "u"}, 3);
    CHECK(r.text == "ok");
    CHECK(r.attempts == 2);  // one 503, one success
  }

  {
    hits = 0;
    RemoteClientConfig denied = cfg;
    denied.path = "/denied/chat";
    auto client = make_remote_client(denied);
    CHECK_THROWS_AS(invoke(*client, {"s", "u"}, 3), BackendError);
    CHECK(hits == 1);  // auth failures are not retried
  }

  {
    RemoteClientConfig broken = cfg;
    broken.path = "/broken/chat";
    auto client = make_remote_client(broken);
    try {
      client->request("s", "u", 0.0);
      FAIL("expected BackendError");
    } catch (const BackendError& err) {
      CHECK(!err.retryable());
      CHECK(std::string(err.what()).find("malformed completion payload") !=
            std::string::npos);
    }
  }

  {
    RemoteClientConfig gone = cfg;
    gone.base_url = "http://127.0.0.1:1";  // nothing listens here
    gone.timeout_ms = 500;
    auto client = make_remote_client(gone);
    try {
      client->request("s", "u", 0.0);
      FAIL("expected BackendError");
    } catch (const BackendError& err) {
      CHECK(err.retryable());
    }
  }

  server.stop();
  runner.join();
}
