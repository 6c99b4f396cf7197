#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "gazeload/config.hpp"
#include "gazeload/error.hpp"

namespace {

using namespace gazeload;

}  // namespace

TEST_CASE("run configs parse key=value lines with comments and padding") {
  const RunConfig cfg = parse_run_config(
      "# run setup\n"
      "\n"
      "data_dir = /tmp/cohort\n"
      "  window=10  \n"
      "k = 5\n"
      "backend = remote\n"
      "endpoint = http://example.test:9000\n"
      "model = tiny\n"
      "seed = 123\n"
      "use_profiles = off\n"
      "jobs = 4\n");
  CHECK(cfg.data_dir == "/tmp/cohort");
  CHECK(cfg.window == 10);
  CHECK(cfg.k == 5);
  CHECK(cfg.backend == "remote");
  CHECK(cfg.endpoint == "http://example.test:9000");
  CHECK(cfg.model == "tiny");
  CHECK(cfg.seed == 123);
  CHECK(!cfg.use_profiles);
  CHECK(cfg.use_rules);  // untouched keys keep their defaults
  CHECK(cfg.jobs == 4);

  const RunConfig defaults = parse_run_config("");
  CHECK(defaults.window == 5);
  CHECK(defaults.backend == "mock");
  CHECK(defaults.api_key_env == "GAZELOAD_API_KEY");
}

TEST_CASE("run config validation rejects malformed input") {
  CHECK_THROWS_WITH_AS(parse_run_config("window 5\n"), doctest::Contains("key=value"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("windw = 5\n"), doctest::Contains("unknown key"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("window = five\n"),
                       doctest::Contains("expected an integer"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("use_rules = maybe\n"),
                       doctest::Contains("expected a boolean"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("seed = -1\n"),
                       doctest::Contains("unsigned"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("window = 0\n"),
                       doctest::Contains("window must be >= 1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("k = -2\n"), doctest::Contains("k must be >= 0"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("jobs = 0\n"),
                       doctest::Contains("jobs must be >= 1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config("backend = local\n"),
                       doctest::Contains("'mock' or 'remote'"), ConfigError);
}

TEST_CASE("run configs round-trip through their text form") {
  RunConfig cfg;
  cfg.data_dir = "data";
  cfg.rules_path = "rules.jsonl";
  cfg.profiles_path = "profiles.jsonl";
  cfg.db_path = "db.jsonl";
  cfg.out_dir = "out";
  cfg.window = 7;
  cfg.k = 4;
  cfg.backend = "remote";
  cfg.endpoint = "http://127.0.0.1:9999";
  cfg.api_path = "/chat";
  cfg.model = "m";
  cfg.api_key_env = "KEY_ENV";
  cfg.seed = 99;
  cfg.profile_seed = 1234;
  cfg.use_rules = false;
  cfg.use_profiles = true;
  cfg.use_retrieval = false;
  cfg.jobs = 8;

  const std::string text = run_config_to_text(cfg);
  const RunConfig back = parse_run_config(text);
  CHECK(back.data_dir == cfg.data_dir);
  CHECK(back.rules_path == cfg.rules_path);
  CHECK(back.profiles_path == cfg.profiles_path);
  CHECK(back.db_path == cfg.db_path);
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.window == cfg.window);
  CHECK(back.k == cfg.k);
  CHECK(back.backend == cfg.backend);
  CHECK(back.endpoint == cfg.endpoint);
  CHECK(back.api_path == cfg.api_path);
  CHECK(back.model == cfg.model);
  CHECK(back.api_key_env == cfg.api_key_env);
  CHECK(back.seed == cfg.seed);
  CHECK(back.profile_seed == cfg.profile_seed);
  CHECK(back.use_rules == cfg.use_rules);
  CHECK(back.use_profiles == cfg.use_profiles);
  CHECK(back.use_retrieval == cfg.use_retrieval);
  CHECK(back.jobs == cfg.jobs);

  // Text form stays stable under a second round.
  CHECK(run_config_to_text(back) == text);
}

TEST_CASE("run configs load from disk") {
  const std::string path = "config_test_tmp.cfg";
  {
    std::ofstream out(path);
    out << "window = 9\nmodel = disk\n";
  }
  const RunConfig cfg = load_run_config(path);
  CHECK(cfg.window == 9);
  CHECK(cfg.model == "disk");
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_run_config("this-file-does-not-exist.cfg"), Error);
}
