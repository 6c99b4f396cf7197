#pragma once

#include <cstdint>
#include <string>

namespace gazeload {

// Flat key=value run configuration shared by the CLI subcommands. Lines
// starting with '#' and blank lines are ignored; unknown keys are an error.
struct RunConfig {
  std::string data_dir;
  std::string rules_path;
  std::string profiles_path;
  std::string db_path;
  std::string out_dir;
  int window = 5;
  int k = 3;
  std::string backend = "mock";  // mock | remote
  std::string endpoint = "http://127.0.0.1:8080";
  std::string api_path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "GAZELOAD_API_KEY";
  std::uint64_t seed = 7;
  std::uint64_t profile_seed = 42;
  bool use_rules = true;
  bool use_profiles = true;
  bool use_retrieval = true;
  int jobs = 1;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_text(const RunConfig& cfg);

}  // namespace gazeload
