#include "gazeload/config.hpp"

#include <charconv>

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

int parse_int(const std::string& value, const std::string& key) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  }
  return v;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  int line_no = 0;
  for (const std::string& raw : split_lines(text)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "data_dir") {
      cfg.data_dir = value;
    } else if (key == "rules_path") {
      cfg.rules_path = value;
    } else if (key == "profiles_path") {
      cfg.profiles_path = value;
    } else if (key == "db_path") {
      cfg.db_path = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "window") {
      cfg.window = parse_int(value, key);
    } else if (key == "k") {
      cfg.k = parse_int(value, key);
    } else if (key == "backend") {
      cfg.backend = value;
    } else if (key == "endpoint") {
      cfg.endpoint = value;
    } else if (key == "api_path") {
      cfg.api_path = value;
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "api_key_env") {
      cfg.api_key_env = value;
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key);
    } else if (key == "profile_seed") {
      cfg.profile_seed = parse_u64(value, key);
    } else if (key == "use_rules") {
      cfg.use_rules = parse_bool(value, key);
    } else if (key == "use_profiles") {
      cfg.use_profiles = parse_bool(value, key);
    } else if (key == "use_retrieval") {
      cfg.use_retrieval = parse_bool(value, key);
    } else if (key == "jobs") {
      cfg.jobs = parse_int(value, key);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (cfg.window < 1) throw ConfigError("window must be >= 1");
  if (cfg.k < 0) throw ConfigError("k must be >= 0");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.backend != "mock" && cfg.backend != "remote") {
    throw ConfigError("backend must be 'mock' or 'remote', got '" + cfg.backend + "'");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_file(path));
}

std::string run_config_to_text(const RunConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  kv("data_dir", cfg.data_dir);
  kv("rules_path", cfg.rules_path);
  kv("profiles_path", cfg.profiles_path);
  kv("db_path", cfg.db_path);
  kv("out_dir", cfg.out_dir);
  kv("window", std::to_string(cfg.window));
  kv("k", std::to_string(cfg.k));
  kv("backend", cfg.backend);
  kv("endpoint", cfg.endpoint);
  kv("api_path", cfg.api_path);
  kv("model", cfg.model);
  kv("api_key_env", cfg.api_key_env);
  kv("seed", std::to_string(cfg.seed));
  kv("profile_seed", std::to_string(cfg.profile_seed));
  kv("use_rules", cfg.use_rules ? "true" : "false");
  kv("use_profiles", cfg.use_profiles ? "true" : "false");
  kv("use_retrieval", cfg.use_retrieval ? "true" : "false");
  kv("jobs", std::to_string(cfg.jobs));
  return out;
}

}  // namespace gazeload
