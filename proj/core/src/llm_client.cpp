#include "gazeload/llm_client.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "gazeload/error.hpp"

namespace gazeload {

using nlohmann::json;

LlmResult invoke(LlmClient& client, const PromptPair& prompts, int max_attempts,
                 double temperature) {
  if (max_attempts < 1) max_attempts = 1;
  const auto start = std::chrono::steady_clock::now();
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    try {
      LlmResult result;
      result.text = client.request(prompts.system_text, prompts.user_text, temperature);
      result.attempts = attempt;
      result.latency_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return result;
    } catch (const BackendError& err) {
      if (!err.retryable()) throw;
      last_error = err.what();
    }
  }
  throw BackendError("exhausted " + std::to_string(max_attempts) +
                         " attempts; last error: " + last_error,
                     /*retryable=*/false);
}

namespace {

class RemoteLlmClient final : public LlmClient {
public:
  explicit RemoteLlmClient(RemoteClientConfig config) : config_(std::move(config)) {}

  std::string name() const override { return "remote:" + config_.model; }

  std::string request(const std::string& system_text, const std::string& user_text,
                      double temperature) override {
    httplib::Client http(config_.base_url);
    http.set_connection_timeout(config_.timeout_ms / 1000,
                                (config_.timeout_ms % 1000) * 1000);
    http.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    json body = {
        {"model", config_.model},
        {"messages",
         {{{"role", "system"}, {"content", system_text}},
          {{"role", "user"}, {"content", user_text}}}},
        {"temperature", temperature},
    };

    auto res = http.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      throw BackendError("transport failure talking to " + config_.base_url + ": " +
                             httplib::to_string(res.error()),
                         /*retryable=*/true);
    }
    if (res->status == 401 || res->status == 403) {
      throw BackendError("authentication rejected (" + std::to_string(res->status) +
                             ") by " + config_.base_url,
                         /*retryable=*/false);
    }
    if (res->status == 429 || res->status >= 500) {
      throw BackendError("service unavailable (" + std::to_string(res->status) + ")",
                         /*retryable=*/true);
    }
    if (res->status != 200) {
      throw BackendError("unexpected status " + std::to_string(res->status),
                         /*retryable=*/false);
    }
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion payload: ") + e.what(),
                         /*retryable=*/false);
    }
  }

private:
  RemoteClientConfig config_;
};

}  // namespace

std::unique_ptr<LlmClient> make_remote_client(const RemoteClientConfig& config) {
  return std::make_unique<RemoteLlmClient>(config);
}

}  // namespace gazeload
