#pragma once

#include <memory>
#include <string>

namespace gazeload {

struct PromptPair {
  std::string system_text;
  std::string user_text;
};

// One chat exchange with a completion service. Implementations perform a
// single attempt per request() call and throw BackendError on failure;
// retrying is the caller's job (see invoke).
class LlmClient {
public:
  virtual ~LlmClient() = default;
  virtual std::string name() const = 0;
  virtual std::string request(const std::string& system_text,
                              const std::string& user_text, double temperature) = 0;
};

struct LlmResult {
  std::string text;
  double latency_seconds = 0.0;
  int attempts = 1;
};

// Sends the prompt pair, measuring wall-clock latency across attempts.
// Retryable failures (timeouts, transport, 5xx/429) are retried up to
// max_attempts total; non-retryable failures (auth) propagate immediately.
LlmResult invoke(LlmClient& client, const PromptPair& prompts,
                 int max_attempts = 3, double temperature = 0.0);

struct RemoteClientConfig {
  std::string base_url = "http://localhost:8080";
  std::string path = "/v1/chat/completions";
  std::string model = "default";
  std::string api_key_env = "GAZELOAD_API_KEY";  // Bearer token source
  int timeout_ms = 30000;
};

// Chat-completions HTTP backend. Sends {model, messages:[system,user],
// temperature} and extracts choices[0].message.content.
std::unique_ptr<LlmClient> make_remote_client(const RemoteClientConfig& config);

}  // namespace gazeload
