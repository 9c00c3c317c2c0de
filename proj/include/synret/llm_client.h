// Copyright 2026 The synret Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Chat-completions client for an OpenAI-compatible endpoint.
//
// Request:  POST <base_url>/chat/completions
//           Authorization: Bearer $<api_key_env>
//           {"model": ..., "messages": [{"role": "user", "content": ...}],
//            "temperature": ...}
// Response: choices[0].message.content
//
// Transport failures, 429 and 5xx are retried with exponential backoff
// (1s, 2s, 4s, ... with up to 25% jitter); other statuses fail at once.

#ifndef SYNRET_LLM_CLIENT_H_
#define SYNRET_LLM_CLIENT_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synret/prompts.h"

namespace synret {

struct LlmEndpoint {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  double request_timeout = 60.0;  // seconds
  int max_retries = 3;
  // Overrides the per-kind default temperature when set.
  std::optional<double> sampling_temperature;

  std::vector<std::string> Validate() const;
  double TemperatureFor(PromptKind kind) const {
    return sampling_temperature.value_or(DefaultTemperature(kind));
  }
};

class LlmError : public std::runtime_error {
 public:
  LlmError(const std::string& what, int status = 0)
      : std::runtime_error(what), status_(status) {}
  // HTTP status of the last attempt, 0 for transport failures.
  int status() const { return status_; }

 private:
  int status_;
};

struct CompletionRequest {
  PromptKind kind = PromptKind::kPositive;
  std::string prompt;
  double temperature = 0.0;
};

// One single-turn completion per call. Implementations must be
// safe for concurrent calls.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string Complete(const CompletionRequest& request) = 0;
  virtual std::string model_name() const = 0;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using HttpHeaders = std::multimap<std::string, std::string>;

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  // Throws TransportError when no HTTP response was received.
  virtual HttpResponse Post(const std::string& path, const std::string& body,
                            const HttpHeaders& headers) = 0;
};

// cpp-httplib transport; a fresh connection per request.
std::unique_ptr<ChatTransport> MakeHttpTransport(const std::string& base_url,
                                                 double timeout_seconds);

struct RetryPolicy {
  int max_retries = 3;
  double base_delay_seconds = 1.0;
  double jitter_fraction = 0.25;

  // Delay before retry number `retry` (0-based); `salt` picks the jitter.
  std::chrono::duration<double> Delay(int retry, uint64_t salt) const;
};

using Sleeper = std::function<void(std::chrono::duration<double>)>;

class RemoteChatClient : public ChatClient {
 public:
  // Reads the API key from the environment; throws LlmError when unset.
  RemoteChatClient(LlmEndpoint endpoint,
                   std::unique_ptr<ChatTransport> transport = nullptr,
                   Sleeper sleeper = nullptr);

  std::string Complete(const CompletionRequest& request) override;
  std::string model_name() const override { return endpoint_.model_name; }

  static std::string BuildRequestBody(const std::string& model,
                                      const std::string& prompt,
                                      double temperature);
  // Throws LlmError on a malformed body or empty content.
  static std::string ParseResponseBody(const std::string& body);

 private:
  LlmEndpoint endpoint_;
  std::string api_key_;
  std::string path_;
  std::unique_ptr<ChatTransport> transport_;
  Sleeper sleeper_;
  RetryPolicy policy_;
};

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> SplitBaseUrl(const std::string& base_url);

}  // namespace synret

#endif  // SYNRET_LLM_CLIENT_H_
