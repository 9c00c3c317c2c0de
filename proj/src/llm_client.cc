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

#include "synret/llm_client.h"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "synret/rng.h"
#include "synret/text.h"

namespace synret {

using nlohmann::json;

std::vector<std::string> LlmEndpoint::Validate() const {
  std::vector<std::string> errors;
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    errors.push_back("endpoint.base_url must start with http:// or https://");
  }
  if (model_name.empty()) errors.push_back("endpoint.model must be set");
  if (!(request_timeout > 0)) {
    errors.push_back("endpoint.request_timeout must be positive");
  }
  if (max_retries < 0) errors.push_back("endpoint.max_retries must be >= 0");
  if (sampling_temperature && *sampling_temperature < 0) {
    errors.push_back("endpoint.temperature must be >= 0");
  }
  return errors;
}

std::pair<std::string, std::string> SplitBaseUrl(const std::string& base_url) {
  const size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("malformed endpoint url " + base_url);
  }
  const size_t path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

namespace {

class HttplibTransport : public ChatTransport {
 public:
  HttplibTransport(std::string host, double timeout)
      : host_(std::move(host)), timeout_(timeout) {}

  HttpResponse Post(const std::string& path, const std::string& body,
                    const HttpHeaders& headers) override {
    httplib::Client client(host_);
    const auto secs = static_cast<time_t>(timeout_);
    const auto usecs = static_cast<time_t>((timeout_ - secs) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
      throw TransportError("request to " + host_ + path +
                           " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

 private:
  std::string host_;
  double timeout_;
};

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::unique_ptr<ChatTransport> MakeHttpTransport(const std::string& base_url,
                                                 double timeout_seconds) {
  return std::make_unique<HttplibTransport>(SplitBaseUrl(base_url).first,
                                            timeout_seconds);
}

std::chrono::duration<double> RetryPolicy::Delay(int retry,
                                                 uint64_t salt) const {
  const double u =
      static_cast<double>(MixBits(salt + static_cast<uint64_t>(retry)) >> 11) *
      0x1.0p-53;
  return std::chrono::duration<double>(base_delay_seconds *
                                       std::ldexp(1.0, retry) *
                                       (1.0 + jitter_fraction * u));
}

RemoteChatClient::RemoteChatClient(LlmEndpoint endpoint,
                                   std::unique_ptr<ChatTransport> transport,
                                   Sleeper sleeper)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)) {
  if (auto errors = endpoint_.Validate(); !errors.empty()) {
    throw std::invalid_argument(errors.front());
  }
  const char* key = std::getenv(endpoint_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw LlmError("environment variable " + endpoint_.api_key_env +
                   " is not set");
  }
  api_key_ = key;
  path_ = SplitBaseUrl(endpoint_.base_url).second + "/chat/completions";
  if (!transport_) {
    transport_ = MakeHttpTransport(endpoint_.base_url, endpoint_.request_timeout);
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::duration<double> d) {
      std::this_thread::sleep_for(d);
    };
  }
  policy_.max_retries = endpoint_.max_retries;
}

std::string RemoteChatClient::BuildRequestBody(const std::string& model,
                                               const std::string& prompt,
                                               double temperature) {
  json body = {{"model", model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", temperature}};
  return body.dump();
}

std::string RemoteChatClient::ParseResponseBody(const std::string& body) {
  json obj;
  try {
    obj = json::parse(body);
    const auto& content = obj.at("choices").at(0).at("message").at("content");
    if (content.is_string()) {
      std::string text = content.get<std::string>();
      if (Trim(text).empty()) throw LlmError("empty completion");
      return text;
    }
  } catch (const json::exception& e) {
    throw LlmError(std::string("malformed completion response: ") + e.what());
  }
  throw LlmError("empty completion");
}

std::string RemoteChatClient::Complete(const CompletionRequest& request) {
  const std::string body = BuildRequestBody(endpoint_.model_name,
                                            request.prompt, request.temperature);
  const HttpHeaders headers = {{"Authorization", "Bearer " + api_key_}};
  const uint64_t salt = Fnv1a(request.prompt);
  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    if (attempt > 0) sleeper_(policy_.Delay(attempt - 1, salt));
    try {
      const HttpResponse res = transport_->Post(path_, body, headers);
      last_status = res.status;
      if (res.status >= 200 && res.status < 300) {
        return ParseResponseBody(res.body);
      }
      last_error = "HTTP " + std::to_string(res.status) + ": " +
                   res.body.substr(0, 200);
      if (!Retryable(res.status)) throw LlmError(last_error, res.status);
    } catch (const TransportError& e) {
      last_status = 0;
      last_error = e.what();
    }
  }
  throw LlmError("retries exhausted after " +
                     std::to_string(policy_.max_retries + 1) +
                     " attempts; last error: " + last_error,
                 last_status);
}

}  // namespace synret
