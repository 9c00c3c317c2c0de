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

#include <stdlib.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "httplib.h"
#include "json.hpp"

namespace synret {
namespace {

using nlohmann::json;
using Seconds = std::chrono::duration<double>;

constexpr const char* kKeyEnv = "SYNRET_TEST_API_KEY";

// A local chat-completions server whose replies come from a script.
class FakeServer {
 public:
  explicit FakeServer(std::vector<std::pair<int, std::string>> script)
      : script_(std::move(script)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   std::lock_guard<std::mutex> lock(mu_);
                   requests_.push_back(req);
                   const size_t i = std::min(requests_.size(), script_.size()) - 1;
                   res.status = script_[i].first;
                   res.set_content(script_[i].second, "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
  }
  std::vector<httplib::Request> requests() {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

 private:
  std::vector<std::pair<int, std::string>> script_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::vector<httplib::Request> requests_;
};

std::string Completion(const std::string& text) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"},
                                                      {"content", text}}}}})}}
      .dump();
}

class LlmClientTest : public ::testing::Test {
 protected:
  void SetUp() override { setenv(kKeyEnv, "sk-test", 1); }
  void TearDown() override { unsetenv(kKeyEnv); }

  LlmEndpoint Endpoint(const std::string& url) {
    LlmEndpoint e;
    e.base_url = url;
    e.model_name = "test-model";
    e.api_key_env = kKeyEnv;
    e.request_timeout = 5;
    e.max_retries = 3;
    return e;
  }
  Sleeper Recorder() {
    return [this](Seconds d) { sleeps_.push_back(d.count()); };
  }
  CompletionRequest Request(const std::string& prompt, double temp = 0.7) {
    return {PromptKind::kPositive, prompt, temp};
  }

  std::vector<double> sleeps_;
};

TEST_F(LlmClientTest, EchoesCompletionAndUsesWireFormat) {
  FakeServer server({{200, Completion("OK")}});
  RemoteChatClient client(Endpoint(server.base_url()), nullptr, Recorder());
  EXPECT_EQ(client.Complete(Request("hello \"world\"", 0.25)), "OK");
  const auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].path, "/v1/chat/completions");
  EXPECT_EQ(reqs[0].get_header_value("Authorization"), "Bearer sk-test");
  const json body = json::parse(reqs[0].body);
  EXPECT_EQ(body.at("model"), "test-model");
  EXPECT_EQ(body.at("temperature"), 0.25);
  ASSERT_EQ(body.at("messages").size(), 1u);
  EXPECT_EQ(body.at("messages")[0].at("role"), "user");
  EXPECT_EQ(body.at("messages")[0].at("content"), "hello \"world\"");
  EXPECT_TRUE(sleeps_.empty());
  EXPECT_EQ(client.model_name(), "test-model");
}

TEST_F(LlmClientTest, RetriesRateLimitThenSucceeds) {
  FakeServer server({{429, "{}"}, {429, "{}"}, {200, Completion("done")}});
  RemoteChatClient client(Endpoint(server.base_url()), nullptr, Recorder());
  EXPECT_EQ(client.Complete(Request("p")), "done");
  EXPECT_EQ(server.requests().size(), 3u);
  ASSERT_EQ(sleeps_.size(), 2u);
  EXPECT_GE(sleeps_[0], 1.0);
  EXPECT_LE(sleeps_[0], 1.25);
  EXPECT_GE(sleeps_[1], 2.0);
  EXPECT_LE(sleeps_[1], 2.5);
}

TEST_F(LlmClientTest, ServerErrorsExhaustRetries) {
  FakeServer server({{503, "busy"}});
  RemoteChatClient client(Endpoint(server.base_url()), nullptr, Recorder());
  try {
    client.Complete(Request("p"));
    FAIL() << "expected LlmError";
  } catch (const LlmError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(server.requests().size(), 4u);
  EXPECT_EQ(sleeps_.size(), 3u);
}

TEST_F(LlmClientTest, UnauthorizedFailsImmediately) {
  FakeServer server({{401, "{\"error\": \"bad key\"}"}, {200, Completion("no")}});
  RemoteChatClient client(Endpoint(server.base_url()), nullptr, Recorder());
  try {
    client.Complete(Request("p"));
    FAIL() << "expected LlmError";
  } catch (const LlmError& e) {
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(server.requests().size(), 1u);
  EXPECT_TRUE(sleeps_.empty());
}

TEST_F(LlmClientTest, EmptyCompletionIsError) {
  FakeServer server({{200, Completion("   ")}});
  RemoteChatClient client(Endpoint(server.base_url()), nullptr, Recorder());
  EXPECT_THROW(client.Complete(Request("p")), LlmError);
  EXPECT_THROW(RemoteChatClient::ParseResponseBody("{\"choices\": []}"), LlmError);
  EXPECT_THROW(RemoteChatClient::ParseResponseBody("not json"), LlmError);
}

TEST_F(LlmClientTest, TransportFailuresAreRetried) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  LlmEndpoint e = Endpoint("http://127.0.0.1:" + std::to_string(port) + "/v1");
  e.max_retries = 2;
  RemoteChatClient client(e, nullptr, Recorder());
  try {
    client.Complete(Request("p"));
    FAIL() << "expected LlmError";
  } catch (const LlmError& err) {
    EXPECT_EQ(err.status(), 0);
  }
  EXPECT_EQ(sleeps_.size(), 2u);
}

TEST_F(LlmClientTest, MissingKeyIsError) {
  unsetenv(kKeyEnv);
  EXPECT_THROW(RemoteChatClient(Endpoint("http://127.0.0.1:1/v1")), LlmError);
}

TEST(LlmEndpoint, ValidateListsEveryViolation) {
  LlmEndpoint e;
  e.base_url = "ftp://x";
  e.model_name = "";
  e.request_timeout = 0;
  e.max_retries = -1;
  e.sampling_temperature = -0.5;
  EXPECT_EQ(e.Validate().size(), 5u);
  EXPECT_TRUE(LlmEndpoint{}.Validate().empty());
  EXPECT_EQ(LlmEndpoint{}.TemperatureFor(PromptKind::kCompare), 0.0);
  e = LlmEndpoint{};
  e.sampling_temperature = 1.0;
  EXPECT_EQ(e.TemperatureFor(PromptKind::kCompare), 1.0);
}

TEST(SplitBaseUrl, SeparatesHostAndPrefix) {
  EXPECT_EQ(SplitBaseUrl("https://api.example.com/v1/"),
            std::make_pair(std::string("https://api.example.com"), std::string("/v1")));
  EXPECT_EQ(SplitBaseUrl("http://localhost:8080"),
            std::make_pair(std::string("http://localhost:8080"), std::string("")));
  EXPECT_THROW(SplitBaseUrl("localhost"), std::invalid_argument);
}

TEST(RetryPolicy, ExponentialWithBoundedJitter) {
  RetryPolicy p;
  for (int r = 0; r < 5; ++r) {
    for (uint64_t salt = 0; salt < 50; ++salt) {
      const double d = p.Delay(r, salt).count();
      EXPECT_GE(d, std::ldexp(1.0, r));
      EXPECT_LE(d, 1.25 * std::ldexp(1.0, r));
    }
  }
  EXPECT_EQ(p.Delay(1, 7).count(), p.Delay(1, 7).count());
}

}  // namespace
}  // namespace synret
