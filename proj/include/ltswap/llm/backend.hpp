#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "ltswap/error.hpp"
#include "ltswap/net.hpp"

namespace ltswap::llm {

struct ChatRequest {
  std::string prompt;
  double temperature = 0.0;
  std::uint64_t seed = 0;
};

/// One chat-completion call. Implementations must be safe to call from
/// several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Part of every request hash, so cached answers are never reused across
  /// backends.
  virtual std::string id() const = 0;
  virtual std::string complete(const ChatRequest& req) = 0;
};

class FunctionChatBackend : public ChatBackend {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  FunctionChatBackend(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string id() const override { return id_; }
  std::string complete(const ChatRequest& req) override { return fn_(req); }

 private:
  std::string id_;
  Fn fn_;
};

/// OpenAI-style chat completion endpoint. The bearer token is read from the
/// environment at construction; it is never logged or written to disk.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend(const std::string& url, std::string model, const std::string& api_key_env = "LTSWAP_API_KEY",
                  int timeout_seconds = 120)
      : url_(net::parse_url(url)), model_(std::move(model)), timeout_(timeout_seconds) {
    if (const char* k = std::getenv(api_key_env.c_str()); k && *k) api_key_ = k;
  }

  std::string id() const override { return "http:" + url_.origin + url_.path + "#" + model_; }

  std::string complete(const ChatRequest& req) override {
    nlohmann::json body;
    body["model"] = model_;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}});
    body["temperature"] = req.temperature;
    body["seed"] = req.seed;
    net::Headers h;
    if (!api_key_.empty()) h.emplace_back("Authorization", "Bearer " + api_key_);
    const auto raw = net::post_json(url_, body.dump(), h, timeout_);
    try {
      const auto j = nlohmann::json::parse(raw);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw MalformedResponse("chat endpoint returned an unexpected body", raw);
    }
  }

 private:
  net::Url url_;
  std::string model_;
  std::string api_key_;
  int timeout_;
};

}  // namespace ltswap::llm
