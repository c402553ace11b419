#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltswap/digest.hpp"
#include "ltswap/error.hpp"
#include "ltswap/io.hpp"
#include "ltswap/llm/answer.hpp"
#include "ltswap/llm/backend.hpp"
#include "ltswap/llm/templates.hpp"

namespace ltswap::llm {

struct GenerationRecord {
  std::string request_hash;
  std::string response_text;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// request_hash -> response text, optionally backed by an append-only
/// JSONL file. The first stored answer for a hash wins.
class ResponseCache {
 public:
  ResponseCache() = default;

  explicit ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(*path_)) return;
    io::for_each_jsonl(*path_, [&](const io::json& j, std::size_t) {
      entries_.emplace(j.at("request_hash").get<std::string>(), j.at("response_text").get<std::string>());
    });
  }

  std::optional<std::string> find(const std::string& hash) const {
    std::lock_guard lock(mu_);
    const auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Stores `text` unless the hash is already present; returns the stored
  /// text either way.
  std::string put(const std::string& hash, const std::string& text) {
    std::lock_guard lock(mu_);
    const auto [it, inserted] = entries_.emplace(hash, text);
    if (inserted && path_) {
      if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
      std::ofstream out(*path_, std::ios::app | std::ios::binary);
      if (!out) throw Error("cannot append to " + path_->string());
      io::json j;
      j["request_hash"] = hash;
      j["response_text"] = text;
      j["timestamp"] = utc_timestamp();
      out << io::dump_line(j) << '\n';
    }
    return it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

struct GatewayOptions {
  int max_concurrency = 4;
  int retries = 3;  // extra attempts after the first
  std::chrono::milliseconds backoff{200};
  double temperature = 0.0;
};

struct Call {
  const PromptTemplate* tmpl = nullptr;
  Bindings bindings;
  std::uint64_t seed = 0;
};

struct CallResult {
  std::string request_hash;
  std::string prompt;
  std::string text;
  bool cached = false;
};

class Gateway {
 public:
  Gateway(ChatBackend& backend, ResponseCache& cache, GatewayOptions opts = {})
      : backend_(backend), cache_(cache), opts_(opts) {
    if (opts_.max_concurrency < 1) throw ConfigError("llm.max_concurrency must be >= 1");
    if (opts_.retries < 0) throw ConfigError("llm.retries must be >= 0");
  }

  std::string request_hash(const PromptTemplate& t, const Bindings& b, std::uint64_t seed) const {
    nlohmann::json j;  // std::map-backed: keys serialize sorted
    j["template"] = t.name;
    j["body"] = t.body;
    j["bindings"] = b;
    j["backend"] = backend_.id();
    j["seed"] = seed;
    return sha256_hex(j.dump());
  }

  /// Runs all calls with at most `max_concurrency` in flight. Results are in
  /// call order. If any call still fails after its retries, the first such
  /// error is rethrown once every worker has stopped.
  std::vector<CallResult> run(const std::vector<Call>& calls) {
    std::vector<CallResult> results(calls.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mu;

    auto worker = [&] {
      while (!failed) {
        const auto i = next++;
        if (i >= calls.size()) return;
        try {
          results[i] = execute(calls[i]);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(opts_.max_concurrency), calls.size());
    if (n <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n);
      for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
  }

  /// n samples (seeds seed, seed+1, ...). Bracketed payloads are extracted
  /// for FreeTextBracketed templates.
  std::vector<std::string> generate(const PromptTemplate& t, const Bindings& b, int n, std::uint64_t seed = 0) {
    std::vector<Call> calls;
    for (int i = 0; i < n; ++i) calls.push_back({&t, b, seed + static_cast<std::uint64_t>(i)});
    std::vector<std::string> out;
    for (auto& r : run(calls))
      out.push_back(t.expected == ExpectedAnswer::FreeTextBracketed ? extract_bracketed(r.text) : std::move(r.text));
    return out;
  }

  ChoiceAnswer ask_choice(const PromptTemplate& t, const Bindings& b, std::uint64_t seed = 0) {
    auto r = run({Call{&t, b, seed}});
    return parse_choice(std::move(r.front().text));
  }

  std::size_t network_calls() const { return network_calls_; }
  const ChatBackend& backend() const { return backend_; }

 private:
  CallResult execute(const Call& c) {
    CallResult r;
    r.request_hash = request_hash(*c.tmpl, c.bindings, c.seed);
    r.prompt = c.tmpl->render(c.bindings);
    if (auto hit = cache_.find(r.request_hash)) {
      r.text = std::move(*hit);
      r.cached = true;
      return r;
    }
    for (int attempt = 0;; ++attempt) {
      try {
        ++network_calls_;
        auto text = backend_.complete({r.prompt, opts_.temperature, c.seed});
        r.text = cache_.put(r.request_hash, text);
        return r;
      } catch (const BackendError&) {
        if (attempt >= opts_.retries) throw;
        std::this_thread::sleep_for(opts_.backoff * (1 << std::min(attempt, 10)));
      }
    }
  }

  ChatBackend& backend_;
  ResponseCache& cache_;
  GatewayOptions opts_;
  std::atomic<std::size_t> network_calls_{0};
};

}  // namespace ltswap::llm
