#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltswap/error.hpp"
#include "ltswap/io.hpp"

namespace ltswap::pipeline {

namespace fs = std::filesystem;

struct LlmConfig {
  std::string backend = "mock";  // mock | http
  std::string url;
  std::string model;
  std::string api_key_env = "LTSWAP_API_KEY";
  int max_concurrency = 4;
  int retries = 3;
  int timeout_seconds = 120;
  double temperature = 0.0;
  std::optional<fs::path> cache_path;  // default: <work_dir>/llm_cache.jsonl
};

struct ModelConfig {
  std::string name;
  std::string backend;  // builtin:unigram | builtin:bigram | http(s)://... | file:<path>
  std::string mode = "causal";
};

struct Config {
  fs::path base_dir;  // directory of the config file; relative paths resolve here
  std::vector<fs::path> corpus_paths;
  fs::path dictionary_path;
  fs::path work_dir = "work";
  std::uint64_t seed = 0;
  int bins_n = 9;
  std::string tagger = "builtin";  // builtin | imported
  std::optional<fs::path> tags_path;
  bool extended_spelling = false;
  int sentences_per_word = 2;
  bool agreement = true;
  LlmConfig llm;
  bool filter_enabled = true;
  std::string filter_backend = "llm";  // llm | mock
  std::vector<ModelConfig> models;
  std::string judge_mode = "quad";
  std::size_t scoring_batch_size = 64;
  int scoring_concurrency = 2;
  std::map<std::string, std::string> templates;
  std::vector<fs::path> blimp_paths;

  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
  fs::path work() const { return resolve(work_dir); }
  fs::path llm_cache() const { return llm.cache_path ? resolve(*llm.cache_path) : work() / "llm_cache.jsonl"; }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void keys(const io::json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      errors_.push_back(where + ": expected an object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) errors_.push_back(where + "." + it.key() + ": unknown key");
  }

  template <class T>
  void get(const io::json& obj, const std::string& key, const std::string& where, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const auto& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
        out = v.template get<std::string>();
        if (out.find("${") != std::string::npos)
          errors_.push_back(where + "." + key + ": environment interpolation is only allowed in llm.api_key");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
        out = v.template get<bool>();
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        out = v.template get<T>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        if (std::is_unsigned_v<T> && v.template get<long long>() < 0) throw std::invalid_argument("must be >= 0");
        out = v.template get<T>();
      } else {
        static_assert(sizeof(T) == 0, "unsupported config type");
      }
    } catch (const std::exception& e) {
      errors_.push_back(where + "." + key + ": " + e.what());
    }
  }

  void path(const io::json& obj, const std::string& key, const std::string& where, fs::path& out) {
    std::string s;
    get(obj, key, where, s);
    if (!s.empty()) out = s;
  }

  void paths(const io::json& obj, const std::string& key, const std::string& where, std::vector<fs::path>& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array()) {
      errors_.push_back(where + "." + key + ": expected a list of paths");
      return;
    }
    for (const auto& e : v) {
      if (!e.is_string()) errors_.push_back(where + "." + key + ": expected a list of paths");
      else out.emplace_back(e.get<std::string>());
    }
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace detail

/// Parses and validates a config document. Every violation is collected;
/// the thrown ConfigError lists all of them, one per line.
inline Config parse_config(const io::json& j, const fs::path& base_dir = ".") {
  std::vector<std::string> errors;
  detail::Reader r(errors);
  Config c;
  c.base_dir = base_dir;
  r.keys(j, "config",
         {"corpus_paths", "dictionary_path", "work_dir", "seed", "bins", "tagger", "morphology", "generation", "llm",
          "filter", "scoring", "templates", "blimp_paths"});
  r.paths(j, "corpus_paths", "config", c.corpus_paths);
  r.path(j, "dictionary_path", "config", c.dictionary_path);
  r.path(j, "work_dir", "config", c.work_dir);
  r.get(j, "seed", "config", c.seed);
  r.paths(j, "blimp_paths", "config", c.blimp_paths);

  if (j.contains("bins")) {
    r.keys(j["bins"], "bins", {"n"});
    r.get(j["bins"], "n", "bins", c.bins_n);
  }
  if (j.contains("tagger")) {
    r.keys(j["tagger"], "tagger", {"backend", "path"});
    r.get(j["tagger"], "backend", "tagger", c.tagger);
    fs::path p;
    r.path(j["tagger"], "path", "tagger", p);
    if (!p.empty()) c.tags_path = p;
  }
  if (j.contains("morphology")) {
    r.keys(j["morphology"], "morphology", {"extended_spelling"});
    r.get(j["morphology"], "extended_spelling", "morphology", c.extended_spelling);
  }
  if (j.contains("generation")) {
    r.keys(j["generation"], "generation", {"sentences_per_word", "agreement"});
    r.get(j["generation"], "sentences_per_word", "generation", c.sentences_per_word);
    r.get(j["generation"], "agreement", "generation", c.agreement);
  }
  if (j.contains("llm")) {
    const auto& l = j["llm"];
    r.keys(l, "llm",
           {"backend", "url", "model", "api_key", "max_concurrency", "retries", "timeout_seconds", "temperature",
            "cache_path"});
    r.get(l, "backend", "llm", c.llm.backend);
    r.get(l, "url", "llm", c.llm.url);
    r.get(l, "model", "llm", c.llm.model);
    if (l.is_object() && l.contains("api_key")) {
      // The key itself never appears in the file; only this reference may.
      if (!(l["api_key"].is_string() && l["api_key"].get<std::string>() == "${LTSWAP_API_KEY}"))
        r.error("llm.api_key: only the reference \"${LTSWAP_API_KEY}\" is accepted");
    }
    r.get(l, "max_concurrency", "llm", c.llm.max_concurrency);
    r.get(l, "retries", "llm", c.llm.retries);
    r.get(l, "timeout_seconds", "llm", c.llm.timeout_seconds);
    r.get(l, "temperature", "llm", c.llm.temperature);
    fs::path p;
    r.path(l, "cache_path", "llm", p);
    if (!p.empty()) c.llm.cache_path = p;
  }
  if (j.contains("filter")) {
    r.keys(j["filter"], "filter", {"enabled", "backend"});
    r.get(j["filter"], "enabled", "filter", c.filter_enabled);
    r.get(j["filter"], "backend", "filter", c.filter_backend);
  }
  if (j.contains("scoring")) {
    const auto& s = j["scoring"];
    r.keys(s, "scoring", {"models", "judge_mode", "batch_size", "max_concurrency"});
    r.get(s, "judge_mode", "scoring", c.judge_mode);
    r.get(s, "batch_size", "scoring", c.scoring_batch_size);
    r.get(s, "max_concurrency", "scoring", c.scoring_concurrency);
    if (s.is_object() && s.contains("models")) {
      if (!s["models"].is_array()) r.error("scoring.models: expected a list");
      else
        for (std::size_t i = 0; i < s["models"].size(); ++i) {
          const auto& m = s["models"][i];
          const auto where = "scoring.models[" + std::to_string(i) + "]";
          r.keys(m, where, {"name", "backend", "mode"});
          ModelConfig mc;
          r.get(m, "name", where, mc.name);
          r.get(m, "backend", where, mc.backend);
          r.get(m, "mode", where, mc.mode);
          if (mc.name.empty()) r.error(where + ".name: required");
          else if (mc.name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-") !=
                   std::string::npos)
            r.error(where + ".name: use letters, digits, '.', '_' or '-'");
          if (mc.backend.empty()) r.error(where + ".backend: required");
          c.models.push_back(std::move(mc));
        }
    }
  }
  if (j.contains("templates")) {
    const auto& t = j["templates"];
    if (!t.is_object()) r.error("templates: expected an object");
    else
      for (auto it = t.begin(); it != t.end(); ++it) {
        if (!it.value().is_string()) r.error("templates." + it.key() + ": expected a string");
        else c.templates[it.key()] = it.value().get<std::string>();
      }
  }

  // Cross-field checks.
  if (c.corpus_paths.empty()) r.error("corpus_paths: at least one path is required");
  if (c.dictionary_path.empty()) r.error("dictionary_path: required");
  if (c.bins_n < 1 || c.bins_n > 62) r.error("bins.n: must be in [1, 62]");
  if (c.tagger != "builtin" && c.tagger != "imported") r.error("tagger.backend: must be 'builtin' or 'imported'");
  if (c.tagger == "imported" && !c.tags_path) r.error("tagger.path: required for the imported tagger");
  if (c.sentences_per_word < 1) r.error("generation.sentences_per_word: must be >= 1");
  if (c.llm.backend != "mock" && c.llm.backend != "http") r.error("llm.backend: must be 'mock' or 'http'");
  if (c.llm.backend == "http" && c.llm.url.empty()) r.error("llm.url: required for the http backend");
  if (c.llm.max_concurrency < 1) r.error("llm.max_concurrency: must be >= 1");
  if (c.llm.retries < 0) r.error("llm.retries: must be >= 0");
  if (c.llm.timeout_seconds < 1) r.error("llm.timeout_seconds: must be >= 1");
  if (c.filter_backend != "llm" && c.filter_backend != "mock") r.error("filter.backend: must be 'llm' or 'mock'");
  if (c.judge_mode != "quad" && c.judge_mode != "pair") r.error("scoring.judge_mode: must be 'quad' or 'pair'");
  if (c.scoring_batch_size < 1) r.error("scoring.batch_size: must be >= 1");
  if (c.scoring_concurrency < 1) r.error("scoring.max_concurrency: must be >= 1");
  std::set<std::string> names;
  for (const auto& m : c.models) {
    if (!names.insert(m.name).second) r.error("scoring.models: duplicate name '" + m.name + "'");
    if (m.mode != "causal" && m.mode != "pll" && m.mode != "shifted-pll")
      r.error("scoring.models." + m.name + ".mode: must be causal, pll or shifted-pll");
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

inline Config load_config(const fs::path& path) {
  io::json j;
  try {
    j = io::json::parse(io::read_file(path));
  } catch (const io::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

}  // namespace ltswap::pipeline
