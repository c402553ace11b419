#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltswap/corpus.hpp"
#include "ltswap/net.hpp"
#include "ltswap/quadruplet.hpp"

namespace ltswap {

enum class ScoringMode { Causal, MaskedPll, ShiftedPll };

inline std::string_view to_string(ScoringMode m) {
  switch (m) {
    case ScoringMode::Causal: return "causal";
    case ScoringMode::MaskedPll: return "pll";
    case ScoringMode::ShiftedPll: return "shifted-pll";
  }
  return "?";
}

inline ScoringMode scoring_mode_from_string(std::string_view s) {
  if (s == "causal" || s == "CAUSAL") return ScoringMode::Causal;
  if (s == "pll" || s == "MASKED_PLL") return ScoringMode::MaskedPll;
  if (s == "shifted-pll" || s == "SHIFTED_PLL") return ScoringMode::ShiftedPll;
  throw ConfigError("unknown scoring mode '" + std::string(s) + "' (causal, pll, shifted-pll)");
}

struct SentenceScore {
  double logprob = 0.0;  // nats
  int scored_tokens = 0;
  int prefix_tokens_excluded = 0;

  friend bool operator==(const SentenceScore&, const SentenceScore&) = default;
};

struct ScoreItem {
  std::string id;
  std::optional<std::string> prefix;
  std::string text;
};

/// Batch scorer. A missing result (nullopt) marks an item-level failure.
class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode mode) = 0;
};

// ---- local token models ----------------------------------------------------

inline constexpr std::string_view kBos = "<s>";

class TokenModel {
 public:
  virtual ~TokenModel() = default;
  /// log p(next | context)
  virtual double next_logprob(std::span<const std::string> context, const std::string& next) const = 0;
  /// log p(tokens[pos]) with tokens[pos] masked, read at position pos - shift.
  virtual double masked_logprob(std::span<const std::string> tokens, std::size_t pos, std::size_t shift) const = 0;
};

/// Scores whitespace-tokenized text with a TokenModel. The prefix conditions
/// every prediction but none of its positions is summed.
class LocalScorer : public SentenceScorer {
 public:
  LocalScorer(std::string id, const TokenModel& model) : id_(std::move(id)), model_(model) {}

  std::string id() const override { return id_; }

  SentenceScore score_one(const ScoreItem& item, ScoringMode mode) const {
    const auto text = text::split_ws(item.text);
    const auto prefix = item.prefix ? text::split_ws(*item.prefix) : std::vector<std::string>{};
    if (text.empty()) throw InputError("item " + item.id + ": empty text");
    std::vector<std::string> seq;
    if (mode != ScoringMode::MaskedPll) seq.emplace_back(kBos);
    seq.insert(seq.end(), prefix.begin(), prefix.end());
    const auto start = seq.size();
    seq.insert(seq.end(), text.begin(), text.end());
    double lp = 0.0;
    const std::span<const std::string> all(seq);
    for (std::size_t k = start; k < seq.size(); ++k) {
      switch (mode) {
        case ScoringMode::Causal: lp += model_.next_logprob(all.first(k), seq[k]); break;
        case ScoringMode::MaskedPll: lp += model_.masked_logprob(all, k, 0); break;
        case ScoringMode::ShiftedPll: lp += model_.masked_logprob(all, k, 1); break;
      }
    }
    return {lp, static_cast<int>(text.size()), static_cast<int>(prefix.size())};
  }

  std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode mode) override {
    std::vector<std::optional<SentenceScore>> out;
    out.reserve(items.size());
    for (const auto& it : items) {
      try {
        out.emplace_back(score_one(it, mode));
      } catch (const InputError&) {
        out.emplace_back(std::nullopt);
      }
    }
    return out;
  }

 private:
  std::string id_;
  const TokenModel& model_;
};

/// Add-k unigram model over corpus tokens. Every prediction ignores context,
/// so quadruplet margins are exactly zero.
class UnigramModel : public TokenModel {
 public:
  explicit UnigramModel(const std::map<std::string, std::uint64_t>& counts, double k = 1.0) : k_(k) {
    for (const auto& [w, c] : counts) {
      counts_.emplace(w, c);
      total_ += c;
    }
    denom_ = static_cast<double>(total_) + k_ * static_cast<double>(counts_.size() + 1);
  }

  double logprob(const std::string& w) const {
    const auto it = counts_.find(w);
    const double c = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((c + k_) / denom_);
  }

  double next_logprob(std::span<const std::string>, const std::string& next) const override { return logprob(next); }
  double masked_logprob(std::span<const std::string> tokens, std::size_t pos, std::size_t) const override {
    return logprob(tokens[pos]);
  }

 private:
  double k_;
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  double denom_ = 1.0;
};

/// Add-k bigram model with sentence-start context. The masked variants
/// condition on the left neighbour of the read position's target, which for
/// a bigram model is all the context it can use.
class BigramModel : public TokenModel {
 public:
  BigramModel(std::span<const SentenceRef> sentences, double k = 0.1) : k_(k) {
    std::set<std::string> vocab;
    for (const auto& s : sentences) {
      std::string prev(kBos);
      for (const auto& t : s.tokens) {
        ++bigrams_[prev][t];
        ++context_[prev];
        vocab.insert(t);
        prev = t;
      }
    }
    v_ = static_cast<double>(vocab.size() + 1);
  }

  double bigram(const std::string& prev, const std::string& w) const {
    double c = 0.0, n = 0.0;
    if (const auto it = bigrams_.find(prev); it != bigrams_.end()) {
      if (const auto jt = it->second.find(w); jt != it->second.end()) c = static_cast<double>(jt->second);
      n = static_cast<double>(context_.at(prev));
    }
    return std::log((c + k_) / (n + k_ * v_));
  }

  double next_logprob(std::span<const std::string> context, const std::string& next) const override {
    return bigram(context.empty() ? std::string(kBos) : context.back(), next);
  }

  double masked_logprob(std::span<const std::string> tokens, std::size_t pos, std::size_t) const override {
    return bigram(pos == 0 ? std::string(kBos) : tokens[pos - 1], tokens[pos]);
  }

 private:
  double k_;
  double v_ = 1.0;
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> bigrams_;
  std::unordered_map<std::string, std::uint64_t> context_;
};

// ---- wire and file scorers -------------------------------------------------

inline io::json to_json(const ScoreItem& it) {
  io::json j;
  j["id"] = it.id;
  if (it.prefix) j["prefix"] = *it.prefix;
  j["text"] = it.text;
  return j;
}

inline io::json score_request(const std::vector<ScoreItem>& items, ScoringMode mode) {
  io::json j;
  j["mode"] = to_string(mode);
  j["items"] = io::json::array();
  for (const auto& it : items) j["items"].push_back(to_json(it));
  return j;
}

/// Maps a `{scores:[...]}` body (or score-file records) onto `items`.
/// Ids not in `items` are ignored; absent ids stay empty.
inline std::vector<std::optional<SentenceScore>> match_scores(const std::vector<ScoreItem>& items,
                                                              const std::unordered_map<std::string, SentenceScore>& got) {
  std::vector<std::optional<SentenceScore>> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    const auto f = got.find(it.id);
    if (f == got.end()) out.emplace_back(std::nullopt);
    else {
      auto s = f->second;
      s.prefix_tokens_excluded = it.prefix ? static_cast<int>(text::split_ws(*it.prefix).size()) : 0;
      out.emplace_back(s);
    }
  }
  return out;
}

inline std::pair<std::string, SentenceScore> score_record(const io::json& j) {
  SentenceScore s;
  s.logprob = j.at("logprob").get<double>();
  s.scored_tokens = j.at("scored_tokens").get<int>();
  if (!std::isfinite(s.logprob)) throw InputError("non-finite logprob for " + j.at("id").get<std::string>());
  if (s.scored_tokens < 1) throw InputError("scored_tokens < 1 for " + j.at("id").get<std::string>());
  return {j.at("id").get<std::string>(), s};
}

class HttpScorer : public SentenceScorer {
 public:
  HttpScorer(const std::string& url, std::size_t batch_size = 64, int concurrency = 2, int timeout_seconds = 600)
      : raw_url_(url), url_(net::parse_url(url)), batch_(batch_size), concurrency_(concurrency), timeout_(timeout_seconds) {
    if (batch_ < 1) throw ConfigError("scoring.batch_size must be >= 1");
    if (concurrency_ < 1) throw ConfigError("scoring.max_concurrency must be >= 1");
  }

  std::string id() const override { return raw_url_; }

  std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode mode) override {
    std::vector<std::optional<SentenceScore>> out(items.size());
    const std::size_t nbatches = (items.size() + batch_ - 1) / batch_;
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
      for (std::size_t b; (b = next++) < nbatches;) {
        try {
          const auto lo = b * batch_, hi = std::min(items.size(), lo + batch_);
          std::vector<ScoreItem> chunk(items.begin() + static_cast<std::ptrdiff_t>(lo),
                                       items.begin() + static_cast<std::ptrdiff_t>(hi));
          const auto raw = net::post_json(url_, score_request(chunk, mode).dump(), {}, timeout_);
          std::unordered_map<std::string, SentenceScore> got;
          try {
            const auto body = nlohmann::json::parse(raw);
            for (const auto& j : body.at("scores")) got.insert(score_record(j));
          } catch (const nlohmann::json::exception&) {
            throw MalformedResponse("scorer returned an unexpected body", raw);
          }
          auto matched = match_scores(chunk, got);
          for (std::size_t k = 0; k < matched.size(); ++k) out[lo + k] = matched[k];
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(concurrency_), nbatches);
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k + 1 < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
  }

 private:
  std::string raw_url_;
  net::Url url_;
  std::size_t batch_;
  int concurrency_;
  int timeout_;
};

/// Offline scores: one `{id, logprob, scored_tokens}` record per line.
class FileScorer : public SentenceScorer {
 public:
  explicit FileScorer(const std::filesystem::path& path) : path_(path) {
    io::for_each_jsonl(path, [&](const io::json& j, std::size_t line) {
      try {
        auto [id, s] = score_record(j);
        if (!scores_.emplace(id, s).second) throw InputError("duplicate id " + id, line);
      } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad score record: ") + e.what(), line);
      }
    });
  }

  std::string id() const override { return "file:" + path_.string(); }

  std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode) override {
    return match_scores(items, scores_);
  }

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, SentenceScore> scores_;
};

inline io::json to_json(const std::string& id, const SentenceScore& s) {
  io::json j;
  j["id"] = id;
  j["logprob"] = s.logprob;
  j["scored_tokens"] = s.scored_tokens;
  return j;
}

// ---- quadruplet scoring ----------------------------------------------------

enum class JudgeMode { Quad, Pair };

inline std::string_view to_string(JudgeMode m) { return m == JudgeMode::Quad ? "quad" : "pair"; }

inline JudgeMode judge_mode_from_string(std::string_view s) {
  if (s == "quad" || s == "QUAD") return JudgeMode::Quad;
  if (s == "pair" || s == "PAIR") return JudgeMode::Pair;
  throw ConfigError("unknown judge mode '" + std::string(s) + "' (quad, pair)");
}

inline constexpr std::array<std::string_view, 4> kMembers{"s1", "s2", "s1_star", "s2_star"};

inline std::string item_id(const std::string& qid, std::size_t member, bool prefixed = false) {
  return qid + "/" + std::string(kMembers.at(member)) + (prefixed ? "/p" : "");
}

inline const std::vector<std::string>& member(const Quadruplet& q, std::size_t m) {
  switch (m) {
    case 0: return q.s1;
    case 1: return q.s2;
    case 2: return q.s1_star;
    default: return q.s2_star;
  }
}

struct QuadrupletVerdict {
  std::string quadruplet_id;
  bool correct = false;
  double margin = 0.0;
  JudgeMode judge_mode = JudgeMode::Quad;
  int pair = 0;  // PAIR mode: 1 (S1 vs S1*) or 2 (S2 vs S2*)
};

/// Margins this close to zero are ties. Summing the same log-probs in a
/// different order leaves residue around 1e-14.
inline constexpr double kTieEpsilon = 1e-9;

/// QUAD: one verdict, margin = (S1 + S2) - (S1* + S2*). PAIR: S1 vs S1* and
/// S2 vs S2*. A tie is incorrect.
inline std::vector<QuadrupletVerdict> judge(const std::string& qid, const std::array<SentenceScore, 4>& s,
                                            JudgeMode mode) {
  if (mode == JudgeMode::Quad) {
    const double m = (s[0].logprob + s[1].logprob) - (s[2].logprob + s[3].logprob);
    return {{qid, m > kTieEpsilon, m, mode, 0}};
  }
  const double m1 = s[0].logprob - s[2].logprob, m2 = s[1].logprob - s[3].logprob;
  return {{qid, m1 > kTieEpsilon, m1, mode, 1}, {qid, m2 > kTieEpsilon, m2, mode, 2}};
}

inline io::json to_json(const QuadrupletVerdict& v) {
  io::json j;
  j["quadruplet_id"] = v.quadruplet_id;
  j["correct"] = v.correct;
  j["margin"] = v.margin;
  j["judge_mode"] = to_string(v.judge_mode);
  if (v.pair) j["pair"] = v.pair;
  return j;
}

inline QuadrupletVerdict quadruplet_verdict_from_json(const io::json& j) {
  QuadrupletVerdict v;
  v.quadruplet_id = j.at("quadruplet_id").get<std::string>();
  v.correct = j.at("correct").get<bool>();
  v.margin = j.at("margin").get<double>();
  v.judge_mode = judge_mode_from_string(j.at("judge_mode").get<std::string>());
  v.pair = j.value("pair", 0);
  return v;
}

/// Shortest corpus sentence containing `word`; ties go to the lowest id.
inline std::optional<std::uint32_t> prefix_retrieve(std::string_view word, const Corpus& corpus,
                                                    const SentenceIndex& index) {
  std::optional<std::uint32_t> best;
  for (auto id : index.lookup(word))
    if (!best || corpus.sentence(id).tokens.size() < corpus.sentence(*best).tokens.size()) best = id;
  return best;
}

/// Prefix text per target word; S1 and S2* contain w1, S2 and S1* contain w2.
using PrefixFn = std::function<std::optional<std::string>(const std::string& word)>;

inline std::vector<ScoreItem> score_items(const std::vector<Quadruplet>& quads, const PrefixFn& prefix = {}) {
  std::vector<ScoreItem> items;
  items.reserve(quads.size() * 4);
  for (const auto& q : quads) {
    const std::array<const std::string*, 4> word{&q.w1, &q.w2, &q.w2, &q.w1};
    for (std::size_t m = 0; m < 4; ++m) {
      ScoreItem it{item_id(q.id, m, static_cast<bool>(prefix)), std::nullopt, text::join(member(q, m))};
      if (prefix) it.prefix = prefix(*word[m]);
      items.push_back(std::move(it));
    }
  }
  return items;
}

struct ScoringRun {
  std::vector<std::pair<std::string, SentenceScore>> scores;  // item id -> score, in request order
  std::vector<QuadrupletVerdict> verdicts;
  std::vector<std::string> skipped;  // quadruplet ids with a missing member score
};

inline ScoringRun score_quadruplets(const std::vector<Quadruplet>& quads, SentenceScorer& scorer, ScoringMode mode,
                                    JudgeMode judge_mode, const PrefixFn& prefix = {}) {
  const auto items = score_items(quads, prefix);
  const auto got = scorer.score(items, mode);
  if (got.size() != items.size()) throw ContractViolation("scorer returned a different number of results");
  ScoringRun run;
  for (std::size_t i = 0; i < quads.size(); ++i) {
    std::array<SentenceScore, 4> s;
    bool complete = true;
    for (std::size_t m = 0; m < 4; ++m) {
      const auto& r = got[i * 4 + m];
      if (!r) {
        complete = false;
        continue;
      }
      s[m] = *r;
      run.scores.emplace_back(items[i * 4 + m].id, *r);
    }
    if (!complete) {
      run.skipped.push_back(quads[i].id);
      continue;
    }
    for (auto& v : judge(quads[i].id, s, judge_mode)) run.verdicts.push_back(std::move(v));
  }
  return run;
}

}  // namespace ltswap
