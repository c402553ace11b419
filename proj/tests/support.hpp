#pragma once

// Shared by the unit tests and the acceptance binary.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <thread>

#include <httplib.h>

#include "ltswap/ltswap.hpp"

namespace ltswap::test {

namespace fs = std::filesystem;

inline fs::path data_dir() { return LTSWAP_TEST_DATA_DIR; }
inline fs::path fixture_dir() { return LTSWAP_FIXTURE_DIR; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> n{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("ltswap-test-" + std::to_string(rd()) + "-" + std::to_string(n++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

/// Every in-memory artifact of one offline generation run.
struct Built {
  synthetic::Fixture fx;
  BinScheme bins;
  Dictionary dict;
  Corpus corpus;
  VocabTable vocab;
  SentenceIndex index;
  std::vector<WordRecord> candidates;
  GenerationSet gen;
  ForgeResult forged;
  double seconds = 0.0;  // ingest through forge
};

inline Built build(const synthetic::FixtureOptions& fo = {}, bool noisy_mock = true, std::uint64_t seed = 1) {
  Built b;
  b.fx = synthetic::build_fixture(fo);
  const auto t0 = std::chrono::steady_clock::now();
  b.dict = Dictionary(b.fx.dictionary);
  b.corpus = ingest(b.fx.documents, true);
  b.vocab = build_vocab(b.corpus.sentences, b.dict);
  b.index = build_index(b.corpus.sentences);
  const auto table = BuiltinTagger().tag(b.corpus);
  b.candidates = select_candidates(b.vocab, majority_tags(b.corpus, table), b.dict, b.bins);
  llm::MockOptions mo;
  mo.noise = noisy_mock;
  llm::MockChatBackend backend(mo);
  llm::ResponseCache cache;
  llm::Gateway gw(backend, cache);
  llm::TemplateSet templates;
  GenerationOptions go;
  go.seed = seed;
  b.gen = generate_sentences(b.candidates, gw, templates, go);
  ForgeOptions fopt;
  fopt.seed = seed;
  b.forged = forge(b.gen, b.candidates, b.vocab, b.bins, fopt);
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return b;
}

/// Default fixture, built once per process.
inline const Built& built() {
  static const Built b = build();
  return b;
}

// ---- independent checks ----------------------------------------------------

/// S1* and S2* are S1 and S2 with exactly the target positions exchanged.
inline std::string swap_problem(const Quadruplet& q) {
  if (q.w1 == q.w2) return "identical targets";
  if (q.i1 >= q.s1.size() || q.i2 >= q.s2.size()) return "target index out of range";
  if (q.s1[q.i1] != q.w1 || q.s2[q.i2] != q.w2) return "target not at its index";
  if (q.s1.size() != q.s1_star.size() || q.s2.size() != q.s2_star.size()) return "length changed";
  for (std::size_t k = 0; k < q.s1.size(); ++k)
    if (q.s1_star[k] != (k == q.i1 ? q.w2 : q.s1[k])) return "S1* differs from S1 outside the target";
  for (std::size_t k = 0; k < q.s2.size(); ++k)
    if (q.s2_star[k] != (k == q.i2 ? q.w1 : q.s2[k])) return "S2* differs from S2 outside the target";
  return {};
}

/// Bin and POS rules per subtask, recomputed from the candidate list and
/// raw counts.
inline std::string pairing_problem(const Quadruplet& q, const std::vector<WordRecord>& cands, const VocabTable& vocab,
                                   const BinScheme& bins) {
  auto cand = [&](const std::string& w) -> const WordRecord* {
    for (const auto& c : cands)
      if (c.surface == w) return &c;
    return nullptr;
  };
  auto min_bin = [&] { return bins.bin_of(std::min(vocab.count(q.w1), vocab.count(q.w2))); };
  switch (q.subtask) {
    case Subtask::WordSwap: {
      const auto *a = cand(q.w1), *b = cand(q.w2);
      if (!a || !b) return "WordSwap target is not a candidate";
      if (a->pos != b->pos || a->pos != q.pos) return "WordSwap POS mismatch";
      if (a->bin != b->bin || a->bin != q.bin) return "WordSwap bin mismatch";
      if (q.bin.label() == 0) return "WordSwap in bin 0";
      return {};
    }
    case Subtask::InflectionSwap: {
      for (const auto& c : cands) {
        std::set<std::string> family{c.surface};
        for (const auto& i : c.inflections) family.insert(i.surface);
        if (family.count(q.w1) && family.count(q.w2)) {
          if (q.bin != min_bin()) return "InflectionSwap bin is not the rarer word's";
          return {};
        }
      }
      return "InflectionSwap targets are not one family";
    }
    case Subtask::AgreementSwap: {
      const auto* c = cand(q.w1);
      if (!c || c->pos != PosTag::Noun) return "AgreementSwap singular is not a noun candidate";
      const auto pl = c->inflection(InflectionKind::Plural);
      if (!pl || pl->surface != q.w2) return "AgreementSwap plural is not the singular's plural";
      if (q.bin != min_bin()) return "AgreementSwap bin is not the rarer word's";
      return {};
    }
  }
  return "unknown subtask";
}

// ---- test doubles ----------------------------------------------------------

/// Context-free model: every token scores log(1 / (rank + 2)) by a fixed
/// hash, whatever precedes it.
class ContextFreeModel : public TokenModel {
 public:
  double next_logprob(std::span<const std::string>, const std::string& tok) const override { return lp(tok); }
  double masked_logprob(std::span<const std::string> toks, std::size_t pos, std::size_t) const override {
    return lp(toks[pos]);
  }

 private:
  static double lp(const std::string& t) { return -std::log(2.0 + static_cast<double>(synthetic::fnv1a(t) % 997)); }
};

/// Answers every filter prompt with the letter `pick` returns.
inline std::unique_ptr<llm::FunctionChatBackend> letter_backend(std::string id,
                                                                std::function<std::string(const std::string&)> pick) {
  return std::make_unique<llm::FunctionChatBackend>(
      std::move(id), [pick = std::move(pick)](const llm::ChatRequest& r) { return pick(r.prompt); });
}

// ---- local servers and environment -----------------------------------------

/// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  explicit LocalServer(std::function<void(httplib::Server&)> setup) {
    setup(srv_);
    port_ = srv_.bind_to_any_port("127.0.0.1");
    th_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~LocalServer() {
    srv_.stop();
    th_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server srv_;
  int port_ = 0;
  std::thread th_;
};

class EnvVar {
 public:
  EnvVar(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~EnvVar() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace ltswap::test
