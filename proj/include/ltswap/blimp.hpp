#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ltswap/bins.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/io.hpp"
#include "ltswap/text.hpp"

namespace ltswap {

struct BlimpPair {
  std::string good, bad;
  std::string uid;  // optional paradigm label
};

/// JSONL with `sentence_good` and `sentence_bad` per line.
inline std::vector<BlimpPair> read_blimp(const std::filesystem::path& path) {
  std::vector<BlimpPair> out;
  io::for_each_jsonl(path, [&](const io::json& j, std::size_t line) {
    if (!j.is_object() || !j.contains("sentence_good") || !j.contains("sentence_bad") ||
        !j["sentence_good"].is_string() || !j["sentence_bad"].is_string())
      throw InputError("BLiMP record needs string fields sentence_good and sentence_bad", line);
    out.push_back({j["sentence_good"].get<std::string>(), j["sentence_bad"].get<std::string>(),
                   j.value("UID", j.value("uid", std::string()))});
  });
  return out;
}

enum class BlimpCase { OneWord, SeveralWords, OrderOnly };

struct BlimpBin {
  FrequencyBin bin;
  BlimpCase kind = BlimpCase::OneWord;
  std::string word;  // the word that set the bin
};

/// Words that differ between the two sentences set the bin (the least
/// frequent of them); a pair with the same words in another order is binned
/// by the least frequent word of the sentence.
inline BlimpBin blimp_bin(const BlimpPair& p, const VocabTable& vocab, const BinScheme& bins) {
  auto words = [](const std::string& s) {
    std::vector<std::string> out;
    for (auto& t : text::tokenize(s))
      if (!text::is_symbol_token(t)) out.push_back(std::move(t));
    return out;
  };
  const auto g = words(p.good), b = words(p.bad);
  std::map<std::string, long> bag;
  for (const auto& t : g) ++bag[t];
  for (const auto& t : b) --bag[t];
  std::vector<std::string> targets;
  for (const auto& [w, c] : bag)
    if (c != 0) targets.push_back(w);
  BlimpBin out;
  if (targets.empty()) {
    out.kind = BlimpCase::OrderOnly;
    targets = g;
    if (targets.empty()) throw InputError("BLiMP pair without words");
  } else {
    // One replaced word shows up once on each side.
    out.kind = targets.size() <= 2 ? BlimpCase::OneWord : BlimpCase::SeveralWords;
  }
  const auto rarest = *std::min_element(targets.begin(), targets.end(), [&](const auto& x, const auto& y) {
    const auto cx = vocab.count(x), cy = vocab.count(y);
    return cx != cy ? cx < cy : x < y;
  });
  out.word = rarest;
  out.bin = bins.bin_of(vocab.count(rarest));
  return out;
}

inline std::vector<BlimpBin> blimp_rebin(const std::vector<BlimpPair>& pairs, const VocabTable& vocab,
                                         const BinScheme& bins) {
  std::vector<BlimpBin> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(blimp_bin(p, vocab, bins));
  return out;
}

inline std::map<std::uint64_t, std::size_t> bin_histogram(const std::vector<BlimpBin>& bins) {
  std::map<std::uint64_t, std::size_t> h;
  for (const auto& b : bins) ++h[b.bin.label()];
  return h;
}

inline std::string_view to_string(BlimpCase c) {
  switch (c) {
    case BlimpCase::OneWord: return "one_word";
    case BlimpCase::SeveralWords: return "several_words";
    case BlimpCase::OrderOnly: return "order_only";
  }
  return "?";
}

}  // namespace ltswap
