#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/bins.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/io.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/pos.hpp"
#include "ltswap/text.hpp"

namespace ltswap {

enum class Subtask { WordSwap, InflectionSwap, AgreementSwap };
enum class AgreementKind { SubjVerb, Anaphora, DetNoun };
enum class Distance { Short, Long };

inline std::string_view to_string(Subtask s) {
  switch (s) {
    case Subtask::WordSwap: return "WORDSWAP";
    case Subtask::InflectionSwap: return "INFLECTIONSWAP";
    case Subtask::AgreementSwap: return "AGREEMENTSWAP";
  }
  return "?";
}

/// Two-letter label used in ids and table columns.
inline std::string_view short_name(Subtask s) {
  switch (s) {
    case Subtask::WordSwap: return "WS";
    case Subtask::InflectionSwap: return "IS";
    case Subtask::AgreementSwap: return "AS";
  }
  return "?";
}

inline Subtask subtask_from_string(std::string_view s) {
  if (s == "WORDSWAP" || s == "WS") return Subtask::WordSwap;
  if (s == "INFLECTIONSWAP" || s == "IS") return Subtask::InflectionSwap;
  if (s == "AGREEMENTSWAP" || s == "AS") return Subtask::AgreementSwap;
  throw InputError("unknown subtask '" + std::string(s) + "'");
}

inline std::string_view to_string(AgreementKind k) {
  switch (k) {
    case AgreementKind::SubjVerb: return "SUBJ_VERB";
    case AgreementKind::Anaphora: return "ANAPHORA";
    case AgreementKind::DetNoun: return "DET_NOUN";
  }
  return "?";
}

inline AgreementKind agreement_kind_from_string(std::string_view s) {
  if (s == "SUBJ_VERB") return AgreementKind::SubjVerb;
  if (s == "ANAPHORA") return AgreementKind::Anaphora;
  if (s == "DET_NOUN") return AgreementKind::DetNoun;
  throw InputError("unknown agreement kind '" + std::string(s) + "'");
}

inline std::string_view to_string(Distance d) { return d == Distance::Short ? "SHORT" : "LONG"; }

inline Distance distance_from_string(std::string_view s) {
  if (s == "SHORT") return Distance::Short;
  if (s == "LONG") return Distance::Long;
  throw InputError("unknown distance '" + std::string(s) + "'");
}

struct Quadruplet {
  std::string id;
  Subtask subtask = Subtask::WordSwap;
  FrequencyBin bin;
  PosTag pos = PosTag::Noun;
  std::optional<AgreementKind> agreement_kind;
  std::optional<Distance> distance;
  std::string w1, w2;
  std::uint32_t i1 = 0, i2 = 0;
  std::vector<std::string> s1, s2, s1_star, s2_star;
  std::vector<std::string> gen_hashes;
  std::vector<std::uint32_t> sentence_ids;  // generated-sentence ids

  friend bool operator==(const Quadruplet&, const Quadruplet&) = default;
};

/// Multiset equality of S1+S2 and S1*+S2*.
inline bool bag_identity(const Quadruplet& q) {
  std::map<std::string_view, long> bag;
  for (const auto* s : {&q.s1, &q.s2})
    for (const auto& t : *s) ++bag[t];
  for (const auto* s : {&q.s1_star, &q.s2_star})
    for (const auto& t : *s) --bag[t];
  return std::all_of(bag.begin(), bag.end(), [](const auto& kv) { return kv.second == 0; });
}

/// Keep iff every letter-bearing token occurs in the corpus. `exempt`
/// words (the generation target) are not checked, since inflections may
/// legitimately be unseen.
inline bool oov_filter(const std::vector<std::string>& tokens, const VocabTable& vocab,
                       const std::vector<std::string>& exempt = {}) {
  for (const auto& t : tokens) {
    if (text::is_symbol_token(t)) continue;
    if (std::find(exempt.begin(), exempt.end(), t) != exempt.end()) continue;
    if (!vocab.in_corpus(t)) return false;
  }
  return true;
}

inline std::size_t occurrences(const std::vector<std::string>& tokens, std::string_view w) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), w));
}

namespace discard {
inline constexpr std::string_view kIdenticalTargets = "identical_targets";
inline constexpr std::string_view kTargetMissing = "target_missing";
inline constexpr std::string_view kTargetDuplicated = "target_duplicated";
inline constexpr std::string_view kCrossOccurrence = "cross_occurrence";
inline constexpr std::string_view kSwapCollision = "swap_collision";
inline constexpr std::string_view kOov = "oov";
inline constexpr std::string_view kUnextractable = "unextractable";
inline constexpr std::string_view kUnpaired = "unpaired";
inline constexpr std::string_view kAgreementNotFound = "agreement_not_found";
inline constexpr std::string_view kAgreementCheck = "agreement_check_failed";
inline constexpr std::string_view kSentenceCount = "sentence_count";
}  // namespace discard

struct SwapOutcome {
  std::optional<Quadruplet> quad;
  std::string reason;  // set when quad is empty
};

/// Builds S1* (w1 -> w2 at its position in S1) and S2* (w2 -> w1 in S2).
/// Each target must occur exactly once in its own sentence and not at all
/// in the other one.
inline SwapOutcome swap(const std::vector<std::string>& s1, const std::string& w1, const std::vector<std::string>& s2,
                        const std::string& w2) {
  if (w1 == w2) return {std::nullopt, std::string(discard::kIdenticalTargets)};
  const auto n1 = occurrences(s1, w1), n2 = occurrences(s2, w2);
  if (n1 == 0 || n2 == 0) return {std::nullopt, std::string(discard::kTargetMissing)};
  if (n1 > 1 || n2 > 1) return {std::nullopt, std::string(discard::kTargetDuplicated)};
  if (occurrences(s1, w2) || occurrences(s2, w1)) return {std::nullopt, std::string(discard::kCrossOccurrence)};
  Quadruplet q;
  q.w1 = w1;
  q.w2 = w2;
  q.i1 = static_cast<std::uint32_t>(std::find(s1.begin(), s1.end(), w1) - s1.begin());
  q.i2 = static_cast<std::uint32_t>(std::find(s2.begin(), s2.end(), w2) - s2.begin());
  q.s1 = s1;
  q.s2 = s2;
  q.s1_star = s1;
  q.s1_star[q.i1] = w2;
  q.s2_star = s2;
  q.s2_star[q.i2] = w1;
  // Same frame on both sides: S1* is S2, so no model can separate the pair.
  if (q.s1_star == q.s2) return {std::nullopt, std::string(discard::kSwapCollision)};
  return {std::move(q), {}};
}

// ---- pairing ---------------------------------------------------------------

/// A generated sentence ready for pairing: target occurs once, OOV-clean.
struct PairItem {
  std::uint32_t sentence_id = 0;
  std::string word;
};

/// Seeded Fisher-Yates with plain modulo, so the order is identical on every
/// standard library.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[gen() % i]);
}

/// Pairs items of one (bin, POS) group after a seeded shuffle. Each item is
/// used at most once; an item is only paired with an item of a different
/// word. Leftovers are returned through `unpaired`.
inline std::vector<std::pair<PairItem, PairItem>> pair_group(std::vector<PairItem> items, std::uint64_t seed,
                                                             std::vector<PairItem>* unpaired = nullptr) {
  seeded_shuffle(items, seed);
  std::vector<std::pair<PairItem, PairItem>> out;
  std::vector<bool> used(items.size(), false);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (used[i]) continue;
    std::optional<std::size_t> partner;
    for (std::size_t j = i + 1; j < items.size() && !partner; ++j)
      if (!used[j] && items[j].word != items[i].word) partner = j;
    if (!partner) {
      if (unpaired) unpaired->push_back(items[i]);
      continue;
    }
    used[i] = used[*partner] = true;
    out.emplace_back(items[i], items[*partner]);
  }
  return out;
}

struct GroupKey {
  std::uint64_t bin = 0;
  PosTag pos = PosTag::Noun;
  auto operator<=>(const GroupKey&) const = default;
};

/// WordSwap pairing: items grouped by (bin, POS) of their target word; bin 0
/// never pairs. `record_of` maps a word to its candidate record.
template <class RecordOf>
std::map<GroupKey, std::vector<std::pair<PairItem, PairItem>>> pair_wordswap(const std::vector<PairItem>& items,
                                                                             RecordOf&& record_of, std::uint64_t seed,
                                                                             std::vector<PairItem>* unpaired = nullptr) {
  std::map<GroupKey, std::vector<PairItem>> groups;
  for (const auto& it : items) {
    const WordRecord& r = record_of(it.word);
    if (r.bin.label() == 0) {
      if (unpaired) unpaired->push_back(it);
      continue;
    }
    groups[{r.bin.label(), r.pos}].push_back(it);
  }
  std::map<GroupKey, std::vector<std::pair<PairItem, PairItem>>> out;
  for (auto& [key, members] : groups) {
    const auto group_seed = seed ^ (key.bin * 0x9E3779B97F4A7C15ull) ^ (static_cast<std::uint64_t>(key.pos) << 56);
    out[key] = pair_group(std::move(members), group_seed, unpaired);
  }
  return out;
}

/// One word family for InflectionSwap: the candidate and its inflections,
/// each with the ids of its usable sentences.
struct FamilyMember {
  std::string surface;
  std::uint64_t count = 0;
  std::vector<std::uint32_t> sentences;
};

struct FamilyPair {
  std::size_t a = 0, b = 0;  // member indexes
  std::uint32_t sa = 0, sb = 0;
};

/// Base-inflection pairs first, then pairs of two inflections
/// (surmounted/surmounts). Pairs are taken round-robin, each sentence used
/// once, until no pair has an unused sentence on both sides.
inline std::vector<FamilyPair> pair_family(const std::vector<FamilyMember>& members) {
  std::vector<std::pair<std::size_t, std::size_t>> plan;
  for (std::size_t j = 1; j < members.size(); ++j) plan.emplace_back(0, j);
  for (std::size_t i = 1; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) plan.emplace_back(i, j);
  std::vector<std::size_t> next(members.size(), 0);
  std::vector<FamilyPair> out;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& [a, b] : plan) {
      if (next[a] >= members[a].sentences.size() || next[b] >= members[b].sentences.size()) continue;
      out.push_back({a, b, members[a].sentences[next[a]++], members[b].sentences[next[b]++]});
      progress = true;
    }
  }
  return out;
}

// ---- serialization ---------------------------------------------------------

inline io::json to_json(const Quadruplet& q) {
  io::json j;
  j["id"] = q.id;
  j["subtask"] = to_string(q.subtask);
  j["bin"] = q.bin.label();
  j["pos"] = to_string(q.pos);
  if (q.agreement_kind) j["agreement_kind"] = to_string(*q.agreement_kind);
  if (q.distance) j["distance"] = to_string(*q.distance);
  j["w1"] = q.w1;
  j["w2"] = q.w2;
  j["i1"] = q.i1;
  j["i2"] = q.i2;
  j["s1"] = q.s1;
  j["s2"] = q.s2;
  j["s1_star"] = q.s1_star;
  j["s2_star"] = q.s2_star;
  j["provenance"] = {{"gen_hashes", q.gen_hashes}, {"sentences", q.sentence_ids}};
  return j;
}

inline Quadruplet quadruplet_from_json(const io::json& j, const BinScheme& bins) {
  Quadruplet q;
  q.id = j.at("id").get<std::string>();
  q.subtask = subtask_from_string(j.at("subtask").get<std::string>());
  q.bin = bins.from_label(j.at("bin").get<std::uint64_t>());
  q.pos = pos_from_string(j.at("pos").get<std::string>());
  if (j.contains("agreement_kind")) q.agreement_kind = agreement_kind_from_string(j["agreement_kind"].get<std::string>());
  if (j.contains("distance")) q.distance = distance_from_string(j["distance"].get<std::string>());
  q.w1 = j.at("w1").get<std::string>();
  q.w2 = j.at("w2").get<std::string>();
  q.i1 = j.at("i1").get<std::uint32_t>();
  q.i2 = j.at("i2").get<std::uint32_t>();
  q.s1 = j.at("s1").get<std::vector<std::string>>();
  q.s2 = j.at("s2").get<std::vector<std::string>>();
  q.s1_star = j.at("s1_star").get<std::vector<std::string>>();
  q.s2_star = j.at("s2_star").get<std::vector<std::string>>();
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    if (p.contains("gen_hashes")) q.gen_hashes = p["gen_hashes"].get<std::vector<std::string>>();
    if (p.contains("sentences")) q.sentence_ids = p["sentences"].get<std::vector<std::uint32_t>>();
  }
  if (q.i1 >= q.s1.size() || q.i2 >= q.s2.size()) throw InputError("quadruplet " + q.id + ": position out of range");
  return q;
}

inline std::vector<Quadruplet> read_quadruplets(const std::filesystem::path& path, const BinScheme& bins) {
  std::vector<Quadruplet> out;
  io::for_each_jsonl(path, [&](const io::json& j, std::size_t) { out.push_back(quadruplet_from_json(j, bins)); });
  return out;
}

}  // namespace ltswap
