#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/bins.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/io.hpp"
#include "ltswap/pos.hpp"
#include "ltswap/text.hpp"

namespace ltswap {

enum class InflectionKind { Plural, ThirdPerson, Past, Gerund };

inline std::string_view to_string(InflectionKind k) {
  switch (k) {
    case InflectionKind::Plural: return "plural";
    case InflectionKind::ThirdPerson: return "third_person";
    case InflectionKind::Past: return "past";
    case InflectionKind::Gerund: return "gerund";
  }
  return "?";
}

inline InflectionKind inflection_kind_from_string(std::string_view s) {
  if (s == "plural") return InflectionKind::Plural;
  if (s == "third_person") return InflectionKind::ThirdPerson;
  if (s == "past") return InflectionKind::Past;
  if (s == "gerund") return InflectionKind::Gerund;
  throw InputError("unknown inflection kind '" + std::string(s) + "'");
}

/// POS of an inflected form. Third-person present forms have no dedicated
/// tag among the five kept ones and are labelled VERB.
inline PosTag pos_of(InflectionKind k) {
  switch (k) {
    case InflectionKind::Plural: return PosTag::NounPlural;
    case InflectionKind::ThirdPerson: return PosTag::Verb;
    case InflectionKind::Past: return PosTag::VerbPast;
    case InflectionKind::Gerund: return PosTag::VerbGerund;
  }
  return PosTag::Verb;
}

/// The six surface forms a generation request can ask for. Third-person
/// present has its own form even though its tag is VERB.
enum class WordForm { Noun, Plural, Verb, Third, Past, Gerund };

inline std::string_view to_string(WordForm f) {
  switch (f) {
    case WordForm::Noun: return "noun";
    case WordForm::Plural: return "plural";
    case WordForm::Verb: return "verb";
    case WordForm::Third: return "third";
    case WordForm::Past: return "past";
    case WordForm::Gerund: return "gerund";
  }
  return "?";
}

inline WordForm word_form_from_string(std::string_view s) {
  for (auto f : {WordForm::Noun, WordForm::Plural, WordForm::Verb, WordForm::Third, WordForm::Past, WordForm::Gerund})
    if (to_string(f) == s) return f;
  throw InputError("unknown word form '" + std::string(s) + "'");
}

/// Phrase used in the default generation prompt ("... as a {pos}.").
inline std::string_view pos_phrase(WordForm f) {
  switch (f) {
    case WordForm::Noun: return "noun";
    case WordForm::Plural: return "plural noun";
    case WordForm::Verb: return "verb";
    case WordForm::Third: return "third-person singular verb";
    case WordForm::Past: return "past tense verb";
    case WordForm::Gerund: return "present continuous verb";
  }
  return "word";
}

inline WordForm form_of(PosTag t) {
  switch (t) {
    case PosTag::Noun: return WordForm::Noun;
    case PosTag::NounPlural: return WordForm::Plural;
    case PosTag::Verb: return WordForm::Verb;
    case PosTag::VerbPast: return WordForm::Past;
    case PosTag::VerbGerund: return WordForm::Gerund;
  }
  return WordForm::Noun;
}

inline WordForm form_of(InflectionKind k) {
  switch (k) {
    case InflectionKind::Plural: return WordForm::Plural;
    case InflectionKind::ThirdPerson: return WordForm::Third;
    case InflectionKind::Past: return WordForm::Past;
    case InflectionKind::Gerund: return WordForm::Gerund;
  }
  return WordForm::Plural;
}

inline PosTag pos_of(WordForm f) {
  switch (f) {
    case WordForm::Noun: return PosTag::Noun;
    case WordForm::Plural: return PosTag::NounPlural;
    case WordForm::Verb:
    case WordForm::Third: return PosTag::Verb;
    case WordForm::Past: return PosTag::VerbPast;
    case WordForm::Gerund: return PosTag::VerbGerund;
  }
  return PosTag::Noun;
}

struct Inflection {
  std::string surface;
  PosTag pos = PosTag::Noun;
  std::uint64_t count = 0;
  InflectionKind kind = InflectionKind::Plural;

  friend bool operator==(const Inflection&, const Inflection&) = default;
};

struct MorphologyOptions {
  // Off: only the plain suffix rules (+s/+es/+ies, +ed/+ied, +ing).
  // On: also e-drop (make->making, bake->baked), consonant doubling
  // (run->running), vowel+y (play->plays) and sh/ch -> +es.
  bool extended_spelling = false;
};

namespace morph {

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// One vowel group and a final consonant-vowel-consonant (final not w/x/y).
inline bool doubles_final_consonant(std::string_view w) {
  if (w.size() < 3) return false;
  const char c3 = w[w.size() - 1], v = w[w.size() - 2], c1 = w[w.size() - 3];
  if (is_vowel(c3) || !is_vowel(v) || is_vowel(c1) || c3 == 'w' || c3 == 'x' || c3 == 'y') return false;
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    const bool vw = is_vowel(c);
    if (vw && !in_vowel) ++groups;
    in_vowel = vw;
  }
  return groups == 1;
}

/// Plural noun and third-person verb share one spelling rule.
inline std::string s_form(std::string_view w, const MorphologyOptions& o = {}) {
  std::string s(w);
  if (s.empty()) return s;
  const char last = s.back();
  if (last == 'y') {
    if (o.extended_spelling && s.size() >= 2 && is_vowel(s[s.size() - 2])) return s + "s";
    s.pop_back();
    return s + "ies";
  }
  if (last == 'x' || last == 'z' || last == 's') return s + "es";
  if (o.extended_spelling && (text::ends_with(s, "sh") || text::ends_with(s, "ch"))) return s + "es";
  return s + "s";
}

inline std::string past_form(std::string_view w, const MorphologyOptions& o = {}) {
  std::string s(w);
  if (s.empty()) return s;
  if (s.back() == 'y') {
    if (o.extended_spelling && s.size() >= 2 && is_vowel(s[s.size() - 2])) return s + "ed";
    s.pop_back();
    return s + "ied";
  }
  if (o.extended_spelling) {
    if (s.back() == 'e') return s + "d";
    if (doubles_final_consonant(s)) return s + s.back() + "ed";
  }
  return s + "ed";
}

inline std::string gerund_form(std::string_view w, const MorphologyOptions& o = {}) {
  std::string s(w);
  if (o.extended_spelling && !s.empty()) {
    if (text::ends_with(s, "ie")) return s.substr(0, s.size() - 2) + "ying";
    if (s.back() == 'e' && !text::ends_with(s, "ee") && !text::ends_with(s, "oe") && !text::ends_with(s, "ye"))
      return s.substr(0, s.size() - 1) + "ing";
    if (doubles_final_consonant(s)) return s + s.back() + "ing";
  }
  return s + "ing";
}

inline std::string apply(InflectionKind k, std::string_view w, const MorphologyOptions& o = {}) {
  switch (k) {
    case InflectionKind::Plural:
    case InflectionKind::ThirdPerson: return s_form(w, o);
    case InflectionKind::Past: return past_form(w, o);
    case InflectionKind::Gerund: return gerund_form(w, o);
  }
  return std::string(w);
}

inline std::vector<InflectionKind> kinds_for(PosTag pos) {
  switch (pos) {
    case PosTag::Noun: return {InflectionKind::Plural};
    case PosTag::Verb: return {InflectionKind::ThirdPerson, InflectionKind::Past, InflectionKind::Gerund};
    default: return {};
  }
}

}  // namespace morph

/// Rule-generated inflections of a base form, each kept only when it is in
/// the dictionary. Nouns get a plural; verbs get third-person, past and
/// gerund. Other tags (already inflected forms) get nothing. Counts come
/// from the corpus (0 when never seen).
inline std::vector<Inflection> inflect(std::string_view word, PosTag pos, const Dictionary& dictionary,
                                       const VocabTable& vocab, const MorphologyOptions& opts = {}) {
  std::vector<Inflection> out;
  for (auto kind : morph::kinds_for(pos)) {
    auto surface = morph::apply(kind, word, opts);
    if (surface == word || !dictionary.contains(surface)) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Inflection& i) { return i.surface == surface; });
    if (dup) continue;
    out.push_back({surface, pos_of(kind), vocab.count(surface), kind});
  }
  return out;
}

struct WordRecord {
  std::string surface;
  PosTag pos = PosTag::Noun;
  std::uint64_t count = 0;
  FrequencyBin bin;
  std::vector<Inflection> inflections;

  std::optional<Inflection> inflection(InflectionKind k) const {
    for (const auto& i : inflections)
      if (i.kind == k) return i;
    return std::nullopt;
  }

  friend bool operator==(const WordRecord&, const WordRecord&) = default;
};

/// Candidate words: dictionary-valid, with one of the five retained tags,
/// and whose own count plus all inflection counts does not exceed the
/// ceiling of the word's bin (words that are rare only as one surface form
/// of a frequent lemma are pruned). Output sorted by surface.
inline std::vector<WordRecord> select_candidates(const VocabTable& vocab, const std::map<std::string, PosTag>& type_tags,
                                                 const Dictionary& dictionary, const BinScheme& bins,
                                                 const MorphologyOptions& opts = {}) {
  std::vector<WordRecord> out;
  for (const auto& [word, count] : vocab.entries) {
    if (count == 0 || !dictionary.contains(word)) continue;
    const auto tag = type_tags.find(word);
    if (tag == type_tags.end()) continue;
    WordRecord r{word, tag->second, count, bins.bin_of(count), inflect(word, tag->second, dictionary, vocab, opts)};
    std::uint64_t family = count;
    for (const auto& i : r.inflections) family += i.count;
    if (!r.bin.open() && family > r.bin.ceiling()) continue;
    out.push_back(std::move(r));
  }
  return out;
}

// ---- candidates.jsonl ------------------------------------------------------

inline io::json to_json(const WordRecord& r) {
  io::json j;
  j["surface"] = r.surface;
  j["pos"] = to_string(r.pos);
  j["count"] = r.count;
  j["bin"] = r.bin.label();
  auto infl = io::json::array();
  for (const auto& i : r.inflections) {
    io::json e;
    e["surface"] = i.surface;
    e["pos"] = to_string(i.pos);
    e["count"] = i.count;
    e["kind"] = to_string(i.kind);
    infl.push_back(std::move(e));
  }
  j["inflections"] = std::move(infl);
  return j;
}

inline WordRecord word_record_from_json(const io::json& j, const BinScheme& bins) {
  WordRecord r;
  r.surface = j.at("surface").get<std::string>();
  r.pos = pos_from_string(j.at("pos").get<std::string>());
  r.count = j.at("count").get<std::uint64_t>();
  r.bin = bins.from_label(j.at("bin").get<std::uint64_t>());
  for (const auto& e : j.at("inflections")) {
    Inflection i;
    i.surface = e.at("surface").get<std::string>();
    i.pos = pos_from_string(e.at("pos").get<std::string>());
    i.count = e.at("count").get<std::uint64_t>();
    i.kind = inflection_kind_from_string(e.at("kind").get<std::string>());
    r.inflections.push_back(std::move(i));
  }
  return r;
}

inline std::vector<WordRecord> read_candidates(const std::filesystem::path& path, const BinScheme& bins) {
  std::vector<WordRecord> out;
  io::for_each_jsonl(path, [&](const io::json& j, std::size_t) { out.push_back(word_record_from_json(j, bins)); });
  return out;
}

}  // namespace ltswap
