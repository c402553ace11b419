#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/corpus.hpp"
#include "ltswap/io.hpp"
#include "ltswap/lexicon.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/text.hpp"

// A small artificial English: pseudo-words with planted counts, each tied to
// one of six "places" that every sentence about the word mentions. The
// fixture corpus and the offline mock LLM are both built from it, so the
// mock can solve the feasibility games the way a real LLM would: by reading
// context.

namespace ltswap::synthetic {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct WordClass {
  std::string_view place;
  std::string_view adj;
};

inline constexpr std::array<WordClass, 6> kClasses{{{"barn", "quiet"},
                                                    {"river", "cold"},
                                                    {"market", "busy"},
                                                    {"forest", "dark"},
                                                    {"kitchen", "warm"},
                                                    {"castle", "old"}}};

inline int class_of(std::string_view word) { return static_cast<int>(fnv1a(word) % kClasses.size()); }

inline bool is_cue(std::string_view tok) {
  for (const auto& c : kClasses)
    if (tok == c.place || tok == c.adj) return true;
  return false;
}

inline bool is_place(std::string_view tok) {
  return std::any_of(kClasses.begin(), kClasses.end(), [&](const WordClass& c) { return c.place == tok; });
}

inline bool is_adj(std::string_view tok) {
  return std::any_of(kClasses.begin(), kClasses.end(), [&](const WordClass& c) { return c.adj == tok; });
}

inline constexpr std::array<std::string_view, 3> kAgreeVerbs{"sleep", "wait", "rest"};
inline constexpr std::array<std::string_view, 3> kAgreeVerbs3{"sleeps", "waits", "rests"};
inline constexpr std::array<std::string_view, 3> kAnaphoraVerbs{"saw", "washed", "hurt"};

// Frames are space-separated token patterns. Slots: {W} target word,
// {PLACE}/{ADJ} class cues; agreement frames use {S}/{P} (singular/plural
// noun), {V}/{V3} (bare/-s agreement verb), {AV} (anaphora verb),
// {DETS}/{DETP} (this,that / these,those).

inline const std::vector<std::string>& generation_frames(WordForm f) {
  static const std::array<std::vector<std::string>, 6> frames{{
      {"the {W} was near the {ADJ} {PLACE} .", "a {W} rested by the {PLACE} .", "we saw a {W} in the {ADJ} {PLACE} ."},
      {"the {W} were near the {ADJ} {PLACE} .", "many {W} rested by the {PLACE} .",
       "we saw some {W} in the {ADJ} {PLACE} ."},
      {"they {W} in the {ADJ} {PLACE} every day .", "we can {W} near the {PLACE} .",
       "i will {W} by the {ADJ} {PLACE} ."},
      {"she {W} in the {ADJ} {PLACE} every day .", "it {W} near the {PLACE} .", "he often {W} by the {ADJ} {PLACE} ."},
      {"they {W} in the {ADJ} {PLACE} yesterday .", "we {W} near the {PLACE} last night .",
       "he {W} by the {ADJ} {PLACE} once ."},
      {"they are {W} in the {ADJ} {PLACE} now .", "we were {W} near the {PLACE} .", "she is {W} by the {ADJ} {PLACE} ."},
  }};
  return frames[static_cast<int>(f)];
}

inline const std::vector<std::string>& corpus_frames(WordForm f) {
  static const std::array<std::vector<std::string>, 6> frames{{
      {"a {W} stood in the {ADJ} {PLACE} .", "we found the {W} near the {PLACE} .",
       "there was a {W} by the {ADJ} {PLACE} ."},
      {"the {ADJ} {W} stood near the {PLACE} .", "we found some {W} in the {ADJ} {PLACE} ."},
      {"they {W} near the {ADJ} {PLACE} .", "we will {W} in the {PLACE} ."},
      {"she {W} near the {ADJ} {PLACE} .", "it {W} in the {PLACE} ."},
      {"they {W} near the {ADJ} {PLACE} .", "he {W} in the {PLACE} ."},
      {"they are {W} near the {ADJ} {PLACE} .", "she was {W} in the {PLACE} ."},
  }};
  return frames[static_cast<int>(f)];
}

/// Untruncated agreement pairs as the mock writes them (singular first).
inline const std::vector<std::string>& agreement_frames(std::string_view kind_distance) {
  static const std::vector<std::string> sv_short{"the {S} {V3} in the {PLACE} .", "the {P} {V} in the {PLACE} ."};
  static const std::vector<std::string> sv_long{"the {S} that can be trusted {V3} near the {PLACE} .",
                                                "the {P} that can be trusted {V} near the {PLACE} ."};
  static const std::vector<std::string> ana_short{"the {S} {AV} itself in the {PLACE} .",
                                                  "the {P} {AV} themselves in the {PLACE} ."};
  static const std::vector<std::string> ana_long{"the {S} that can be trusted {AV} itself near the {PLACE} .",
                                                 "the {P} that can be trusted {AV} themselves near the {PLACE} ."};
  static const std::vector<std::string> det{"{DETS} {S} is {ADJ} .", "{DETP} {P} are {ADJ} ."};
  if (kind_distance == "SUBJ_VERB/SHORT") return sv_short;
  if (kind_distance == "SUBJ_VERB/LONG") return sv_long;
  if (kind_distance == "ANAPHORA/SHORT") return ana_short;
  if (kind_distance == "ANAPHORA/LONG") return ana_long;
  return det;
}

/// Truncated agreement sentences a grammatical judge accepts.
inline const std::vector<std::string>& truncated_agreement_frames() {
  static const std::vector<std::string> frames{
      "the {S} {V3} .",          "the {P} {V} .",
      "the {S} that can be trusted {V3} .", "the {P} that can be trusted {V} .",
      "the {S} {AV} itself .",   "the {P} {AV} themselves .",
      "the {S} that can be trusted {AV} itself .", "the {P} that can be trusted {AV} themselves .",
      "{DETS} {S} .",            "{DETP} {P} ."};
  return frames;
}

/// Surface shape of a pseudo-word form. Pseudo stems never end in s, e, ed
/// or ng, so the suffix alone identifies the form.
enum class Shape { Base, S, Past, Gerund };

inline Shape shape_of(std::string_view w) {
  if (text::ends_with(w, "ing")) return Shape::Gerund;
  if (text::ends_with(w, "ed")) return Shape::Past;
  if (text::ends_with(w, "s")) return Shape::S;
  return Shape::Base;
}

inline Shape shape_of(WordForm f) {
  switch (f) {
    case WordForm::Noun:
    case WordForm::Verb: return Shape::Base;
    case WordForm::Plural:
    case WordForm::Third: return Shape::S;
    case WordForm::Past: return Shape::Past;
    case WordForm::Gerund: return Shape::Gerund;
  }
  return Shape::Base;
}

namespace detail {

template <std::size_t N>
bool in(const std::array<std::string_view, N>& a, std::string_view t) {
  return std::find(a.begin(), a.end(), t) != a.end();
}

inline bool slot_matches(std::string_view slot, std::string_view tok, std::optional<Shape> w_shape) {
  if (slot == "{PLACE}") return is_place(tok);
  if (slot == "{ADJ}") return is_adj(tok);
  if (slot == "{V}") return in(kAgreeVerbs, tok);
  if (slot == "{V3}") return in(kAgreeVerbs3, tok);
  if (slot == "{AV}") return in(kAnaphoraVerbs, tok);
  if (slot == "{DETS}") return tok == "this" || tok == "that";
  if (slot == "{DETP}") return tok == "these" || tok == "those";
  if (!text::has_letter(tok) || is_cue(tok)) return false;
  if (slot == "{S}") return shape_of(tok) == Shape::Base;
  if (slot == "{P}") return shape_of(tok) == Shape::S;
  if (slot == "{W}") return w_shape && shape_of(tok) == *w_shape;
  return false;
}

}  // namespace detail

/// Does `tokens` instantiate `frame`? `w_shape` is the shape required of the
/// {W} slot.
inline bool matches(std::string_view frame, const std::vector<std::string>& tokens,
                    std::optional<Shape> w_shape = std::nullopt) {
  const auto pat = text::split_ws(frame);
  if (pat.size() != tokens.size()) return false;
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i].front() == '{') {
      if (!detail::slot_matches(pat[i], tokens[i], w_shape)) return false;
    } else if (pat[i] != tokens[i]) {
      return false;
    }
  }
  return true;
}

/// Grammatical in the synthetic language: instantiates some generation
/// frame with a correctly shaped target, or a truncated agreement frame.
inline bool grammatical(const std::vector<std::string>& tokens) {
  for (auto f : {WordForm::Noun, WordForm::Plural, WordForm::Verb, WordForm::Third, WordForm::Past, WordForm::Gerund})
    for (const auto& fr : generation_frames(f))
      if (matches(fr, tokens, shape_of(f))) return true;
  for (const auto& fr : truncated_agreement_frames())
    if (matches(fr, tokens)) return true;
  return false;
}

struct Bindings {
  std::string w, s, p;
  int cls = 0;
  std::size_t variant = 0;  // picks agreement verb and determiner
};

/// Fills a frame and renders it as ordinary prose ("The cat was near the
/// old castle.").
inline std::string render(std::string_view frame, const Bindings& b) {
  std::string out;
  bool first = true;
  for (const auto& tok : text::split_ws(frame)) {
    std::string t;
    if (tok == "{W}") t = b.w;
    else if (tok == "{S}") t = b.s;
    else if (tok == "{P}") t = b.p;
    else if (tok == "{PLACE}") t = kClasses[b.cls].place;
    else if (tok == "{ADJ}") t = kClasses[b.cls].adj;
    else if (tok == "{V}") t = kAgreeVerbs[b.variant % 3];
    else if (tok == "{V3}") t = kAgreeVerbs3[b.variant % 3];
    else if (tok == "{AV}") t = kAnaphoraVerbs[b.variant % 3];
    else if (tok == "{DETS}") t = b.variant % 2 ? "that" : "this";
    else if (tok == "{DETP}") t = b.variant % 2 ? "those" : "these";
    else t = tok;
    if (!first && text::is_symbol_token(t) && t.size() == 1) {
      out += t;
      continue;
    }
    if (!first) out += ' ';
    if (first && !t.empty() && t[0] >= 'a' && t[0] <= 'z') t[0] = static_cast<char>(t[0] - 'a' + 'A');
    out += t;
    first = false;
  }
  return out;
}

// ---- fixture -------------------------------------------------------------

struct PlantedInflection {
  InflectionKind kind;
  std::string surface;
  std::uint64_t count = 0;
  bool in_dictionary = true;
};

struct PseudoWord {
  std::string stem;
  PosTag pos = PosTag::Noun;
  std::uint64_t count = 0;
  std::vector<PlantedInflection> inflections;
};

struct FixtureOptions {
  std::uint64_t seed = 20240611;
  std::size_t target_words = 50000;
  std::size_t documents = 4;
};

struct Fixture {
  std::vector<RawDocument> documents;
  std::vector<std::string> dictionary;  // sorted
  std::vector<PseudoWord> words;
};

// Words every generation frame, agreement answer and filler needs. The
// fillers are written so that each of these occurs in the corpus.
inline const std::vector<std::string>& filler_frames() {
  static const std::vector<std::string> f{
      "the {ADJ} {PLACE} was near the {PLACE} .",
      "we saw a {ADJ} {PLACE} yesterday .",
      "many people rested by the {PLACE} every day .",
      "they are in the {PLACE} now .",
      "i will wait in the {ADJ} {PLACE} .",
      "she often sleeps near the {PLACE} .",
      "it rests in the {PLACE} once a week .",
      "he waits by the {PLACE} last night .",
      "they washed themselves in the {ADJ} {PLACE} yesterday .",
      "the dog hurt itself near the {PLACE} .",
      "the man saw himself in the water .",
      "this {PLACE} is {ADJ} .",
      "these rooms are {ADJ} .",
      "those birds sleep in the {PLACE} .",
      "that man can be trusted .",
      "the woman that can be trusted waits near the {PLACE} .",
      "the men rest now .",
      "they were in the {ADJ} {PLACE} .",
      "we can sleep there .",
      "there was a fire in the {PLACE} .",
      "we found some apples in the {PLACE} .",
      "they stood near the {ADJ} {PLACE} .",
      "some children were near the {PLACE} .",
      "the cats sleep and the dog rests .",
      "Anna's {PLACE} was 20 years old .",
      "she is happy , and he is tired .",
      "it was a long day !",
      "did they wait in the {PLACE} ?",
  };
  return f;
}

inline const std::vector<std::string>& dictionary_function_words() {
  static const std::vector<std::string> w{"a", "and", "are", "be", "by", "can", "did", "every", "he", "i", "in",
                                          "is", "it", "itself", "many", "near", "now", "often", "once", "she",
                                          "some", "that", "the", "themselves", "there", "these", "they", "this",
                                          "those", "was", "we", "were", "will", "yesterday"};
  return w;
}

namespace detail {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // Plain modulo keeps the stream identical across standard libraries.
  std::uint64_t below(std::uint64_t n) { return n ? gen() % n : 0; }
};

inline std::string make_stem(Rng& rng) {
  static constexpr std::array<std::string_view, 22> onset{"b", "bl", "br", "d", "dr", "f", "fl", "g", "gl", "gr", "k",
                                                          "kr", "l", "m", "n", "p", "pl", "pr", "sn", "st", "tr", "v"};
  static constexpr std::array<std::string_view, 5> vowel{"a", "e", "i", "o", "u"};
  static constexpr std::array<std::string_view, 9> coda{"m", "n", "l", "r", "k", "p", "t", "ck", "rt"};
  std::string s;
  s += onset[rng.below(onset.size())];
  s += vowel[rng.below(vowel.size())];
  s += onset[rng.below(onset.size())];
  if (rng.below(5) == 0) {
    s += vowel[rng.below(4)];  // a e i o
    s += "ty";
  } else {
    s += vowel[rng.below(vowel.size())];
    s += coda[rng.below(coda.size())];
  }
  return s;
}

inline bool is_reserved(const std::string& w) {
  return lexicon::closed_class().count(w) || lexicon::nouns().count(w) || lexicon::verbs().count(w) || is_cue(w);
}

}  // namespace detail

/// Per-POS plan: how many pseudo-words to plant in each bin (by label).
inline const std::vector<std::pair<std::uint64_t, int>>& count_plan() {
  static const std::vector<std::pair<std::uint64_t, int>> plan{{1, 14}, {2, 14}, {4, 12}, {8, 10}, {16, 8},
                                                               {32, 5}, {64, 3}, {128, 2}, {256, 2}, {512, 1}};
  return plan;
}

inline std::vector<PseudoWord> make_words(std::uint64_t seed) {
  detail::Rng rng(seed);
  std::set<std::string> used;
  std::vector<PseudoWord> out;
  for (auto pos : {PosTag::Noun, PosTag::Verb}) {
    for (const auto& [label, n] : count_plan()) {
      for (int i = 0; i < n; ++i) {
        PseudoWord w;
        do w.stem = detail::make_stem(rng);
        while (used.count(w.stem) || detail::is_reserved(w.stem));
        used.insert(w.stem);
        w.pos = pos;
        w.count = label == 512 ? 512 + rng.below(40) : label + rng.below(label);
        const std::uint64_t ceiling = label == 512 ? 0 : 2 * label;
        const auto kinds = morph::kinds_for(pos);
        std::uint64_t slack = ceiling ? ceiling - w.count : 60;
        const bool prune = ceiling && rng.below(10) == 0;
        for (auto k : kinds) {
          PlantedInflection p{k, morph::apply(k, w.stem), 0, rng.below(10) != 0};
          if (prune && k == kinds.front()) {
            p.count = slack + 1;
            p.in_dictionary = true;
          } else if (!prune && rng.below(2) == 0) {
            p.count = rng.below(slack / kinds.size() + 1);
            slack -= p.count;
          }
          w.inflections.push_back(p);
        }
        out.push_back(std::move(w));
      }
    }
  }
  return out;
}

inline Fixture build_fixture(const FixtureOptions& opt = {}) {
  Fixture fx;
  fx.words = make_words(opt.seed);
  detail::Rng rng(opt.seed ^ 0x9E3779B97F4A7C15ull);

  std::vector<std::string> sentences;
  std::size_t words = 0;
  auto emit = [&](std::string_view frame, const Bindings& b) {
    auto s = render(frame, b);
    words += text::split_ws(s).size();
    sentences.push_back(std::move(s));
  };
  auto plant = [&](const std::string& surface, WordForm form, std::uint64_t count) {
    const auto& frames = corpus_frames(form);
    for (std::uint64_t i = 0; i < count; ++i) {
      Bindings b;
      b.w = surface;
      b.cls = class_of(surface);
      emit(frames[(fnv1a(surface) + i) % frames.size()], b);
    }
  };
  std::set<std::string> dict(dictionary_function_words().begin(), dictionary_function_words().end());
  for (const auto& w : fx.words) {
    dict.insert(w.stem);
    plant(w.stem, form_of(w.pos), w.count);
    for (const auto& infl : w.inflections) {
      if (infl.in_dictionary) dict.insert(infl.surface);
      plant(infl.surface, form_of(infl.kind), infl.count);
    }
  }
  const auto& fill = filler_frames();
  for (std::size_t i = 0; words < opt.target_words; ++i) {
    Bindings b;
    b.cls = static_cast<int>(rng.below(kClasses.size()));
    emit(fill[i < fill.size() ? i : rng.below(fill.size())], b);
  }
  for (std::size_t i = sentences.size(); i > 1; --i) std::swap(sentences[i - 1], sentences[rng.below(i)]);

  const std::size_t ndocs = std::max<std::size_t>(1, opt.documents);
  fx.documents.resize(ndocs);
  for (std::size_t d = 0; d < ndocs; ++d) fx.documents[d].source_id = "doc-" + std::to_string(d) + ".txt";
  std::size_t line_len = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto& doc = fx.documents[i * ndocs / sentences.size()].text;
    if (!doc.empty()) {
      const bool break_line = line_len >= 1 + rng.below(6);
      doc += break_line ? '\n' : ' ';
      if (break_line) line_len = 0;
    }
    doc += sentences[i];
    ++line_len;
  }
  for (auto& d : fx.documents) d.text += '\n';
  fx.dictionary.assign(dict.begin(), dict.end());
  return fx;
}

inline io::json to_json(const PseudoWord& w) {
  io::json j;
  j["stem"] = w.stem;
  j["pos"] = to_string(w.pos);
  j["count"] = w.count;
  auto infl = io::json::array();
  for (const auto& i : w.inflections)
    infl.push_back({{"kind", to_string(i.kind)}, {"surface", i.surface}, {"count", i.count}, {"in_dictionary", i.in_dictionary}});
  j["inflections"] = std::move(infl);
  return j;
}

/// corpus/doc-N.txt, dictionary.txt and planted.jsonl (the ground-truth
/// counts, for tests).
inline void write_fixture(const std::filesystem::path& dir, const Fixture& fx) {
  for (const auto& d : fx.documents) io::write_atomic(dir / "corpus" / d.source_id, d.text);
  std::string dict;
  for (const auto& w : fx.dictionary) dict += w + "\n";
  io::write_atomic(dir / "dictionary.txt", dict);
  std::vector<io::json> planted;
  for (const auto& w : fx.words) planted.push_back(to_json(w));
  io::write_jsonl(dir / "planted.jsonl", planted);
}

}  // namespace ltswap::synthetic
