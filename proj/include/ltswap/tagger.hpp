#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ltswap/corpus.hpp"
#include "ltswap/error.hpp"
#include "ltswap/io.hpp"
#include "ltswap/lexicon.hpp"
#include "ltswap/pos.hpp"
#include "ltswap/text.hpp"

namespace ltswap {

/// Tag per (sentence, normalized token). nullopt means the token is not a
/// noun/verb candidate in that position.
struct TagTable {
  std::vector<std::vector<std::optional<PosTag>>> tags;

  static TagTable shaped_like(const Corpus& corpus) {
    TagTable t;
    t.tags.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) t.tags.emplace_back(s.tokens.size());
    return t;
  }

  std::optional<PosTag> at(std::uint32_t sentence, std::uint32_t token) const { return tags.at(sentence).at(token); }

  friend bool operator==(const TagTable&, const TagTable&) = default;
};

class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;
  virtual TagTable tag(const Corpus& corpus) const = 0;
};

namespace detail {

inline bool plural_like(std::string_view w) {
  return w.size() > 3 && w.back() == 's' && !text::ends_with(w, "ss") && !text::ends_with(w, "us") &&
         !text::ends_with(w, "is");
}

// Undo the +s/+es/+ies rules; empty when no suffix applies.
inline std::vector<std::string> s_stems(std::string_view w) {
  std::vector<std::string> out;
  if (text::ends_with(w, "ies") && w.size() > 4) out.push_back(std::string(w.substr(0, w.size() - 3)) + "y");
  if (text::ends_with(w, "es") && w.size() > 3) out.emplace_back(w.substr(0, w.size() - 2));
  if (w.size() > 2 && w.back() == 's') out.emplace_back(w.substr(0, w.size() - 1));
  return out;
}

inline bool stem_in(std::string_view w, std::string_view suffix, const std::unordered_set<std::string_view>& set) {
  if (!text::ends_with(w, suffix) || w.size() <= suffix.size() + 1) return false;
  const auto stem = std::string(w.substr(0, w.size() - suffix.size()));
  if (set.count(stem)) return true;
  if (set.count(stem + "e")) return true;
  if (suffix == "ed" && stem.back() == 'i' && set.count(stem.substr(0, stem.size() - 1) + "y")) return true;
  if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] && set.count(stem.substr(0, stem.size() - 1)))
    return true;
  return false;
}

inline bool any_stem_in(std::string_view w, const std::unordered_set<std::string_view>& set) {
  for (const auto& s : s_stems(w))
    if (set.count(s)) return true;
  return false;
}

}  // namespace detail

/// Context for tagging one token: the lowercased previous word (empty at the
/// start of a clause), the tag given to it, and whether the token opens the
/// sentence.
struct TagContext {
  std::string prev;
  std::optional<PosTag> prev_tag;
  bool sentence_initial = true;
};

/// Closed-class lexicon, a small open-class lexicon, one word of left
/// context and suffix fallbacks. Mirrors what a Penn-style tagger would
/// output after mapping to the five kept tags (VBZ and VBN are discards).
inline std::optional<PosTag> tag_word(std::string_view raw_core, const TagContext& ctx) {
  namespace lx = lexicon;
  if (raw_core.empty()) return std::nullopt;
  const auto w = text::to_lower(raw_core);
  if (lx::closed_class().count(w)) return std::nullopt;

  const bool known_noun = lx::nouns().count(w) != 0;
  const bool known_verb = lx::verbs().count(w) != 0;
  const bool irr_plural = lx::irregular_plurals().count(w) != 0;
  const bool irr_past = lx::irregular_past().count(w) != 0;
  const bool plural_noun = irr_plural || detail::any_stem_in(w, lx::nouns());
  const bool third_verb = detail::any_stem_in(w, lx::verbs());
  const bool past = irr_past || detail::stem_in(w, "ed", lx::verbs()) || (w.size() > 4 && text::ends_with(w, "ed"));
  const bool gerund = detail::stem_in(w, "ing", lx::verbs()) || (w.size() > 5 && text::ends_with(w, "ing"));
  const bool known = known_noun || known_verb || irr_plural || irr_past || plural_noun || third_verb ||
                     detail::stem_in(w, "ed", lx::verbs()) || detail::stem_in(w, "ing", lx::verbs());

  // Proper nouns (NNP) are not candidates.
  if (text::is_capitalized(raw_core) && !ctx.sentence_initial && !known) return std::nullopt;
  if (irr_plural) return PosTag::NounPlural;

  const auto& p = ctx.prev;
  const bool after_det = lx::determiners().count(p) || lx::adjectives().count(p);
  const bool after_inf = lx::infinitive_markers().count(p) != 0;
  const bool after_be = lx::be_forms().count(p) != 0;
  const bool after_have = lx::have_forms().count(p) != 0;
  const bool after_plural_subj = lx::subject_plural().count(p) || ctx.prev_tag == PosTag::NounPlural;
  const bool after_singular_subj = lx::subject_singular().count(p) || ctx.prev_tag == PosTag::Noun;

  if (after_det) {
    if (gerund && !known_noun) return PosTag::Noun;
    if (plural_noun || (!known_noun && detail::plural_like(w))) return PosTag::NounPlural;
    return PosTag::Noun;
  }
  if (after_inf) {
    if (irr_past || (past && !known_verb)) return std::nullopt;
    if (gerund && !known_verb) return PosTag::VerbGerund;
    return PosTag::Verb;
  }
  if (after_be) {
    if (gerund) return PosTag::VerbGerund;
    if (past) return std::nullopt;
  }
  if (after_have && past) return std::nullopt;
  if (after_plural_subj && !after_det) {
    if (past) return PosTag::VerbPast;
    if (gerund) return PosTag::VerbGerund;
    if (known_noun && !known_verb) return PosTag::Noun;
    if (detail::plural_like(w) && !known_verb) return PosTag::NounPlural;
    return PosTag::Verb;
  }
  if (after_singular_subj) {
    if (past) return PosTag::VerbPast;
    if (gerund) return PosTag::VerbGerund;
    if ((third_verb || detail::plural_like(w)) && !plural_noun) return std::nullopt;  // VBZ
    if (known_noun) return PosTag::Noun;
    if (plural_noun) return PosTag::NounPlural;
    return std::nullopt;
  }

  if (gerund) return PosTag::VerbGerund;
  if (past) return PosTag::VerbPast;
  if (known_noun) return PosTag::Noun;
  if (known_verb) return PosTag::Verb;
  if (plural_noun) return PosTag::NounPlural;
  if (third_verb) return std::nullopt;
  if (detail::plural_like(w)) return PosTag::NounPlural;
  if (w.size() >= 3) return PosTag::Noun;
  return std::nullopt;
}

class BuiltinTagger : public TaggerBackend {
 public:
  TagTable tag(const Corpus& corpus) const override {
    auto table = TagTable::shaped_like(corpus);
    for (const auto& s : corpus.sentences) tag_sentence(s, table.tags[s.id]);
    return table;
  }

  static void tag_sentence(const SentenceRef& s, std::vector<std::optional<PosTag>>& out) {
    TagContext ctx;
    std::size_t tok = 0;
    for (std::uint32_t k = 0; k < s.raw_tokens.size(); ++k) {
      // First letter-bearing normalized subtoken of this raw token.
      std::optional<std::size_t> slot;
      bool symbols_only = true;
      for (; tok < s.tokens.size() && s.origin[tok] == k; ++tok) {
        if (text::has_letter(s.tokens[tok])) {
          symbols_only = false;
          if (!slot) slot = tok;
        }
      }
      if (symbols_only) {
        ctx.prev.clear();
        ctx.prev_tag.reset();
        continue;
      }
      const auto core = text::letter_core(s.raw_tokens[k]);
      const auto t = tag_word(core, ctx);
      if (slot) out[*slot] = t;
      ctx.prev = text::to_lower(core);
      ctx.prev_tag = t;
      ctx.sentence_initial = false;
    }
  }
};

/// Tags read from a `sentence_id<TAB>token_index<TAB>tag` file. Tokens not
/// listed are discards.
class ImportedTags : public TaggerBackend {
 public:
  explicit ImportedTags(std::filesystem::path path) : path_(std::move(path)) {}

  TagTable tag(const Corpus& corpus) const override {
    std::ifstream in(path_);
    if (!in) throw InputError("cannot read tag file '" + path_.string() + "'");
    auto table = TagTable::shaped_like(corpus);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty()) continue;
      const auto a = line.find('\t');
      const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
      if (b == std::string::npos) throw InputError("expected three tab-separated fields", lineno);
      std::uint64_t sid = 0, idx = 0;
      try {
        std::size_t used = 0;
        sid = std::stoull(line.substr(0, a), &used);
        if (used != a) throw std::invalid_argument("id");
        idx = std::stoull(line.substr(a + 1, b - a - 1), &used);
        if (used != b - a - 1) throw std::invalid_argument("index");
      } catch (const std::logic_error&) {
        throw InputError("bad sentence id or token index", lineno);
      }
      const auto tag_str = line.substr(b + 1);
      const auto parsed = parse_tag(tag_str);
      if (!parsed.known) throw InputError("unknown tag '" + tag_str + "'", lineno);
      if (sid >= table.tags.size() || idx >= table.tags[sid].size())
        throw InputError("token " + std::to_string(sid) + ":" + std::to_string(idx) + " is not in the corpus", lineno);
      table.tags[sid][idx] = parsed.tag;
    }
    return table;
  }

 private:
  std::filesystem::path path_;
};

/// One line per letter-bearing token; discards are written as OTHER.
inline std::string tags_tsv(const Corpus& corpus, const TagTable& table) {
  std::string out;
  for (const auto& s : corpus.sentences)
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!text::has_letter(s.tokens[i])) continue;
      const auto t = table.tags[s.id][i];
      out += std::to_string(s.id) + "\t" + std::to_string(i) + "\t" + std::string(t ? to_string(*t) : "OTHER") + "\n";
    }
  return out;
}

/// Majority tag per word type. Every letter-bearing occurrence votes, a
/// discard counting as its own option; a type keeps a tag only when that tag
/// strictly beats every other option.
inline std::map<std::string, PosTag> majority_tags(const Corpus& corpus, const TagTable& table) {
  constexpr int kOther = 5;
  std::map<std::string, std::array<std::uint64_t, 6>> votes;
  for (const auto& s : corpus.sentences)
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!text::has_letter(s.tokens[i])) continue;
      const auto t = table.tags[s.id][i];
      ++votes[s.tokens[i]][t ? static_cast<int>(*t) : kOther];
    }
  std::map<std::string, PosTag> out;
  for (const auto& [word, v] : votes) {
    int best = 0;
    for (int k = 1; k < 6; ++k)
      if (v[k] > v[best]) best = k;
    bool tie = false;
    for (int k = 0; k < 6; ++k)
      if (k != best && v[k] == v[best]) tie = true;
    if (!tie && best != kOther) out.emplace(word, static_cast<PosTag>(best));
  }
  return out;
}

}  // namespace ltswap
