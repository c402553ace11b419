#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ltswap/error.hpp"

namespace ltswap {

/// The only part-of-speech tags kept downstream. Anything else is a discard.
enum class PosTag { Noun, NounPlural, Verb, VerbPast, VerbGerund };

inline std::string_view to_string(PosTag t) {
  switch (t) {
    case PosTag::Noun: return "NOUN";
    case PosTag::NounPlural: return "NOUN_PLURAL";
    case PosTag::Verb: return "VERB";
    case PosTag::VerbPast: return "VERB_PAST";
    case PosTag::VerbGerund: return "VERB_GERUND";
  }
  return "?";
}

inline bool is_nominal(PosTag t) { return t == PosTag::Noun || t == PosTag::NounPlural; }

/// Coarse column used in count tables ("NOUN" / "VERB").
inline std::string_view coarse(PosTag t) { return is_nominal(t) ? "NOUN" : "VERB"; }

/// Result of reading a tag string: a kept tag, an explicit discard, or an
/// unrecognized string.
struct ParsedTag {
  bool known = false;
  std::optional<PosTag> tag;
};

/// Accepts our five names, "OTHER"/"X", and the Penn Treebank tag set (as
/// emitted by common taggers). NN->NOUN, NNS->NOUN_PLURAL, VB/VBP->VERB,
/// VBD->VERB_PAST, VBG->VERB_GERUND; every other Penn tag is a discard.
inline ParsedTag parse_tag(std::string_view s) {
  if (s == "NOUN" || s == "NN") return {true, PosTag::Noun};
  if (s == "NOUN_PLURAL" || s == "NNS") return {true, PosTag::NounPlural};
  if (s == "VERB" || s == "VB" || s == "VBP") return {true, PosTag::Verb};
  if (s == "VERB_PAST" || s == "VBD") return {true, PosTag::VerbPast};
  if (s == "VERB_GERUND" || s == "VBG") return {true, PosTag::VerbGerund};
  static constexpr std::string_view kDiscards[] = {
      "OTHER", "X",   "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",   "JJR", "JJS", "LS",
      "MD",    "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP",  "SYM",
      "TO",    "UH",  "VBN", "VBZ", "WDT",  "WP",  "WP$", "WRB", ".",   ",",   ":",   "``",
      "''",    "(",   ")",   "$",   "#",    "-LRB-", "-RRB-", "-NONE-"};
  for (auto d : kDiscards)
    if (s == d) return {true, std::nullopt};
  return {false, std::nullopt};
}

inline PosTag pos_from_string(std::string_view s) {
  const auto p = parse_tag(s);
  if (!p.known || !p.tag) throw InputError("unknown POS tag '" + std::string(s) + "'");
  return *p.tag;
}

}  // namespace ltswap
