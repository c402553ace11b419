#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/lexicon.hpp"
#include "ltswap/llm/answer.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/quadruplet.hpp"

namespace ltswap::agreement {

struct Spec {
  AgreementKind kind = AgreementKind::SubjVerb;
  Distance distance = Distance::Short;
};

/// The five prompt variants, in template order.
inline const std::vector<Spec>& all_specs() {
  static const std::vector<Spec> s{{AgreementKind::SubjVerb, Distance::Short},
                                   {AgreementKind::SubjVerb, Distance::Long},
                                   {AgreementKind::Anaphora, Distance::Short},
                                   {AgreementKind::Anaphora, Distance::Long},
                                   {AgreementKind::DetNoun, Distance::Short}};
  return s;
}

inline std::string template_name(const Spec& s) {
  switch (s.kind) {
    case AgreementKind::SubjVerb: return s.distance == Distance::Short ? "agreement_subj_verb_short" : "agreement_subj_verb_long";
    case AgreementKind::Anaphora: return s.distance == Distance::Short ? "agreement_anaphora_short" : "agreement_anaphora_long";
    case AgreementKind::DetNoun:
      if (s.distance == Distance::Long) throw ContractViolation("DET_NOUN has no long-distance variant");
      return "agreement_det_noun";
  }
  return {};
}

inline std::optional<std::size_t> find_token(const std::vector<std::string>& s, std::string_view w) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == w) return i;
  return std::nullopt;
}

inline bool contains_sequence(const std::vector<std::string>& s, const std::vector<std::string_view>& seq) {
  if (seq.empty() || s.size() < seq.size()) return false;
  for (std::size_t i = 0; i + seq.size() <= s.size(); ++i) {
    std::size_t k = 0;
    while (k < seq.size() && s[i + k] == seq[k]) ++k;
    if (k == seq.size()) return true;
  }
  return false;
}

inline bool has_relative_clause(const std::vector<std::string>& s) {
  return contains_sequence(s, {"that", "can", "be"});
}

/// Index of the word that carries the agreement: the noun itself for
/// DET_NOUN, the last reflexive for ANAPHORA, and for SUBJ_VERB the first
/// token after the noun that differs from the partner sentence (aligned on
/// the nouns). Without a partner the SUBJ_VERB verb is only located when it
/// directly follows the noun.
inline std::optional<std::size_t> agreement_index(const std::vector<std::string>& s, AgreementKind kind,
                                                  std::size_t noun, const std::vector<std::string>* partner = nullptr,
                                                  std::size_t partner_noun = 0) {
  switch (kind) {
    case AgreementKind::DetNoun: return noun;
    case AgreementKind::Anaphora: {
      std::optional<std::size_t> last;
      for (std::size_t i = noun + 1; i < s.size(); ++i)
        if (lexicon::reflexives().count(s[i])) last = i;
      return last;
    }
    case AgreementKind::SubjVerb: {
      if (!partner) {
        if (noun + 1 < s.size() && s[noun + 1] != "that" && !text::is_symbol_token(s[noun + 1])) return noun + 1;
        return std::nullopt;
      }
      for (std::size_t k = 1; noun + k < s.size() && partner_noun + k < partner->size(); ++k) {
        const auto& t = s[noun + k];
        if (t != (*partner)[partner_noun + k]) {
          if (text::is_symbol_token(t)) return std::nullopt;
          return noun + k;
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Keeps tokens up to and including `index`, then closes with ".".
inline std::vector<std::string> truncate_after(const std::vector<std::string>& s, std::size_t index) {
  std::vector<std::string> out(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(std::min(index + 1, s.size())));
  out.emplace_back(".");
  return out;
}

inline std::optional<std::vector<std::string>> truncate_after_agreement(const std::vector<std::string>& s,
                                                                        AgreementKind kind, std::size_t noun) {
  const auto idx = agreement_index(s, kind, noun);
  if (!idx) return std::nullopt;
  return truncate_after(s, *idx);
}

namespace detail {

inline bool irregular_pair(std::string_view sing, std::string_view plur) {
  static const std::vector<std::pair<std::string_view, std::string_view>> pairs{
      {"is", "are"}, {"was", "were"}, {"has", "have"}, {"does", "do"}};
  for (const auto& [s, p] : pairs)
    if (s == sing && p == plur) return true;
  return false;
}

inline bool singular_verb(std::string_view v) {
  if (v == "is" || v == "was" || v == "has" || v == "does") return true;
  if (v == "are" || v == "were" || v == "have" || v == "do") return false;
  return text::ends_with(v, "s");
}

inline bool reflexive_singular(std::string_view r) { return r == "himself" || r == "herself" || r == "itself"; }

}  // namespace detail

struct CheckResult {
  bool pass = false;
  std::string reason;
};

/// Validates the correct pair of an AgreementSwap quadruplet: S1 must carry
/// singular agreement with w1 and S2 plural agreement with w2. Both sentences
/// are expected in truncated form (agreement word right before the final
/// ".").
inline CheckResult check_agreement(const Quadruplet& q) {
  if (!q.agreement_kind || !q.distance) return {false, "missing agreement kind or distance"};
  const auto kind = *q.agreement_kind;
  if (q.s1.size() < 2 || q.s2.size() < 2) return {false, "sentence too short"};
  const auto& a1 = q.s1[q.s1.size() - 2];
  const auto& a2 = q.s2[q.s2.size() - 2];
  for (const auto* s : {&q.s1, &q.s2}) {
    const bool rel = has_relative_clause(*s);
    if (*q.distance == Distance::Long && !rel) return {false, "long distance without 'that can be'"};
    if (*q.distance == Distance::Short && rel) return {false, "short distance with a relative clause"};
  }
  switch (kind) {
    case AgreementKind::SubjVerb: {
      if (q.i1 + 1 >= q.s1.size() - 1 || q.i2 + 1 >= q.s2.size() - 1) return {false, "no verb after the noun"};
      if (!detail::singular_verb(a1)) return {false, "singular noun with plural verb '" + a1 + "'"};
      if (detail::singular_verb(a2)) return {false, "plural noun with singular verb '" + a2 + "'"};
      MorphologyOptions ext;
      ext.extended_spelling = true;
      if (a1 != morph::s_form(a2) && a1 != morph::s_form(a2, ext) && !detail::irregular_pair(a1, a2))
        return {false, "verbs '" + a1 + "' and '" + a2 + "' are not forms of one verb"};
      return {true, {}};
    }
    case AgreementKind::Anaphora: {
      if (!lexicon::reflexives().count(a1) || !lexicon::reflexives().count(a2)) return {false, "no reflexive"};
      if (!detail::reflexive_singular(a1)) return {false, "singular noun with reflexive '" + a1 + "'"};
      if (a2 != "themselves") return {false, "plural noun with reflexive '" + a2 + "'"};
      return {true, {}};
    }
    case AgreementKind::DetNoun: {
      if (q.i1 == 0 || q.i2 == 0) return {false, "no determiner before the noun"};
      const auto& d1 = q.s1[q.i1 - 1];
      const auto& d2 = q.s2[q.i2 - 1];
      if (d1 != "this" && d1 != "that") return {false, "singular noun with determiner '" + d1 + "'"};
      if (d2 != "these" && d2 != "those") return {false, "plural noun with determiner '" + d2 + "'"};
      return {true, {}};
    }
  }
  return {false, "unknown kind"};
}

struct BuildOutcome {
  std::optional<Quadruplet> quad;
  std::string reason;
  std::string detail;
};

/// Turns one bracketed model answer (two sentences) into an AgreementSwap
/// quadruplet. The sentence holding the singular noun becomes S1.
inline BuildOutcome build(const std::string& response, const std::string& singular, const std::string& plural,
                          const Spec& spec) {
  std::string payload;
  try {
    payload = llm::extract_bracketed(response);
  } catch (const MalformedResponse&) {
    return {std::nullopt, std::string(discard::kUnextractable), {}};
  }
  const auto sentences = llm::split_sentences(text::tokenize(payload));
  if (sentences.size() != 2) return {std::nullopt, std::string(discard::kSentenceCount), std::to_string(sentences.size())};
  const std::vector<std::string>* sing = nullptr;
  const std::vector<std::string>* plur = nullptr;
  for (const auto& s : sentences) {
    if (occurrences(s, singular) == 1 && !occurrences(s, plural)) sing = &s;
    else if (occurrences(s, plural) == 1 && !occurrences(s, singular)) plur = &s;
  }
  if (!sing || !plur) return {std::nullopt, std::string(discard::kTargetMissing), {}};
  const auto n1 = *find_token(*sing, singular), n2 = *find_token(*plur, plural);
  const auto a1 = agreement_index(*sing, spec.kind, n1, plur, n2);
  const auto a2 = agreement_index(*plur, spec.kind, n2, sing, n1);
  if (!a1 || !a2) return {std::nullopt, std::string(discard::kAgreementNotFound), {}};
  auto sw = swap(truncate_after(*sing, *a1), singular, truncate_after(*plur, *a2), plural);
  if (!sw.quad) return {std::nullopt, sw.reason, {}};
  sw.quad->subtask = Subtask::AgreementSwap;
  sw.quad->pos = PosTag::Noun;
  sw.quad->agreement_kind = spec.kind;
  sw.quad->distance = spec.distance;
  if (const auto c = check_agreement(*sw.quad); !c.pass) return {std::nullopt, std::string(discard::kAgreementCheck), c.reason};
  return {std::move(sw.quad), {}, {}};
}

}  // namespace ltswap::agreement
