#pragma once

#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/error.hpp"

namespace ltswap::llm {

enum class ExpectedAnswer { FreeTextBracketed, ChoiceAB };

using Bindings = std::map<std::string, std::string>;

/// A prompt with `{name}` placeholders.
struct PromptTemplate {
  std::string name;
  std::string body;
  ExpectedAnswer expected = ExpectedAnswer::FreeTextBracketed;

  std::set<std::string> placeholders() const {
    static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
    std::set<std::string> out;
    for (std::sregex_iterator it(body.begin(), body.end(), re), end; it != end; ++it) out.insert((*it)[1].str());
    return out;
  }

  /// Substitutes every placeholder. A placeholder without a binding is an
  /// error; extra bindings are ignored.
  std::string render(const Bindings& b) const {
    std::string out;
    out.reserve(body.size() + 64);
    std::size_t i = 0;
    while (i < body.size()) {
      const auto open = body.find('{', i);
      if (open == std::string::npos) break;
      const auto close = body.find('}', open);
      if (close == std::string::npos) break;
      const auto key = body.substr(open + 1, close - open - 1);
      const bool ident = !key.empty() && key.find_first_not_of(
                                             "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") ==
                                             std::string::npos;
      out.append(body, i, open - i);
      if (!ident) {
        out += '{';
        i = open + 1;
        continue;
      }
      const auto it = b.find(key);
      if (it == b.end()) throw ConfigError("template '" + name + "': unbound placeholder {" + key + "}");
      out += it->second;
      i = close + 1;
    }
    out.append(body, i, std::string::npos);
    return out;
  }
};

// Filtering prompts. Bodies are kept verbatim; only the example sentences
// are replaced by placeholders.

inline const PromptTemplate& nonce_game_template() {
  static const PromptTemplate t{
      "wordswap_filter",
      "I have invented a new English word \"blick\" that you can use as in the following sentence:\n"
      "\"<start of sentence> {context} <end of sentence>\"\n"
      "Now, I give you two new sentences A and B:\n"
      "\"<start of sentence A> {a} <end of sentence A>\"\n"
      "\"<start of sentence B> {b} <end of sentence B>\"\n"
      "Which of the sentences A or B uses the word 'blick' correctly? Put your answer, A or B, in between brackets.",
      ExpectedAnswer::ChoiceAB};
  return t;
}

inline const PromptTemplate& syntactic_template() {
  static const PromptTemplate t{
      "syntactic_filter",
      "Given the two sentences A and B:\n"
      "\"<start of sentence A> {a} <end of sentence A>\"\n"
      "\"<start of sentence B> {b} <end of sentence B>\"\n"
      "Which of the two sentences A or B is syntactically correct? Put your answer, A or B, in between brackets.",
      ExpectedAnswer::ChoiceAB};
  return t;
}

inline const PromptTemplate& default_generation_template() {
  static const PromptTemplate t{
      "generate_word",
      "Please write a sentence that uses the word '{w}' as a {pos}. Encapsulate the sentence in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

// Agreement generation prompts, verbatim with the example noun pair
// replaced by {singular}/{plural}.

inline const PromptTemplate& subj_verb_short_template() {
  static const PromptTemplate t{
      "agreement_subj_verb_short",
      "Using the nouns '{singular}' and '{plural}', please write a minimal pair of sentences that show a short "
      "distance subject-verb agreement at the present tense. The subject and the verb must be placed close to each "
      "other. You must encapsulate the two sentences together in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

inline const PromptTemplate& subj_verb_long_template() {
  static const PromptTemplate t{
      "agreement_subj_verb_long",
      "Using the nouns '{singular}' and '{plural}', please write a minimal pair of sentences that shows a long "
      "distance subject-verb agreement through a relative clause starting by 'that can be'. For instance, using the "
      "nouns 'neighbor' and 'neighbors', you can write something like: 'The neighbor that can be trusted lets his dog "
      "out. The neighbors that can be trusted let their dog out.'. Now please do the same with '{singular}' and "
      "'{plural}'. You must encapsulate the two sentences together in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

inline const PromptTemplate& anaphora_short_template() {
  static const PromptTemplate t{
      "agreement_anaphora_short",
      "Using the nouns '{singular}' and '{plural}', please write a minimal pair of sentences that shows a short "
      "distance usage of reflexive pronouns. The pronouns must be placed close to the subjects '{singular}' and "
      "'{plural}'. Please use the past tense. Now please do the same with '{singular}' and '{plural}'. You must "
      "encapsulate the two sentences together in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

inline const PromptTemplate& anaphora_long_template() {
  static const PromptTemplate t{
      "agreement_anaphora_long",
      "Using the nouns '{singular}' and '{plural}', please write a minimal pair of sentences that shows a long "
      "distance usage of reflexive pronouns through a relative clause starting by 'that can be'. For instance, using "
      "the verbs 'medecine' and 'medecines', you can write something like: 'The medecine that can be bought "
      "anywhere, proved itself to be very effective. The medecines that can be bought anywhere, proved themselves to "
      "be very effective'. Now please do the same with '{singular}' and '{plural}'. You must encapsulate the two "
      "sentences together in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

inline const PromptTemplate& det_noun_template() {
  static const PromptTemplate t{
      "agreement_det_noun",
      "Using the nouns '{singular}' and '{plural}', please write a minimal pair of sentences that shows a "
      "determiner-noun agreement, using either that/these/this/those. For instance, using the nouns 'misconduct' and "
      "'misconducts', you can write something like: 'This misconduct is a serious offense. These misconducts are "
      "serious offenses.'. Now please do the same with '{singular}' and '{plural}'. You must encapsulate the two "
      "sentences together in between brackets.",
      ExpectedAnswer::FreeTextBracketed};
  return t;
}

/// Named templates with user overrides. Overriding a filter or agreement
/// template is allowed but the placeholder set must stay the same.
class TemplateSet {
 public:
  TemplateSet() {
    for (const auto* t : {&nonce_game_template(), &syntactic_template(), &default_generation_template(),
                          &subj_verb_short_template(), &subj_verb_long_template(), &anaphora_short_template(),
                          &anaphora_long_template(), &det_noun_template()})
      templates_.emplace(t->name, *t);
  }

  void override_body(const std::string& name, std::string body) {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("templates: unknown template '" + name + "'");
    PromptTemplate candidate = it->second;
    candidate.body = std::move(body);
    if (candidate.placeholders() != it->second.placeholders())
      throw ConfigError("templates." + name + ": placeholders must be exactly those of the default");
    it->second = std::move(candidate);
  }

  const PromptTemplate& get(const std::string& name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("templates: unknown template '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : templates_) out.push_back(n);
    return out;
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace ltswap::llm
