#pragma once

#include <regex>
#include <set>
#include <string>

#include "ltswap/llm/backend.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/synthetic.hpp"
#include "ltswap/text.hpp"

namespace ltswap::llm {

struct MockOptions {
  // Occasionally answer without brackets, with a word absent from the
  // corpus, or with a number clash in agreement pairs, so that every
  // discard path is exercised offline.
  bool noise = true;
};

/// Offline stand-in for the chat endpoint. It only understands the default
/// prompts and the synthetic language; answers are a pure function of the
/// prompt text and the seed.
class MockChatBackend : public ChatBackend {
 public:
  explicit MockChatBackend(MockOptions opts = {}) : opts_(opts) {}

  std::string id() const override { return opts_.noise ? "mock:synthetic/v1" : "mock:synthetic/v1-clean"; }

  std::string complete(const ChatRequest& req) override {
    const auto& p = req.prompt;
    if (p.rfind("I have invented a new English word", 0) == 0) return nonce_game(p);
    if (p.rfind("Given the two sentences A and B:", 0) == 0) return syntactic(p);
    if (p.rfind("Using the nouns '", 0) == 0) return agreement(p, req.seed);
    static const std::regex gen_re(R"(uses the word '([^']*)' as a ([a-z -]+)\.)");
    std::smatch m;
    if (std::regex_search(p, m, gen_re)) return generation(m[1].str(), m[2].str(), p, req.seed);
    return "I am not sure what you are asking for.";
  }

  static std::string quoted(const std::string& prompt, const std::string& tag) {
    const std::string open = "<start of sentence" + tag + "> ", close = " <end of sentence" + tag + ">";
    const auto b = prompt.find(open);
    if (b == std::string::npos) return {};
    const auto e = prompt.find(close, b + open.size());
    if (e == std::string::npos) return {};
    return prompt.substr(b + open.size(), e - b - open.size());
  }

 private:
  int roll(const std::string& prompt, std::uint64_t seed) const {
    return static_cast<int>(synthetic::fnv1a(prompt + "#" + std::to_string(seed)) % 100);
  }

  static std::string nonce_game(const std::string& p) {
    auto cues = [](const std::string& s) {
      std::set<std::string> out;
      for (auto& t : text::tokenize(s))
        if (synthetic::is_cue(t)) out.insert(t);
      return out;
    };
    const auto ctx = cues(quoted(p, ""));
    auto overlap = [&](const std::string& s) {
      int n = 0;
      for (const auto& c : cues(s)) n += static_cast<int>(ctx.count(c));
      return n;
    };
    const int a = overlap(quoted(p, " A")), b = overlap(quoted(p, " B"));
    if (a == b) return "Both sentences could work, I cannot tell.";
    return a > b ? "Sentence A fits the context better. [A]" : "Sentence B fits the context better. [B]";
  }

  static std::string syntactic(const std::string& p) {
    const bool a = synthetic::grammatical(text::tokenize(quoted(p, " A")));
    const bool b = synthetic::grammatical(text::tokenize(quoted(p, " B")));
    if (a == b) return a ? "Both sentences are correct." : "Neither sentence is correct.";
    return a ? "The correct one is [A]." : "The correct one is [B].";
  }

  std::string generation(const std::string& word, const std::string& phrase, const std::string& p,
                         std::uint64_t seed) const {
    std::optional<WordForm> form;
    for (auto f : {WordForm::Noun, WordForm::Plural, WordForm::Verb, WordForm::Third, WordForm::Past, WordForm::Gerund})
      if (pos_phrase(f) == phrase) form = f;
    if (!form) return "I do not know that part of speech.";
    const auto& frames = synthetic::generation_frames(*form);
    synthetic::Bindings b;
    b.w = word;
    b.cls = synthetic::class_of(word);
    auto sentence = synthetic::render(frames[(synthetic::fnv1a(word) + seed) % frames.size()], b);
    const int r = roll(p, seed);
    if (opts_.noise && r < 3) return "Here is one: " + sentence;
    if (opts_.noise && r < 8) sentence.insert(sentence.size() - 1, " zephyrine");
    return "Here is a sentence: [" + sentence + "]";
  }

  std::string agreement(const std::string& p, std::uint64_t seed) const {
    static const std::regex nouns_re(R"(^Using the nouns '([^']*)' and '([^']*)')");
    std::smatch m;
    if (!std::regex_search(p, m, nouns_re)) return "I cannot parse the nouns.";
    std::string key;
    if (p.find("short distance subject-verb") != std::string::npos) key = "SUBJ_VERB/SHORT";
    else if (p.find("long distance subject-verb") != std::string::npos) key = "SUBJ_VERB/LONG";
    else if (p.find("short distance usage of reflexive") != std::string::npos) key = "ANAPHORA/SHORT";
    else if (p.find("long distance usage of reflexive") != std::string::npos) key = "ANAPHORA/LONG";
    else key = "DET_NOUN/SHORT";
    const auto& frames = synthetic::agreement_frames(key);
    synthetic::Bindings b;
    b.s = m[1].str();
    b.p = m[2].str();
    b.cls = synthetic::class_of(b.s);
    b.variant = static_cast<std::size_t>(synthetic::fnv1a(b.s) + seed);
    if (opts_.noise && roll(p, seed) < 5) std::swap(b.s, b.p);
    return "[" + synthetic::render(frames[0], b) + " " + synthetic::render(frames[1], b) + "]";
  }

  MockOptions opts_;
};

}  // namespace ltswap::llm
