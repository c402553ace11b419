#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltswap/corpus.hpp"
#include "ltswap/llm/answer.hpp"
#include "ltswap/llm/gateway.hpp"
#include "ltswap/llm/templates.hpp"
#include "ltswap/quadruplet.hpp"

namespace ltswap {

inline constexpr std::string_view kNonceWord = "blick";

/// Replaces every token equal (case-insensitively) to `word` by the nonce
/// word. Inflected forms are left alone.
inline std::vector<std::string> nonce_substitute(const std::vector<std::string>& tokens, std::string_view word) {
  const auto w = text::to_lower(word);
  std::vector<std::string> out = tokens;
  bool found = false;
  for (auto& t : out)
    if (text::to_lower(t) == w) {
      t = kNonceWord;
      found = true;
    }
  if (!found) throw ContractViolation("nonce_substitute: '" + std::string(word) + "' does not occur in the sentence");
  return out;
}

inline std::string nonce_substitute(std::string_view sentence, std::string_view word) {
  return text::join(nonce_substitute(text::split_ws(sentence), word));
}

/// Shortest corpus sentence containing `word` that is not identical to any
/// of `exclude`; ties go to the lowest id.
inline std::optional<std::uint32_t> pick_context(std::string_view word, const Corpus& corpus, const SentenceIndex& index,
                                                 const std::vector<const std::vector<std::string>*>& exclude) {
  std::optional<std::uint32_t> best;
  for (auto id : index.lookup(word)) {
    const auto& s = corpus.sentence(id).tokens;
    if (std::any_of(exclude.begin(), exclude.end(), [&](const auto* e) { return *e == s; })) continue;
    if (!best || s.size() < corpus.sentence(*best).tokens.size()) best = id;
  }
  return best;
}

struct PromptRecord {
  std::string prompt;
  std::string raw;  // model answer
  llm::Choice answer = llm::Choice::Undecided;
  llm::Choice expected = llm::Choice::A;

  bool correct() const { return answer == expected; }
};

struct FilterVerdict {
  std::string quadruplet_id;
  int prompts_passed = 0;
  bool kept = false;
  std::string reason;  // set when no prompt could be built
  std::vector<std::uint32_t> context_ids;
  std::vector<PromptRecord> transcripts;
};

/// Recomputes the verdict from the stored answers without querying.
inline FilterVerdict replay(FilterVerdict v) {
  v.prompts_passed = 0;
  for (auto& t : v.transcripts) {
    t.answer = llm::parse_choice(t.raw).value;
    v.prompts_passed += t.correct() ? 1 : 0;
  }
  v.kept = v.reason.empty() && v.transcripts.size() == 4 && v.prompts_passed == 4;
  return v;
}

struct PlannedPrompt {
  llm::Call call;
  llm::Choice expected = llm::Choice::A;
};

struct FilterPlan {
  std::vector<PlannedPrompt> prompts;  // empty when `reason` is set
  std::vector<std::uint32_t> context_ids;
  std::string reason;
};

namespace detail {

inline void both_orders(FilterPlan& plan, const llm::PromptTemplate& t, llm::Bindings base, const std::string& good,
                        const std::string& bad) {
  base["a"] = good;
  base["b"] = bad;
  plan.prompts.push_back({{&t, base, 0}, llm::Choice::A});
  base["a"] = bad;
  base["b"] = good;
  plan.prompts.push_back({{&t, base, 0}, llm::Choice::B});
}

}  // namespace detail

/// Nonce-word game for WordSwap. For each target the context is a corpus
/// sentence with the target replaced by the nonce word; the candidates are
/// the two generated sentences with their own targets replaced, so the
/// correct one is the sentence written for that target.
inline FilterPlan plan_wordswap(const Quadruplet& q, const Corpus& corpus, const SentenceIndex& index,
                                const llm::TemplateSet& templates) {
  FilterPlan plan;
  const auto c1 = pick_context(q.w1, corpus, index, {&q.s1, &q.s2});
  const auto c2 = pick_context(q.w2, corpus, index, {&q.s1, &q.s2});
  if (!c1 || !c2) {
    plan.reason = "no_context";
    return plan;
  }
  plan.context_ids = {*c1, *c2};
  const auto x1 = text::join(nonce_substitute(corpus.sentence(*c1).tokens, q.w1));
  const auto x2 = text::join(nonce_substitute(corpus.sentence(*c2).tokens, q.w2));
  // Same nonce context for both words: the two games ask the same question
  // with opposite answers.
  if (x1 == x2) {
    plan.reason = "ambiguous_context";
    return plan;
  }
  const auto& t = templates.get("wordswap_filter");
  const auto n1 = text::join(nonce_substitute(q.s1, q.w1));
  const auto n2 = text::join(nonce_substitute(q.s2, q.w2));
  detail::both_orders(plan, t, {{"context", x1}}, n1, n2);
  detail::both_orders(plan, t, {{"context", x2}}, n2, n1);
  return plan;
}

/// Grammaticality judgments for InflectionSwap and AgreementSwap: S1 against
/// S1* and S2 against S2*, each in both orders.
inline FilterPlan plan_syntactic(const Quadruplet& q, const llm::TemplateSet& templates) {
  if (q.subtask == Subtask::WordSwap) throw ContractViolation("syntactic filter applied to a WordSwap quadruplet");
  FilterPlan plan;
  const auto& t = templates.get("syntactic_filter");
  detail::both_orders(plan, t, {}, text::join(q.s1), text::join(q.s1_star));
  detail::both_orders(plan, t, {}, text::join(q.s2), text::join(q.s2_star));
  return plan;
}

/// Builds every prompt, sends them as one batch, then assembles verdicts in
/// quadruplet order.
inline std::vector<FilterVerdict> run_filter(const std::vector<Quadruplet>& quads, const Corpus& corpus,
                                             const SentenceIndex& index, llm::Gateway& gw,
                                             const llm::TemplateSet& templates) {
  std::vector<FilterPlan> plans;
  plans.reserve(quads.size());
  std::vector<llm::Call> calls;
  for (const auto& q : quads) {
    plans.push_back(q.subtask == Subtask::WordSwap ? plan_wordswap(q, corpus, index, templates)
                                                   : plan_syntactic(q, templates));
    for (const auto& p : plans.back().prompts) calls.push_back(p.call);
  }
  const auto results = gw.run(calls);
  std::vector<FilterVerdict> out;
  std::size_t r = 0;
  for (std::size_t i = 0; i < quads.size(); ++i) {
    FilterVerdict v;
    v.quadruplet_id = quads[i].id;
    v.reason = plans[i].reason;
    v.context_ids = plans[i].context_ids;
    for (const auto& p : plans[i].prompts) {
      const auto& res = results[r++];
      v.transcripts.push_back({res.prompt, res.text, llm::Choice::Undecided, p.expected});
    }
    out.push_back(replay(std::move(v)));
  }
  return out;
}

inline std::vector<Quadruplet> kept_only(const std::vector<Quadruplet>& quads, const std::vector<FilterVerdict>& v) {
  if (quads.size() != v.size()) throw ContractViolation("kept_only: verdict count mismatch");
  std::vector<Quadruplet> out;
  for (std::size_t i = 0; i < quads.size(); ++i) {
    if (quads[i].id != v[i].quadruplet_id) throw ContractViolation("kept_only: verdict order mismatch");
    if (v[i].kept) out.push_back(quads[i]);
  }
  return out;
}

inline io::json to_json(const FilterVerdict& v) {
  io::json j;
  j["quadruplet_id"] = v.quadruplet_id;
  j["prompts_passed"] = v.prompts_passed;
  j["kept"] = v.kept;
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["context_sentences"] = v.context_ids;
  auto t = io::json::array();
  for (const auto& p : v.transcripts)
    t.push_back({{"prompt", p.prompt}, {"response", p.raw}, {"answer", llm::to_string(p.answer)},
                 {"expected", llm::to_string(p.expected)}});
  j["transcripts"] = std::move(t);
  return j;
}

inline FilterVerdict verdict_from_json(const io::json& j) {
  FilterVerdict v;
  v.quadruplet_id = j.at("quadruplet_id").get<std::string>();
  v.prompts_passed = j.at("prompts_passed").get<int>();
  v.kept = j.at("kept").get<bool>();
  if (j.contains("reason")) v.reason = j["reason"].get<std::string>();
  if (j.contains("context_sentences")) v.context_ids = j["context_sentences"].get<std::vector<std::uint32_t>>();
  for (const auto& t : j.at("transcripts"))
    v.transcripts.push_back({t.at("prompt").get<std::string>(), t.at("response").get<std::string>(),
                             llm::choice_from_string(t.at("answer").get<std::string>()),
                             llm::choice_from_string(t.at("expected").get<std::string>())});
  return v;
}

}  // namespace ltswap
