#include <gtest/gtest.h>

#include <cmath>
#include <mutex>

#include "support.hpp"

using namespace ltswap;
using test::LocalServer;

namespace {

std::vector<std::string> toks(const std::string& s) { return text::tokenize(s); }

Quadruplet wordswap_quad(const std::string& s1, const std::string& w1, const std::string& s2, const std::string& w2) {
  auto out = swap(toks(s1), w1, toks(s2), w2);
  if (!out.quad) throw std::runtime_error("swap failed: " + out.reason);
  out.quad->id = "ws-test";
  return *out.quad;
}

struct SmallCorpus {
  Corpus corpus;
  SentenceIndex index;
  explicit SmallCorpus(const std::string& textbody) {
    corpus = ingest({{"doc", textbody}});
    index = build_index(corpus.sentences);
  }
};

std::string render(const PlannedPrompt& p) { return p.call.tmpl->render(p.call.bindings); }

/// Scores: S1 -1, S2 -2, S1* -3, S2* -4 unless overridden.
std::array<SentenceScore, 4> scores(double a, double b, double c, double d) {
  return {SentenceScore{a, 3, 0}, SentenceScore{b, 3, 0}, SentenceScore{c, 3, 0}, SentenceScore{d, 3, 0}};
}

}  // namespace

// ---- feasibility filter ------------------------------------------------------

TEST(Nonce, ReplacesEveryCaseInsensitiveOccurrence) {
  EXPECT_EQ(nonce_substitute("the Cat saw a cat .", "cat"), "the blick saw a blick .");
  EXPECT_EQ(nonce_substitute("the cats saw a cat .", "cat"), "the cats saw a blick .");
  EXPECT_THROW(nonce_substitute("a dog .", "cat"), ContractViolation);
}

TEST(Nonce, ContextIsShortestNonExcludedSentence) {
  SmallCorpus c("The cat sleeps on the mat. A cat runs. The cat sleeps.");
  const auto s = toks("a cat runs .");
  const auto id = pick_context("cat", c.corpus, c.index, {});
  ASSERT_TRUE(id);
  EXPECT_EQ(c.corpus.sentence(*id).tokens, s);
  // Equal lengths go to the lowest id.
  const auto next = pick_context("cat", c.corpus, c.index, {&s});
  ASSERT_TRUE(next);
  EXPECT_EQ(text::join(c.corpus.sentence(*next).tokens), "the cat sleeps .");
}

TEST(FilterPlan, WordSwapAsksFourOrderedQuestions) {
  SmallCorpus c("A cat runs. A boat floats. The cat sleeps on a long mat.");
  const auto q = wordswap_quad("the cat sleeps .", "cat", "the boat sails .", "boat");
  const llm::TemplateSet templates;
  const auto plan = plan_wordswap(q, c.corpus, c.index, templates);
  ASSERT_EQ(plan.reason, "");
  ASSERT_EQ(plan.prompts.size(), 4u);
  ASSERT_EQ(plan.context_ids.size(), 2u);
  EXPECT_EQ(text::join(c.corpus.sentence(plan.context_ids[0]).tokens), "a cat runs .");
  EXPECT_EQ(text::join(c.corpus.sentence(plan.context_ids[1]).tokens), "a boat floats .");
  const std::vector<llm::Choice> expected{llm::Choice::A, llm::Choice::B, llm::Choice::A, llm::Choice::B};
  const std::vector<std::string> context{"a blick runs .", "a blick runs .", "a blick floats .", "a blick floats ."};
  const std::vector<std::string> a{"the blick sleeps .", "the blick sails .", "the blick sails .", "the blick sleeps ."};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& p = plan.prompts[k];
    EXPECT_EQ(p.expected, expected[k]);
    EXPECT_EQ(p.call.tmpl->name, "wordswap_filter");
    EXPECT_EQ(p.call.bindings.at("context"), context[k]);
    EXPECT_EQ(p.call.bindings.at("a"), a[k]);
    EXPECT_NE(p.call.bindings.at("a"), p.call.bindings.at("b"));
    EXPECT_NE(render(p).find(context[k]), std::string::npos);
  }
}

TEST(FilterPlan, WordSwapWithoutUsableContext) {
  const auto q = wordswap_quad("the cat sleeps .", "cat", "the boat sails .", "boat");
  const llm::TemplateSet templates;
  // The only sentence with "cat" is S1 itself.
  SmallCorpus none("The cat sleeps. A boat floats.");
  const auto p1 = plan_wordswap(q, none.corpus, none.index, templates);
  EXPECT_EQ(p1.reason, "no_context");
  EXPECT_TRUE(p1.prompts.empty());
  SmallCorpus same("A cat runs. A boat runs.");
  const auto p2 = plan_wordswap(q, same.corpus, same.index, templates);
  EXPECT_EQ(p2.reason, "ambiguous_context");
  EXPECT_TRUE(p2.prompts.empty());
}

TEST(FilterPlan, SyntacticJudgesEachPairInBothOrders) {
  auto q = wordswap_quad("the cat sleeps .", "cat", "the cats sleep .", "cats");
  const llm::TemplateSet templates;
  EXPECT_THROW(plan_syntactic(q, templates), ContractViolation);
  q.subtask = Subtask::InflectionSwap;
  const auto plan = plan_syntactic(q, templates);
  ASSERT_EQ(plan.prompts.size(), 4u);
  const std::vector<std::pair<std::string, std::string>> ab{{"the cat sleeps .", "the cats sleeps ."},
                                                            {"the cats sleeps .", "the cat sleeps ."},
                                                            {"the cats sleep .", "the cat sleep ."},
                                                            {"the cat sleep .", "the cats sleep ."}};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(plan.prompts[k].call.bindings.at("a"), ab[k].first);
    EXPECT_EQ(plan.prompts[k].call.bindings.at("b"), ab[k].second);
    EXPECT_EQ(plan.prompts[k].expected, k % 2 ? llm::Choice::B : llm::Choice::A);
  }
}

TEST(Filter, KeepsOnlyFourOfFour) {
  SmallCorpus c("A cat runs. A boat floats.");
  auto ws = wordswap_quad("the cat sleeps .", "cat", "the boat sails .", "boat");
  auto is = wordswap_quad("the cat sleeps .", "cat", "the cats sleep .", "cats");
  is.id = "is-test";
  is.subtask = Subtask::InflectionSwap;
  auto lonely = wordswap_quad("the dog barks .", "dog", "the boat sails .", "boat");
  lonely.id = "ws-lonely";
  const std::vector<Quadruplet> quads{ws, is, lonely};
  const llm::TemplateSet templates;

  std::map<std::string, char> answer;
  for (const auto& q : quads) {
    const auto plan =
        q.subtask == Subtask::WordSwap ? plan_wordswap(q, c.corpus, c.index, templates) : plan_syntactic(q, templates);
    for (const auto& p : plan.prompts) answer[render(p)] = p.expected == llm::Choice::A ? 'A' : 'B';
  }
  auto run = [&](llm::ChatBackend& backend) {
    llm::ResponseCache cache;
    llm::Gateway gw(backend, cache);
    return run_filter(quads, c.corpus, c.index, gw, templates);
  };

  auto perfect = test::letter_backend("perfect", [&](const std::string& p) { return "[" + std::string(1, answer.at(p)) + "]"; });
  const auto v = run(*perfect);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_TRUE(v[0].kept);
  EXPECT_EQ(v[0].prompts_passed, 4);
  EXPECT_TRUE(v[1].kept);
  EXPECT_FALSE(v[2].kept);
  EXPECT_EQ(v[2].reason, "no_context");
  EXPECT_TRUE(v[2].transcripts.empty());
  const auto kept = kept_only(quads, v);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[1].id, "is-test");

  auto always_a = test::letter_backend("always-a", [](const std::string&) { return std::string("[A]"); });
  for (const auto& x : run(*always_a)) {
    EXPECT_FALSE(x.kept);
    if (x.reason.empty()) EXPECT_EQ(x.prompts_passed, 2);
  }
  auto undecided = test::letter_backend("undecided", [](const std::string&) { return std::string("no idea"); });
  for (const auto& x : run(*undecided)) {
    EXPECT_FALSE(x.kept);
    EXPECT_EQ(x.prompts_passed, 0);
  }

  // Stored transcripts replay to the same verdict and survive JSON.
  for (const auto& x : v) {
    const auto back = verdict_from_json(io::json::parse(to_json(x).dump()));
    const auto again = replay(back);
    EXPECT_EQ(again.kept, x.kept);
    EXPECT_EQ(again.prompts_passed, x.prompts_passed);
    EXPECT_EQ(back.context_ids, x.context_ids);
    EXPECT_EQ(back.reason, x.reason);
    ASSERT_EQ(back.transcripts.size(), x.transcripts.size());
    for (std::size_t k = 0; k < x.transcripts.size(); ++k) EXPECT_EQ(back.transcripts[k].prompt, x.transcripts[k].prompt);
  }

  auto reordered = v;
  std::swap(reordered[0], reordered[1]);
  EXPECT_THROW(kept_only(quads, reordered), ContractViolation);
  EXPECT_THROW(kept_only(quads, {v[0]}), ContractViolation);
}

// ---- local scoring -----------------------------------------------------------

TEST(LocalScoring, BigramByHand) {
  std::vector<SentenceRef> sents(2);
  sents[0].tokens = {"a", "b"};
  sents[1].tokens = {"a", "c"};
  BigramModel model(sents, 0.1);
  LocalScorer scorer("bigram", model);
  // V = |{a, b, c}| + 1; count(<s> a) = 2, count(a b) = count(a c) = 1.
  const double v = 4.0, k = 0.1;
  const double bos_a = std::log((2 + k) / (2 + k * v)), a_b = std::log((1 + k) / (2 + k * v));
  const double b_a = std::log(k / (0 + k * v));

  auto s = scorer.score_one({"x", std::nullopt, "a b"}, ScoringMode::Causal);
  EXPECT_NEAR(s.logprob, bos_a + a_b, 1e-12);
  EXPECT_EQ(s.scored_tokens, 2);
  EXPECT_EQ(s.prefix_tokens_excluded, 0);

  s = scorer.score_one({"x", std::string("a"), "b"}, ScoringMode::Causal);
  EXPECT_NEAR(s.logprob, a_b, 1e-12);
  EXPECT_EQ(s.scored_tokens, 1);
  EXPECT_EQ(s.prefix_tokens_excluded, 1);

  s = scorer.score_one({"x", std::nullopt, "b a"}, ScoringMode::MaskedPll);
  EXPECT_NEAR(s.logprob, model.bigram(std::string(kBos), "b") + b_a, 1e-12);

  EXPECT_EQ(scorer.score_one({"x", std::string(""), "a b"}, ScoringMode::ShiftedPll),
            scorer.score_one({"x", std::nullopt, "a b"}, ScoringMode::ShiftedPll));

  const auto batch = scorer.score({{"ok", std::nullopt, "a"}, {"empty", std::nullopt, "  "}}, ScoringMode::Causal);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_TRUE(batch[0]);
  EXPECT_FALSE(batch[1]);
}

TEST(LocalScoring, UnigramIgnoresContext) {
  UnigramModel model({{"a", 3}, {"b", 1}});
  // Add-one over 4 tokens and 2 types plus the unknown slot.
  EXPECT_NEAR(model.logprob("a"), std::log(4.0 / 7.0), 1e-12);
  EXPECT_NEAR(model.logprob("zzz"), std::log(1.0 / 7.0), 1e-12);
  LocalScorer scorer("unigram", model);
  for (auto mode : {ScoringMode::Causal, ScoringMode::MaskedPll, ScoringMode::ShiftedPll})
    EXPECT_NEAR(scorer.score_one({"x", std::nullopt, "a b a"}, mode).logprob, 2 * std::log(4.0 / 7.0) + std::log(2.0 / 7.0),
                1e-12);
}

TEST(Scoring, ModeNames) {
  for (auto mode : {ScoringMode::Causal, ScoringMode::MaskedPll, ScoringMode::ShiftedPll})
    EXPECT_EQ(scoring_mode_from_string(to_string(mode)), mode);
  EXPECT_THROW(scoring_mode_from_string("mlm"), ConfigError);
  EXPECT_EQ(judge_mode_from_string("QUAD"), JudgeMode::Quad);
  EXPECT_THROW(judge_mode_from_string("triple"), ConfigError);
}

// ---- judging -------------------------------------------------------------------

TEST(Judge, QuadMarginAndTies) {
  auto v = judge("q", scores(-1, -2, -3, -4), JudgeMode::Quad);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_DOUBLE_EQ(v[0].margin, 4.0);
  EXPECT_TRUE(v[0].correct);
  EXPECT_FALSE(judge("q", scores(-3, -4, -1, -2), JudgeMode::Quad)[0].correct);
  EXPECT_FALSE(judge("q", scores(-1, -2, -2, -1), JudgeMode::Quad)[0].correct);
  EXPECT_FALSE(judge("q", scores(-1, -2, -1 - kTieEpsilon / 2, -2), JudgeMode::Quad)[0].correct);
  EXPECT_TRUE(judge("q", scores(-1, -2, -1 - 10 * kTieEpsilon, -2), JudgeMode::Quad)[0].correct);
}

TEST(Judge, PairGivesTwoVerdicts) {
  const auto v = judge("q", scores(-1, -5, -3, -4), JudgeMode::Pair);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].pair, 1);
  EXPECT_DOUBLE_EQ(v[0].margin, 2.0);
  EXPECT_TRUE(v[0].correct);
  EXPECT_EQ(v[1].pair, 2);
  EXPECT_DOUBLE_EQ(v[1].margin, -1.0);
  EXPECT_FALSE(v[1].correct);
  for (const auto& x : v) {
    const auto back = quadruplet_verdict_from_json(to_json(x));
    EXPECT_EQ(back.pair, x.pair);
    EXPECT_EQ(back.judge_mode, JudgeMode::Pair);
    EXPECT_DOUBLE_EQ(back.margin, x.margin);
  }
}

TEST(Judge, ItemsAndPrefixes) {
  const auto q = wordswap_quad("the cat sleeps .", "cat", "the boat sails .", "boat");
  const auto plain = score_items({q});
  ASSERT_EQ(plain.size(), 4u);
  EXPECT_EQ(plain[0].id, "ws-test/s1");
  EXPECT_EQ(plain[3].id, "ws-test/s2_star");
  EXPECT_EQ(plain[2].text, "the boat sleeps .");
  for (const auto& it : plain) EXPECT_FALSE(it.prefix);

  const auto pre = score_items({q}, [](const std::string& w) { return std::optional<std::string>("about " + w); });
  EXPECT_EQ(pre[0].id, "ws-test/s1/p");
  EXPECT_EQ(*pre[0].prefix, "about cat");
  EXPECT_EQ(*pre[1].prefix, "about boat");
  EXPECT_EQ(*pre[2].prefix, "about boat");
  EXPECT_EQ(*pre[3].prefix, "about cat");
}

TEST(Judge, PrefixRetrieveIsShortestLowestId) {
  SmallCorpus c("The cat sleeps on a mat. A cat runs. The cat naps.");
  const auto id = prefix_retrieve("cat", c.corpus, c.index);
  ASSERT_TRUE(id);
  EXPECT_EQ(text::join(c.corpus.sentence(*id).tokens), "a cat runs .");
  EXPECT_FALSE(prefix_retrieve("dog", c.corpus, c.index));
}

TEST(Judge, MissingMemberSkipsTheQuadruplet) {
  auto a = wordswap_quad("the cat sleeps .", "cat", "the boat sails .", "boat");
  auto b = a;
  b.id = "ws-other";
  class Holey : public SentenceScorer {
   public:
    std::string id() const override { return "holey"; }
    std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode) override {
      std::vector<std::optional<SentenceScore>> out;
      for (const auto& it : items)
        if (it.id == "ws-other/s2_star") out.emplace_back(std::nullopt);
        else out.emplace_back(SentenceScore{it.id.find("star") == std::string::npos ? -1.0 : -2.0, 4, 0});
      return out;
    }
  } scorer;
  const auto run = score_quadruplets({a, b}, scorer, ScoringMode::Causal, JudgeMode::Quad);
  ASSERT_EQ(run.verdicts.size(), 1u);
  EXPECT_EQ(run.verdicts[0].quadruplet_id, "ws-test");
  EXPECT_DOUBLE_EQ(run.verdicts[0].margin, 2.0);
  EXPECT_EQ(run.skipped, std::vector<std::string>{"ws-other"});
  EXPECT_EQ(run.scores.size(), 7u);
}

// ---- sidecar contract ------------------------------------------------------------

TEST(HttpScoring, RequestShapeBatchingAndConcurrency) {
  std::mutex mu;
  std::vector<io::json> requests;
  std::atomic<int> in_flight{0}, peak{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight;
      for (int p = peak; now > p && !peak.compare_exchange_weak(p, now);) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      const auto body = io::json::parse(req.body);
      {
        std::lock_guard lock(mu);
        requests.push_back(body);
      }
      io::json out;
      out["scores"] = io::json::array();
      for (const auto& it : body.at("items")) {
        const auto id = it.at("id").get<std::string>();
        if (id == "drop") continue;
        const auto n = text::split_ws(it.at("text").get<std::string>()).size();
        out["scores"].push_back({{"id", id}, {"logprob", -static_cast<double>(n)}, {"scored_tokens", n}});
      }
      --in_flight;
      res.set_content(out.dump(), "application/json");
    });
  });

  std::vector<ScoreItem> items;
  for (int k = 0; k < 10; ++k) items.push_back({"i" + std::to_string(k), std::nullopt, std::string(k + 1, 'x')});
  items[3].prefix = "two words";
  items[7].id = "drop";
  HttpScorer scorer(server.url("/score"), 3, 2);
  const auto got = scorer.score(items, ScoringMode::ShiftedPll);

  ASSERT_EQ(requests.size(), 4u);
  EXPECT_LE(peak.load(), 2);
  std::size_t seen = 0;
  for (const auto& r : requests) {
    EXPECT_EQ(r.at("mode"), "shifted-pll");
    EXPECT_LE(r.at("items").size(), 3u);
    for (const auto& it : r.at("items")) {
      ++seen;
      EXPECT_TRUE(it.contains("id") && it.contains("text"));
      EXPECT_EQ(it.contains("prefix"), it.at("id") == "i3");
    }
  }
  EXPECT_EQ(seen, items.size());
  ASSERT_EQ(got.size(), items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k == 7) {
      EXPECT_FALSE(got[k]);
      continue;
    }
    ASSERT_TRUE(got[k]) << "item " << k;
    EXPECT_EQ(got[k]->scored_tokens, 1);
    EXPECT_EQ(got[k]->prefix_tokens_excluded, k == 3 ? 2 : 0);
  }
}

TEST(HttpScoring, ErrorsAndBadOptions) {
  LocalServer server([](httplib::Server& s) {
    s.Post("/junk", [](const httplib::Request&, httplib::Response& res) { res.set_content("{\"oops\":1}", "application/json"); });
    s.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  });
  const std::vector<ScoreItem> items{{"a", std::nullopt, "x y"}};
  HttpScorer junk(server.url("/junk"));
  try {
    junk.score(items, ScoringMode::Causal);
    FAIL() << "expected MalformedResponse";
  } catch (const MalformedResponse& e) {
    EXPECT_NE(e.raw().find("oops"), std::string::npos);
  }
  HttpScorer down(server.url("/down"));
  EXPECT_THROW(down.score(items, ScoringMode::Causal), BackendError);
  EXPECT_THROW(HttpScorer(server.url("/score"), 0), ConfigError);
  EXPECT_THROW(HttpScorer(server.url("/score"), 4, 0), ConfigError);
}

TEST(FileScoring, ReadsScoresJsonl) {
  test::TempDir dir;
  {
    std::ofstream out(dir / "scores.jsonl");
    out << to_json("q/s1", SentenceScore{-1.5, 3, 0}).dump() << "\n" << to_json("q/s2/p", SentenceScore{-2.5, 4, 0}).dump() << "\n";
  }
  FileScorer scorer(dir / "scores.jsonl");
  const auto got = scorer.score({{"q/s1", std::nullopt, "a b c"}, {"q/s2/p", std::string("x y"), "d"}, {"q/zz", std::nullopt, "e"}},
                                ScoringMode::Causal);
  ASSERT_TRUE(got[0]);
  EXPECT_DOUBLE_EQ(got[0]->logprob, -1.5);
  ASSERT_TRUE(got[1]);
  EXPECT_EQ(got[1]->scored_tokens, 4);
  EXPECT_EQ(got[1]->prefix_tokens_excluded, 2);
  EXPECT_FALSE(got[2]);

  {
    std::ofstream out(dir / "dup.jsonl");
    out << "{\"id\":\"a\",\"logprob\":-1,\"scored_tokens\":1}\n{\"id\":\"a\",\"logprob\":-2,\"scored_tokens\":1}\n";
  }
  try {
    FileScorer bad(dir / "dup.jsonl");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  {
    std::ofstream out(dir / "zero.jsonl");
    out << "{\"id\":\"a\",\"logprob\":-1,\"scored_tokens\":0}\n";
  }
  EXPECT_THROW(FileScorer(dir / "zero.jsonl"), InputError);
  {
    std::ofstream out(dir / "missing.jsonl");
    out << "{\"id\":\"a\",\"scored_tokens\":2}\n";
  }
  EXPECT_THROW(FileScorer(dir / "missing.jsonl"), InputError);
}
