#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include "support.hpp"

using namespace ltswap;
using namespace std::chrono_literals;
using test::EnvVar;
using test::LocalServer;

namespace {

std::string expected_prompt(const std::string& name) {
  auto s = io::read_file(test::data_dir() / "prompts" / (name + ".txt"));
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

// ---- templates -------------------------------------------------------------

TEST(Templates, FilterPromptsAreBitExact) {
  const llm::TemplateSet ts;
  EXPECT_EQ(ts.get("wordswap_filter")
                .render({{"context", "The blick slept peacefully on the windowsill"},
                         {"a", "The blick is sleeping on the mat."},
                         {"b", "The blick is sailing on the sea"}}),
            expected_prompt("wordswap_filter"));
  EXPECT_EQ(ts.get("syntactic_filter")
                .render({{"a", "He couldn’t sleep last night."}, {"b", "He couldn’t sleeping last night."}}),
            expected_prompt("syntactic_filter"));
}

TEST(Templates, AgreementPromptsAreBitExact) {
  const llm::TemplateSet ts;
  for (const auto* name : {"agreement_subj_verb_short", "agreement_subj_verb_long", "agreement_anaphora_short",
                           "agreement_anaphora_long", "agreement_det_noun"}) {
    const auto got = ts.get(name).render({{"singular", "cat"}, {"plural", "cats"}});
    EXPECT_EQ(got, expected_prompt(name)) << name;
    EXPECT_NE(got.find("encapsulate the two sentences together in between brackets"), std::string::npos);
  }
}

TEST(Templates, UnboundPlaceholderIsAnError) {
  EXPECT_THROW(llm::syntactic_template().render({{"a", "x"}}), ConfigError);
  EXPECT_EQ((llm::PromptTemplate{"t", "{a} {not a key} {}", {}}.render({{"a", "1"}})), "1 {not a key} {}");
}

TEST(Templates, OverridesKeepThePlaceholderSet) {
  llm::TemplateSet ts;
  ts.override_body("generate_word", "Write about {w} ({pos}) in [brackets].");
  EXPECT_EQ(ts.get("generate_word").render({{"w", "cat"}, {"pos", "noun"}}), "Write about cat (noun) in [brackets].");
  EXPECT_THROW(ts.override_body("generate_word", "Write about {w}."), ConfigError);
  EXPECT_THROW(ts.override_body("nope", "x"), ConfigError);
}

// ---- answers ---------------------------------------------------------------

TEST(Answers, ChoiceIsTheLastBracketedLetter) {
  EXPECT_EQ(llm::parse_choice("[A]").value, llm::Choice::A);
  EXPECT_EQ(llm::parse_choice("I pick [ B ].").value, llm::Choice::B);
  EXPECT_EQ(llm::parse_choice("[A] no wait, [B]").value, llm::Choice::B);
  EXPECT_EQ(llm::parse_choice("A").value, llm::Choice::Undecided);
  EXPECT_EQ(llm::parse_choice("[C]").value, llm::Choice::Undecided);
  EXPECT_EQ(llm::parse_choice("[AB]").value, llm::Choice::Undecided);
  EXPECT_EQ(llm::parse_choice("").value, llm::Choice::Undecided);
  EXPECT_EQ(llm::parse_choice("keep me [A]").raw, "keep me [A]");
}

TEST(Answers, BracketedPayload) {
  EXPECT_EQ(llm::extract_bracketed("Sure: [The cat sat.]"), "The cat sat.");
  EXPECT_EQ(llm::extract_bracketed("[One.] and [Two.]"), "One. Two.");
  EXPECT_EQ(llm::extract_bracketed("[[Nested.]]"), "Nested.");
  try {
    llm::extract_bracketed("no brackets here");
    FAIL();
  } catch (const MalformedResponse& e) {
    EXPECT_EQ(e.raw(), "no brackets here");
  }
  EXPECT_THROW(llm::extract_bracketed("[ ]"), MalformedResponse);
}

TEST(Answers, SplitSentences) {
  const auto s = llm::split_sentences(text::tokenize("The cat sleeps. The cats sleep. tail"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(text::join(s[1]), "the cats sleep .");
  EXPECT_EQ(text::join(s[2]), "tail");
}

// ---- gateway ---------------------------------------------------------------

TEST(Gateway, MockGenerationIsDeterministicAndUsesTheWord) {
  llm::MockChatBackend mock(llm::MockOptions{false});
  llm::ResponseCache c1, c2;
  llm::Gateway g1(mock, c1), g2(mock, c2);
  const auto& t = llm::default_generation_template();
  const llm::Bindings b{{"w", "cat"}, {"pos", "noun"}};
  const auto a = g1.generate(t, b, 3, 5);
  const auto again = g2.generate(t, b, 3, 5);
  EXPECT_EQ(a, again);
  for (const auto& s : a) {
    const auto toks = text::tokenize(s);
    EXPECT_NE(std::find(toks.begin(), toks.end(), "cat"), toks.end()) << s;
  }
}

TEST(Gateway, CacheAnswersRepeatedRequests) {
  std::atomic<int> calls{0};
  llm::FunctionChatBackend be("count", [&](const llm::ChatRequest& r) {
    ++calls;
    return "[" + r.prompt + "#" + std::to_string(r.seed) + "]";
  });
  llm::ResponseCache cache;
  llm::Gateway gw(be, cache);
  const llm::PromptTemplate t{"t", "say {x}", llm::ExpectedAnswer::FreeTextBracketed};
  const auto first = gw.generate(t, {{"x", "hi"}}, 2, 7);
  EXPECT_EQ(first, (std::vector<std::string>{"say hi#7", "say hi#8"}));
  EXPECT_EQ(gw.generate(t, {{"x", "hi"}}, 2, 7), first);
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(gw.network_calls(), 2u);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Gateway, RequestHashCoversTemplateBindingsBackendAndSeed) {
  llm::FunctionChatBackend a("a", [](const llm::ChatRequest&) { return ""; });
  llm::FunctionChatBackend b("b", [](const llm::ChatRequest&) { return ""; });
  llm::ResponseCache cache;
  llm::Gateway ga(a, cache), gb(b, cache);
  const llm::PromptTemplate t{"t", "say {x}", {}}, t2{"t", "tell {x}", {}}, t3{"u", "say {x}", {}};
  const auto h = ga.request_hash(t, {{"x", "1"}}, 0);
  EXPECT_EQ(h, ga.request_hash(t, {{"x", "1"}}, 0));
  EXPECT_NE(h, ga.request_hash(t, {{"x", "2"}}, 0));
  EXPECT_NE(h, ga.request_hash(t, {{"x", "1"}}, 1));
  EXPECT_NE(h, ga.request_hash(t2, {{"x", "1"}}, 0));
  EXPECT_NE(h, ga.request_hash(t3, {{"x", "1"}}, 0));
  EXPECT_NE(h, gb.request_hash(t, {{"x", "1"}}, 0));
  EXPECT_EQ(h.size(), 64u);
}

TEST(Gateway, PersistentCacheReplaysWithoutCalls) {
  test::TempDir dir;
  const auto path = dir / "cache.jsonl";
  const llm::PromptTemplate t{"t", "say {x}", {}};
  std::atomic<int> calls{0};
  llm::FunctionChatBackend be("p", [&](const llm::ChatRequest& r) {
    ++calls;
    return "[" + r.prompt + "]";
  });
  {
    llm::ResponseCache cache(path);
    llm::Gateway gw(be, cache);
    gw.generate(t, {{"x", "a"}}, 1);
    gw.generate(t, {{"x", "b"}}, 1);
  }
  EXPECT_EQ(io::read_jsonl(path).size(), 2u);
  llm::ResponseCache reloaded(path);
  llm::Gateway gw(be, reloaded);
  EXPECT_EQ(gw.generate(t, {{"x", "b"}}, 1).front(), "say b");
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(gw.network_calls(), 0u);
}

TEST(Gateway, FirstStoredAnswerWins) {
  llm::ResponseCache cache;
  EXPECT_EQ(cache.put("h", "one"), "one");
  EXPECT_EQ(cache.put("h", "two"), "one");
  EXPECT_EQ(cache.find("h"), "one");
}

TEST(Gateway, TransportErrorsAreRetried) {
  std::atomic<int> calls{0};
  llm::FunctionChatBackend flaky("flaky", [&](const llm::ChatRequest&) -> std::string {
    if (++calls < 3) throw BackendError("down");
    return "[ok]";
  });
  const llm::PromptTemplate t{"t", "x", {}};
  llm::GatewayOptions opt;
  opt.backoff = 1ms;
  {
    llm::ResponseCache cache;
    opt.retries = 3;
    llm::Gateway gw(flaky, cache, opt);
    EXPECT_EQ(gw.generate(t, {}, 1).front(), "ok");
    EXPECT_EQ(calls.load(), 3);
  }
  calls = 0;
  {
    llm::ResponseCache cache;
    opt.retries = 1;
    llm::Gateway gw(flaky, cache, opt);
    EXPECT_THROW(gw.generate(t, {}, 1), BackendError);
    EXPECT_EQ(calls.load(), 2);
    EXPECT_EQ(cache.size(), 0u);
  }
}

TEST(Gateway, MalformedAnswersAreNotRetried) {
  std::atomic<int> calls{0};
  llm::FunctionChatBackend be("m", [&](const llm::ChatRequest&) {
    ++calls;
    return std::string("no brackets");
  });
  llm::ResponseCache cache;
  llm::Gateway gw(be, cache);
  EXPECT_THROW(gw.generate(llm::default_generation_template(), {{"w", "x"}, {"pos", "noun"}}, 1), MalformedResponse);
  EXPECT_EQ(calls.load(), 1);
}

TEST(Gateway, ConcurrencyIsBoundedAndOrderKept) {
  std::atomic<int> in_flight{0}, peak{0};
  llm::FunctionChatBackend be("slow", [&](const llm::ChatRequest& r) {
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(5ms);
    --in_flight;
    return r.prompt;
  });
  const llm::PromptTemplate t{"t", "n{i}", {}};
  for (int limit : {1, 3}) {
    peak = 0;
    llm::ResponseCache cache;
    llm::GatewayOptions opt;
    opt.max_concurrency = limit;
    llm::Gateway gw(be, cache, opt);
    std::vector<llm::Call> calls;
    for (int i = 0; i < 24; ++i) calls.push_back({&t, {{"i", std::to_string(i)}}, 0});
    const auto res = gw.run(calls);
    ASSERT_EQ(res.size(), 24u);
    for (int i = 0; i < 24; ++i) EXPECT_EQ(res[static_cast<std::size_t>(i)].text, "n" + std::to_string(i));
    EXPECT_LE(peak.load(), limit);
    EXPECT_GE(peak.load(), 1);
  }
}

TEST(Gateway, RejectsBadOptions) {
  llm::MockChatBackend mock;
  llm::ResponseCache cache;
  llm::GatewayOptions opt;
  opt.max_concurrency = 0;
  EXPECT_THROW(llm::Gateway(mock, cache, opt), ConfigError);
}

// ---- HTTP chat backend -----------------------------------------------------

TEST(HttpChat, SendsBearerKeyAndParsesContent) {
  const std::string key = "sk-test-7f3a91";
  EnvVar env("LTSWAP_API_KEY", key.c_str());
  std::string seen_auth, seen_model;
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen_auth = req.get_header_value("Authorization");
      const auto body = nlohmann::json::parse(req.body);
      seen_model = body.at("model").get<std::string>();
      const auto prompt = body.at("messages").at(0).at("content").get<std::string>();
      nlohmann::json out;
      out["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", "[" + prompt + "]"}}}}});
      res.set_content(out.dump(), "application/json");
    });
  });
  llm::HttpChatBackend be(server.url("/v1/chat/completions"), "test-model");
  EXPECT_EQ(be.id().find(key), std::string::npos);
  test::TempDir dir;
  {
    llm::ResponseCache cache(dir / "cache.jsonl");
    llm::Gateway gw(be, cache);
    EXPECT_EQ(gw.generate(llm::PromptTemplate{"t", "hello {x}", {}}, {{"x", "there"}}, 1).front(), "hello there");
  }
  EXPECT_EQ(seen_auth, "Bearer " + key);
  EXPECT_EQ(seen_model, "test-model");
  EXPECT_EQ(io::read_file(dir / "cache.jsonl").find(key), std::string::npos);
}

TEST(HttpChat, ErrorsDoNotCarryTheKey) {
  const std::string key = "sk-test-secret-42";
  EnvVar env("LTSWAP_API_KEY", key.c_str());
  LocalServer server([&](httplib::Server& s) {
    s.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    s.Post("/junk", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
  });
  try {
    llm::HttpChatBackend(server.url("/fail"), "m").complete({"hi", 0.0, 0});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(std::string(e.what()).find(key), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("503"), std::string::npos);
  }
  try {
    llm::HttpChatBackend(server.url("/junk"), "m").complete({"hi", 0.0, 0});
    FAIL();
  } catch (const MalformedResponse& e) {
    EXPECT_EQ(e.raw(), "{}");
  }
}

TEST(HttpChat, UnreachableEndpointIsABackendError) {
  llm::HttpChatBackend be("http://127.0.0.1:1/v1", "m", "LTSWAP_API_KEY", 2);
  EXPECT_THROW(be.complete({"hi", 0.0, 0}), BackendError);
  EXPECT_THROW(llm::HttpChatBackend("ftp://x/y", "m"), ConfigError);
}
