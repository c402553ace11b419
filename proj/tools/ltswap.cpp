// ltswap command line: pipeline stages, standalone scoring, fixture export.

#include <CLI11.hpp>

#include <iostream>

#include "ltswap/ltswap.hpp"

namespace fs = std::filesystem;
using namespace ltswap;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kInput = 3, kBackend = 4 };

struct RunArgs {
  std::string stage;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_concurrency;
  std::string filter_backend;
  bool mock_llm = false, dry_run = false, force = false;
};

int cmd_run(const RunArgs& a) {
  auto cfg = pipeline::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.max_concurrency) {
    if (*a.max_concurrency < 1) throw ConfigError("--max-concurrency must be >= 1");
    cfg.llm.max_concurrency = *a.max_concurrency;
  }
  pipeline::RunOptions opt;
  opt.dry_run = a.dry_run;
  opt.force = a.force;
  opt.mock_llm = a.mock_llm;
  if (!a.filter_backend.empty()) opt.filter_backend = a.filter_backend;
  pipeline::Pipeline p(std::move(cfg), opt);
  if (a.stage == "all") p.run_all();
  else p.run(pipeline::stage_from_string(a.stage));
  return kOk;
}

struct ScoreArgs {
  std::string quadruplets, backend, mode = "causal", judge = "quad", sentences, out = ".";
  int bins = 9;
  std::size_t batch = 64;
  int concurrency = 2;
  bool requests_only = false;
};

int cmd_score(const ScoreArgs& a) {
  const BinScheme bins(a.bins);
  const auto quads = read_quadruplets(a.quadruplets, bins);
  const fs::path out = a.out;
  io::write_jsonl(out / "requests.jsonl", score_items(quads), [](const auto& it) { return to_json(it); });
  if (a.requests_only) {
    std::cerr << "score: wrote " << quads.size() * 4 << " requests\n";
    return kOk;
  }
  if (a.backend.empty()) throw ConfigError("--backend is required unless --requests-only is given");
  std::optional<Corpus> corpus;
  if (!a.sentences.empty()) corpus = read_sentences(a.sentences);
  auto scorer = pipeline::make_scorer(a.backend, corpus ? &*corpus : nullptr, fs::current_path(), a.batch,
                                      a.concurrency);
  const auto run =
      score_quadruplets(quads, *scorer, scoring_mode_from_string(a.mode), judge_mode_from_string(a.judge));
  io::write_jsonl(out / "scores.jsonl", run.scores, [](const auto& s) { return to_json(s.first, s.second); });
  io::write_jsonl(out / "verdicts.jsonl", run.verdicts, [](const auto& v) { return to_json(v); });
  io::write_jsonl(out / "skipped.jsonl", run.skipped,
                  [](const auto& id) { return io::json{{"quadruplet_id", id}}; });
  std::size_t correct = 0;
  for (const auto& v : run.verdicts) correct += v.correct;
  std::cerr << "score: " << correct << "/" << run.verdicts.size() << " correct, " << run.skipped.size()
            << " skipped\n";
  return kOk;
}

struct FixtureArgs {
  std::string out;
  std::uint64_t seed = synthetic::FixtureOptions{}.seed;
  std::size_t words = synthetic::FixtureOptions{}.target_words;
};

int cmd_fixture(const FixtureArgs& a) {
  synthetic::FixtureOptions fo;
  fo.seed = a.seed;
  fo.target_words = a.words;
  const auto fx = synthetic::build_fixture(fo);
  const fs::path out = a.out;
  synthetic::write_fixture(out, fx);
  io::json cfg = {
      {"corpus_paths", {"corpus"}},
      {"dictionary_path", "dictionary.txt"},
      {"work_dir", "work"},
      {"seed", 1},
      {"llm", {{"backend", "mock"}}},
      {"filter", {{"enabled", true}, {"backend", "llm"}}},
      {"scoring",
       {{"judge_mode", "quad"},
        {"models",
         {{{"name", "unigram"}, {"backend", "builtin:unigram"}, {"mode", "causal"}},
          {{"name", "bigram"}, {"backend", "builtin:bigram"}, {"mode", "causal"}}}}}}};
  io::write_atomic(out / "config.json", cfg.dump(2) + "\n");
  std::cerr << "fixture: " << fx.documents.size() << " documents, " << fx.dictionary.size()
            << " dictionary words in " << out.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LT-Swap benchmark generator and scoring harness"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run one pipeline stage, or `all` for the main line");
  std::vector<std::string> stages{"all"};
  for (const auto& [s, n] : pipeline::stage_names()) stages.emplace_back(n);
  run->add_option("stage", ra.stage, "stage name")->required()->check(CLI::IsMember(stages));
  run->add_option("--config,-c", ra.config, "config file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", ra.seed, "override the config seed");
  run->add_option("--max-concurrency", ra.max_concurrency, "override llm.max_concurrency");
  run->add_option("--filter-backend", ra.filter_backend, "llm | mock")->check(CLI::IsMember({"llm", "mock"}));
  run->add_flag("--mock-llm", ra.mock_llm, "use the deterministic mock LLM");
  run->add_flag("--dry-run", ra.dry_run, "show what would run");
  run->add_flag("--force", ra.force, "rerun even if up to date");

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "score a quadruplet file with one model");
  score->add_option("--quadruplets,-q", sa.quadruplets, "quadruplets.jsonl")->required()->check(CLI::ExistingFile);
  score->add_option("--backend,-b", sa.backend, "builtin:unigram | builtin:bigram | URL | file:<scores.jsonl>");
  score->add_option("--mode", sa.mode, "causal | pll | shifted-pll")
      ->check(CLI::IsMember({"causal", "pll", "shifted-pll"}));
  score->add_option("--judge", sa.judge, "quad | pair")->check(CLI::IsMember({"quad", "pair"}));
  score->add_option("--sentences", sa.sentences, "ingest/sentences.jsonl (builtin backends)")
      ->check(CLI::ExistingFile);
  score->add_option("--out,-o", sa.out, "output directory");
  score->add_option("--bins", sa.bins, "number of doublings");
  score->add_option("--batch-size", sa.batch, "items per HTTP request");
  score->add_option("--max-concurrency", sa.concurrency, "parallel HTTP requests");
  score->add_flag("--requests-only", sa.requests_only, "only write requests.jsonl");

  FixtureArgs fa;
  auto* fixture = app.add_subcommand("fixture", "write the synthetic corpus, dictionary and a mock config");
  fixture->add_option("--out,-o", fa.out, "output directory")->required();
  fixture->add_option("--seed", fa.seed, "fixture seed");
  fixture->add_option("--words", fa.words, "approximate corpus size in words");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(ra);
    if (*score) return cmd_score(sa);
    if (*fixture) return cmd_fixture(fa);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const MalformedResponse& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
