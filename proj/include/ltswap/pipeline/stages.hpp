#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltswap/blimp.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/feasibility.hpp"
#include "ltswap/forge.hpp"
#include "ltswap/generation.hpp"
#include "ltswap/llm/backend.hpp"
#include "ltswap/llm/gateway.hpp"
#include "ltswap/llm/mock.hpp"
#include "ltswap/metrics.hpp"
#include "ltswap/morphology.hpp"
#include "ltswap/pipeline/config.hpp"
#include "ltswap/pipeline/manifest.hpp"
#include "ltswap/report.hpp"
#include "ltswap/scoring.hpp"
#include "ltswap/tagger.hpp"

namespace ltswap::pipeline {

// Part of every stage's inputs; bump when an artifact format or algorithm
// changes so that stale work directories rebuild.
inline constexpr std::string_view kPipelineVersion = "1";

enum class Stage { Ingest, Candidates, Generate, Filter, Score, Report, Prefix, BlimpRebin, Counts };

inline const std::vector<std::pair<Stage, std::string_view>>& stage_names() {
  static const std::vector<std::pair<Stage, std::string_view>> s{
      {Stage::Ingest, "ingest"},   {Stage::Candidates, "candidates"}, {Stage::Generate, "generate"},
      {Stage::Filter, "filter"},   {Stage::Score, "score"},           {Stage::Report, "report"},
      {Stage::Prefix, "prefix"},   {Stage::BlimpRebin, "blimp-rebin"}, {Stage::Counts, "counts"}};
  return s;
}

inline std::string_view to_string(Stage s) {
  for (const auto& [k, n] : stage_names())
    if (k == s) return n;
  return "?";
}

inline Stage stage_from_string(std::string_view s) {
  for (const auto& [k, n] : stage_names())
    if (n == s) return k;
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

/// Main line run by `run all`; prefix and blimp-rebin are side branches.
inline const std::vector<Stage>& main_line() {
  static const std::vector<Stage> s{Stage::Ingest, Stage::Candidates, Stage::Generate, Stage::Filter,
                                    Stage::Score,  Stage::Report,     Stage::Counts};
  return s;
}

struct RunOptions {
  bool dry_run = false;
  bool force = false;
  bool mock_llm = false;                    // replaces the configured LLM with the mock
  std::optional<std::string> filter_backend;  // llm | mock
  std::ostream* log = &std::cerr;
};

/// Corpus files named by corpus_paths: regular files as given, directories
/// walked recursively (hidden entries skipped), sorted for a stable order.
inline std::vector<fs::path> expand_corpus(const Config& c) {
  std::vector<fs::path> out;
  for (const auto& p0 : c.corpus_paths) {
    const auto p = c.resolve(p0);
    if (fs::is_regular_file(p)) out.push_back(p);
    else if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (auto it = fs::recursive_directory_iterator(p); it != fs::recursive_directory_iterator(); ++it) {
        if (it->path().filename().string().rfind('.', 0) == 0) {
          if (it->is_directory()) it.disable_recursion_pending();
          continue;
        }
        if (it->is_regular_file()) found.push_back(it->path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      throw ConfigError("corpus_paths: '" + p.string() + "' does not exist");
    }
  }
  if (out.empty()) throw ConfigError("corpus_paths: no files found");
  return out;
}

/// TokenModel plus the scorer that reads it.
class BuiltinScorer : public SentenceScorer {
 public:
  BuiltinScorer(std::string id, std::unique_ptr<TokenModel> m) : model_(std::move(m)), inner_(std::move(id), *model_) {}
  std::string id() const override { return inner_.id(); }
  std::vector<std::optional<SentenceScore>> score(const std::vector<ScoreItem>& items, ScoringMode mode) override {
    return inner_.score(items, mode);
  }

 private:
  std::unique_ptr<TokenModel> model_;
  LocalScorer inner_;
};

/// builtin:unigram, builtin:bigram, http(s)://..., or file:<scores.jsonl>.
/// Builtin models are estimated from `corpus`.
inline std::unique_ptr<SentenceScorer> make_scorer(const std::string& backend, const Corpus* corpus,
                                                   const fs::path& base_dir, std::size_t batch = 64,
                                                   int concurrency = 2) {
  if (backend == "builtin:unigram" || backend == "builtin:bigram") {
    if (!corpus) throw ConfigError("backend " + backend + " needs the ingested corpus");
    if (backend == "builtin:unigram") {
      std::map<std::string, std::uint64_t> counts;
      for (const auto& s : corpus->sentences)
        for (const auto& t : s.tokens) ++counts[t];
      return std::make_unique<BuiltinScorer>(backend, std::make_unique<UnigramModel>(counts));
    }
    return std::make_unique<BuiltinScorer>(backend, std::make_unique<BigramModel>(corpus->sentences));
  }
  if (backend.rfind("http://", 0) == 0 || backend.rfind("https://", 0) == 0)
    return std::make_unique<HttpScorer>(backend, batch, concurrency);
  if (backend.rfind("file:", 0) == 0) {
    fs::path p = backend.substr(5);
    return std::make_unique<FileScorer>(p.is_absolute() ? p : base_dir / p);
  }
  throw ConfigError("unknown scorer backend '" + backend + "' (builtin:unigram, builtin:bigram, URL, file:<path>)");
}

class Pipeline {
 public:
  Pipeline(Config cfg, RunOptions opt = {}) : cfg_(std::move(cfg)), opt_(opt), bins_(cfg_.bins_n) {
    if (opt_.mock_llm) cfg_.llm.backend = "mock";
    if (opt_.filter_backend) {
      if (*opt_.filter_backend != "llm" && *opt_.filter_backend != "mock")
        throw ConfigError("--filter-backend must be 'llm' or 'mock'");
      cfg_.filter_backend = *opt_.filter_backend;
    }
    for (const auto& [name, body] : cfg_.templates) templates_.override_body(name, body);
  }

  const Config& config() const { return cfg_; }
  fs::path work() const { return cfg_.work(); }

  /// Runs one stage. Returns true if it executed, false if it was current
  /// (or only planned, under --dry-run).
  bool run(Stage s) {
    const auto name = std::string(to_string(s));
    Plan plan;
    try {
      plan = make_plan(s);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      if (!opt_.dry_run) throw;
      log() << name << ": would run after upstream stages (" << e.what() << ")\n";
      return false;
    }
    const auto prev = load_manifest(work(), name);
    const bool current = !opt_.force && up_to_date(prev, plan.inputs, work());
    if (opt_.dry_run) {
      log() << name << ": " << (current ? "up to date" : "would run") << "\n";
      for (const auto& [k, v] : plan.inputs) log() << "  in  " << k << " " << v.substr(0, 12) << "\n";
      for (const auto& o : plan.outputs) log() << "  out " << o << "\n";
      return false;
    }
    if (current) {
      log() << name << ": up to date\n";
      return false;
    }
    StageManifest m;
    m.stage = name;
    m.inputs = plan.inputs;
    m.started = llm::utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    plan.exec();
    for (const auto& o : plan.outputs) {
      const auto p = work() / o;
      if (!fs::is_regular_file(p)) throw Error("stage " + name + " did not produce " + o);
      m.outputs[o] = sha256_file(p);
    }
    m.finished = llm::utc_timestamp();
    save_manifest(work(), m);
    log() << name << ": done in "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
    return true;
  }

  void run_all() {
    for (auto s : main_line()) run(s);
  }

 private:
  struct Plan {
    std::map<std::string, std::string> inputs;
    std::vector<std::string> outputs;  // relative to the work dir
    std::function<void()> exec;
  };

  std::ostream& log() { return *opt_.log; }

  // ---- input helpers -------------------------------------------------------

  fs::path artifact(const std::string& rel, Stage producer) const {
    const auto p = work() / rel;
    if (!fs::is_regular_file(p))
      throw Error("missing " + p.string() + "; run `ltswap run " + std::string(to_string(producer)) + "` first");
    return p;
  }

  void add_file(Plan& plan, const std::string& rel, Stage producer) const {
    plan.inputs["file:" + rel] = sha256_file(artifact(rel, producer));
  }

  void add_external(Plan& plan, const fs::path& p, const std::string& key) const {
    if (!fs::is_regular_file(p)) throw ConfigError(key + ": cannot read '" + p.string() + "'");
    plan.inputs["file:" + key] = sha256_file(p);
  }

  static void add_param(Plan& plan, const std::string& name, const io::json& v) {
    plan.inputs["param:" + name] = param_hash(v);
  }

  Corpus load_corpus() const { return read_sentences(artifact("ingest/sentences.jsonl", Stage::Ingest)); }
  VocabTable load_vocab() const {
    return read_vocab(artifact("ingest/vocab.jsonl", Stage::Ingest), artifact("ingest/token_counts.jsonl", Stage::Ingest));
  }
  SentenceIndex load_index() const {
    return deserialize_index(io::read_file(artifact("ingest/index.bin", Stage::Ingest)));
  }

  std::unique_ptr<llm::ChatBackend> chat_backend(bool for_filter) const {
    if (cfg_.llm.backend == "mock" || (for_filter && cfg_.filter_backend == "mock")) {
      llm::MockOptions mo;
      mo.noise = !for_filter;
      return std::make_unique<llm::MockChatBackend>(mo);
    }
    return std::make_unique<llm::HttpChatBackend>(cfg_.llm.url, cfg_.llm.model, cfg_.llm.api_key_env,
                                                  cfg_.llm.timeout_seconds);
  }

  llm::GatewayOptions gateway_options() const {
    llm::GatewayOptions g;
    g.max_concurrency = cfg_.llm.max_concurrency;
    g.retries = cfg_.llm.retries;
    g.temperature = cfg_.llm.temperature;
    return g;
  }

  io::json templates_json() const {
    io::json j = io::json::object();
    for (const auto& n : templates_.names()) j[n] = templates_.get(n).body;
    return j;
  }

  std::string quadruplet_source() const {
    return cfg_.filter_enabled ? "filter/kept.jsonl" : "generate/quadruplets.jsonl";
  }
  Stage quadruplet_producer() const { return cfg_.filter_enabled ? Stage::Filter : Stage::Generate; }

  // ---- plans ---------------------------------------------------------------

  Plan make_plan(Stage s) {
    auto p = make_plan_for(s);
    p.inputs["param:version"] = std::string(kPipelineVersion);
    return p;
  }

  Plan make_plan_for(Stage s) {
    switch (s) {
      case Stage::Ingest: return plan_ingest();
      case Stage::Candidates: return plan_candidates();
      case Stage::Generate: return plan_generate();
      case Stage::Filter: return plan_filter();
      case Stage::Score: return plan_score();
      case Stage::Report: return plan_report();
      case Stage::Prefix: return plan_prefix();
      case Stage::BlimpRebin: return plan_blimp();
      case Stage::Counts: return plan_counts();
    }
    throw ContractViolation("unknown stage");
  }

  Plan plan_ingest() {
    Plan p;
    const auto files = expand_corpus(cfg_);
    const auto dict = cfg_.resolve(cfg_.dictionary_path);
    io::json names = io::json::array();
    for (const auto& f : files) {
      const auto rel = fs::relative(f, cfg_.base_dir).generic_string();
      p.inputs["file:corpus/" + rel] = sha256_file(f);
      names.push_back(rel);
    }
    add_external(p, dict, "dictionary_path");
    add_param(p, "corpus_files", names);
    p.outputs = {"ingest/sentences.jsonl", "ingest/vocab.jsonl", "ingest/token_counts.jsonl", "ingest/index.bin"};
    p.exec = [this, files, dict] {
      RawCorpus docs;
      for (const auto& f : files) docs.push_back({fs::relative(f, cfg_.base_dir).generic_string(), io::read_file(f)});
      const auto corpus = ingest(docs, true);
      const auto vocab = build_vocab(corpus.sentences, Dictionary::load(dict));
      write_corpus(work() / "ingest", corpus, vocab);
      log() << "ingest: " << corpus.sentences.size() << " sentences, " << vocab.total_tokens << " tokens, "
            << vocab.entries.size() << " dictionary types\n";
    };
    return p;
  }

  Plan plan_candidates() {
    Plan p;
    add_file(p, "ingest/sentences.jsonl", Stage::Ingest);
    add_file(p, "ingest/vocab.jsonl", Stage::Ingest);
    add_file(p, "ingest/token_counts.jsonl", Stage::Ingest);
    const auto dict = cfg_.resolve(cfg_.dictionary_path);
    add_external(p, dict, "dictionary_path");
    if (cfg_.tagger == "imported") add_external(p, cfg_.resolve(*cfg_.tags_path), "tagger.path");
    add_param(p, "candidates", {{"tagger", cfg_.tagger}, {"bins", cfg_.bins_n}, {"extended", cfg_.extended_spelling}});
    p.outputs = {"candidates/tags.tsv", "candidates/types.jsonl", "candidates/candidates.jsonl"};
    p.exec = [this, dict] {
      const auto corpus = load_corpus();
      const auto vocab = load_vocab();
      std::unique_ptr<TaggerBackend> tagger;
      if (cfg_.tagger == "imported") tagger = std::make_unique<ImportedTags>(cfg_.resolve(*cfg_.tags_path));
      else tagger = std::make_unique<BuiltinTagger>();
      const auto table = tagger->tag(corpus);
      const auto types = majority_tags(corpus, table);
      MorphologyOptions mo;
      mo.extended_spelling = cfg_.extended_spelling;
      const auto cands = select_candidates(vocab, types, Dictionary::load(dict), bins_, mo);
      io::write_atomic(work() / "candidates/tags.tsv", tags_tsv(corpus, table));
      std::vector<io::json> t;
      for (const auto& [w, tag] : types) t.push_back({{"word", w}, {"pos", to_string(tag)}});
      io::write_jsonl(work() / "candidates/types.jsonl", t);
      io::write_jsonl(work() / "candidates/candidates.jsonl", cands, [](const auto& r) { return to_json(r); });
      log() << "candidates: " << types.size() << " tagged types, " << cands.size() << " candidates\n";
    };
    return p;
  }

  Plan plan_generate() {
    Plan p;
    add_file(p, "candidates/candidates.jsonl", Stage::Candidates);
    add_file(p, "ingest/token_counts.jsonl", Stage::Ingest);
    add_file(p, "ingest/vocab.jsonl", Stage::Ingest);
    auto backend = chat_backend(false);
    add_param(p, "generate", {{"seed", cfg_.seed},
                              {"sentences_per_word", cfg_.sentences_per_word},
                              {"agreement", cfg_.agreement},
                              {"backend", backend->id()},
                              {"temperature", cfg_.llm.temperature},
                              {"templates", templates_json()}});
    p.outputs = {"generate/generations.jsonl", "generate/agreement_responses.jsonl", "generate/quadruplets.jsonl",
                 "generate/discards.jsonl"};
    p.exec = [this, b = std::shared_ptr<llm::ChatBackend>(std::move(backend))] {
      const auto cands = read_candidates(work() / "candidates/candidates.jsonl", bins_);
      const auto vocab = load_vocab();
      llm::ResponseCache cache(cfg_.llm_cache());
      llm::Gateway gw(*b, cache, gateway_options());
      GenerationOptions go;
      go.seed = cfg_.seed;
      go.sentences_per_word = cfg_.sentences_per_word;
      go.agreement = cfg_.agreement;
      const auto set = generate_sentences(cands, gw, templates_, go);
      write_generation_set(work() / "generate", set);
      ForgeOptions fo;
      fo.seed = cfg_.seed;
      const auto res = forge(set, cands, vocab, bins_, fo);
      io::write_jsonl(work() / "generate/quadruplets.jsonl", res.quadruplets, [](const auto& q) { return to_json(q); });
      io::write_jsonl(work() / "generate/discards.jsonl", res.discards);
      log() << "generate: " << gw.network_calls() << " LLM calls, " << res.count(Subtask::WordSwap) << " WS, "
            << res.count(Subtask::InflectionSwap) << " IS, " << res.count(Subtask::AgreementSwap) << " AS, "
            << res.discards.size() << " discards\n";
    };
    return p;
  }

  Plan plan_filter() {
    Plan p;
    add_file(p, "generate/quadruplets.jsonl", Stage::Generate);
    add_file(p, "ingest/sentences.jsonl", Stage::Ingest);
    add_file(p, "ingest/index.bin", Stage::Ingest);
    auto backend = chat_backend(true);
    add_param(p, "filter", {{"enabled", cfg_.filter_enabled}, {"backend", backend->id()}, {"templates", templates_json()}});
    p.outputs = {"filter/verdicts.jsonl", "filter/kept.jsonl"};
    p.exec = [this, b = std::shared_ptr<llm::ChatBackend>(std::move(backend))] {
      const auto quads = read_quadruplets(work() / "generate/quadruplets.jsonl", bins_);
      if (!cfg_.filter_enabled) {
        io::write_jsonl(work() / "filter/verdicts.jsonl", std::vector<io::json>{});
        io::write_jsonl(work() / "filter/kept.jsonl", quads, [](const auto& q) { return to_json(q); });
        log() << "filter: disabled, kept all " << quads.size() << "\n";
        return;
      }
      const auto corpus = load_corpus();
      const auto index = load_index();
      llm::ResponseCache cache(cfg_.llm_cache());
      llm::Gateway gw(*b, cache, gateway_options());
      const auto verdicts = run_filter(quads, corpus, index, gw, templates_);
      const auto kept = kept_only(quads, verdicts);
      io::write_jsonl(work() / "filter/verdicts.jsonl", verdicts, [](const auto& v) { return to_json(v); });
      io::write_jsonl(work() / "filter/kept.jsonl", kept, [](const auto& q) { return to_json(q); });
      log() << "filter: kept " << kept.size() << " of " << quads.size() << "\n";
    };
    return p;
  }

  void add_model_inputs(Plan& p, const ModelConfig& m) const {
    if (m.backend.rfind("file:", 0) == 0) {
      fs::path f = m.backend.substr(5);
      add_external(p, f.is_absolute() ? f : cfg_.base_dir / f, "scores/" + m.name);
    }
  }

  std::unique_ptr<SentenceScorer> scorer_for(const ModelConfig& m, const Corpus* corpus) const {
    return make_scorer(m.backend, corpus, cfg_.base_dir, cfg_.scoring_batch_size, cfg_.scoring_concurrency);
  }

  bool needs_corpus() const {
    return std::any_of(cfg_.models.begin(), cfg_.models.end(),
                       [](const ModelConfig& m) { return m.backend.rfind("builtin:", 0) == 0; });
  }

  Plan plan_score() {
    Plan p;
    if (cfg_.models.empty()) throw ConfigError("scoring.models: no models configured");
    add_file(p, quadruplet_source(), quadruplet_producer());
    if (needs_corpus()) add_file(p, "ingest/sentences.jsonl", Stage::Ingest);
    io::json models = io::json::array();
    for (const auto& m : cfg_.models) {
      models.push_back({{"name", m.name}, {"backend", m.backend}, {"mode", m.mode}});
      add_model_inputs(p, m);
      for (const auto* f : {"requests.jsonl", "scores.jsonl", "verdicts.jsonl", "skipped.jsonl"})
        p.outputs.push_back("score/" + m.name + "/" + f);
    }
    add_param(p, "score", {{"models", models}, {"judge_mode", cfg_.judge_mode}});
    p.exec = [this] {
      const auto quads = read_quadruplets(work() / quadruplet_source(), bins_);
      std::optional<Corpus> corpus;
      if (needs_corpus()) corpus = load_corpus();
      for (const auto& m : cfg_.models) {
        const auto dir = work() / "score" / m.name;
        const auto mode = scoring_mode_from_string(m.mode);
        io::write_jsonl(dir / "requests.jsonl", score_items(quads), [](const auto& it) { return to_json(it); });
        auto scorer = scorer_for(m, corpus ? &*corpus : nullptr);
        const auto run = score_quadruplets(quads, *scorer, mode, judge_mode_from_string(cfg_.judge_mode));
        write_run(dir, run);
        log() << "score " << m.name << ": " << run.verdicts.size() << " verdicts, " << run.skipped.size()
              << " skipped\n";
      }
    };
    return p;
  }

  static void write_run(const fs::path& dir, const ScoringRun& run) {
    io::write_jsonl(dir / "scores.jsonl", run.scores, [](const auto& s) { return to_json(s.first, s.second); });
    io::write_jsonl(dir / "verdicts.jsonl", run.verdicts, [](const auto& v) { return to_json(v); });
    io::write_jsonl(dir / "skipped.jsonl", run.skipped, [](const auto& id) { return io::json{{"quadruplet_id", id}}; });
  }

  Plan plan_report() {
    Plan p;
    add_file(p, quadruplet_source(), quadruplet_producer());
    for (const auto& m : cfg_.models) add_file(p, "score/" + m.name + "/verdicts.jsonl", Stage::Score);
    add_param(p, "report", {{"bins", cfg_.bins_n}, {"judge_mode", cfg_.judge_mode}});
    p.outputs = {"report/report.json", "report/matrix.csv", "report/curves.csv", "report/counts.csv",
                 "report/agreement_distance.csv"};
    p.exec = [this] {
      const auto quads = read_quadruplets(work() / quadruplet_source(), bins_);
      const auto ids = by_id(quads);
      ReportInputs in;
      in.quadruplets = quads;
      ScoreMatrix dist;
      for (const auto& m : cfg_.models) {
        std::vector<QuadrupletVerdict> v;
        io::for_each_jsonl(work() / "score" / m.name / "verdicts.jsonl",
                           [&](const io::json& j, std::size_t) { v.push_back(quadruplet_verdict_from_json(j)); });
        tally(in.matrix, m.name, v, ids);
        const auto dm = distance_matrix(m.name, v, quads);
        for (const auto& [k, c] : dm.cells()) dist.set(k, c.correct, c.n);
      }
      in.distance = dist;
      emit_report(work() / "report", in, bins_, {{"judge_mode", cfg_.judge_mode}});
      log() << "report: " << in.matrix.cells().size() << " cells\n";
    };
    return p;
  }

  Plan plan_prefix() {
    Plan p;
    if (cfg_.models.empty()) throw ConfigError("scoring.models: no models configured");
    add_file(p, quadruplet_source(), quadruplet_producer());
    add_file(p, "ingest/sentences.jsonl", Stage::Ingest);
    add_file(p, "ingest/index.bin", Stage::Ingest);
    io::json models = io::json::array();
    for (const auto& m : cfg_.models) {
      models.push_back({{"name", m.name}, {"backend", m.backend}, {"mode", m.mode}});
      add_model_inputs(p, m);
      for (const auto* f : {"requests.jsonl", "scores.jsonl", "verdicts.jsonl", "skipped.jsonl"})
        p.outputs.push_back("prefix/" + m.name + "/" + f);
    }
    p.outputs.push_back("prefix/delta.csv");
    add_param(p, "prefix", {{"models", models}});
    p.exec = [this] {
      auto quads = read_quadruplets(work() / quadruplet_source(), bins_);
      std::erase_if(quads, [](const Quadruplet& q) { return q.subtask != Subtask::WordSwap; });
      const auto corpus = load_corpus();
      const auto index = load_index();
      const PrefixFn prefix = [&](const std::string& w) -> std::optional<std::string> {
        const auto id = prefix_retrieve(w, corpus, index);
        if (!id) return std::nullopt;
        return text::join(corpus.sentence(*id).tokens);
      };
      std::string csv = io::csv_row({"model", "bin", "n", "baseline", "prefixed", "delta"});
      for (const auto& m : cfg_.models) {
        const auto dir = work() / "prefix" / m.name;
        const auto mode = scoring_mode_from_string(m.mode);
        auto scorer = scorer_for(m, &corpus);
        const auto base = score_quadruplets(quads, *scorer, mode, JudgeMode::Quad);
        const auto items = score_items(quads, prefix);
        io::write_jsonl(dir / "requests.jsonl", items, [](const auto& it) { return to_json(it); });
        const auto pre = score_quadruplets(quads, *scorer, mode, JudgeMode::Quad, prefix);
        write_run(dir, pre);
        const auto d = prefix_delta(quads, base.verdicts, pre.verdicts);
        for (const auto& [bin, cells] : d.bins)
          csv += io::csv_row({m.name, std::to_string(bin), std::to_string(cells.first.n),
                              io::format_double(cells.first.accuracy), io::format_double(cells.second.accuracy),
                              io::format_double(d.delta(bin))});
        csv += io::csv_row({m.name, "mean_1_2_4", "", "", "", io::format_double(d.mean_low_bins)});
        log() << "prefix " << m.name << ": mean delta over bins 1,2,4 = " << d.mean_low_bins << "\n";
      }
      io::write_atomic(work() / "prefix/delta.csv", csv);
    };
    return p;
  }

  Plan plan_blimp() {
    Plan p;
    if (cfg_.blimp_paths.empty()) throw ConfigError("blimp_paths: no BLiMP files configured");
    add_file(p, "ingest/token_counts.jsonl", Stage::Ingest);
    add_file(p, "ingest/vocab.jsonl", Stage::Ingest);
    for (std::size_t i = 0; i < cfg_.blimp_paths.size(); ++i)
      add_external(p, cfg_.resolve(cfg_.blimp_paths[i]), "blimp_paths[" + std::to_string(i) + "]");
    add_param(p, "blimp", {{"bins", cfg_.bins_n}});
    p.outputs = {"blimp/bins.jsonl", "blimp/histogram.csv"};
    p.exec = [this] {
      const auto vocab = load_vocab();
      std::vector<io::json> rows;
      std::vector<BlimpBin> all;
      for (const auto& bp : cfg_.blimp_paths) {
        const auto pairs = read_blimp(cfg_.resolve(bp));
        const auto bins = blimp_rebin(pairs, vocab, bins_);
        for (std::size_t i = 0; i < bins.size(); ++i)
          rows.push_back({{"file", bp.generic_string()}, {"index", i}, {"uid", pairs[i].uid},
                          {"bin", bins[i].bin.label()}, {"case", to_string(bins[i].kind)}, {"word", bins[i].word}});
        all.insert(all.end(), bins.begin(), bins.end());
      }
      io::write_jsonl(work() / "blimp/bins.jsonl", rows);
      std::string csv = io::csv_row({"bin", "pairs"});
      const auto h = bin_histogram(all);
      for (const auto& b : bins_.bins()) {
        const auto it = h.find(b.label());
        csv += io::csv_row({std::to_string(b.label()), std::to_string(it == h.end() ? 0 : it->second)});
      }
      io::write_atomic(work() / "blimp/histogram.csv", csv);
      log() << "blimp-rebin: " << all.size() << " pairs\n";
    };
    return p;
  }

  Plan plan_counts() {
    Plan p;
    add_file(p, "generate/quadruplets.jsonl", Stage::Generate);
    if (cfg_.filter_enabled) add_file(p, "filter/kept.jsonl", Stage::Filter);
    add_param(p, "counts", {{"bins", cfg_.bins_n}});
    p.outputs = {"counts/generated.csv", "counts/kept.csv"};
    p.exec = [this] {
      io::write_atomic(work() / "counts/generated.csv",
                       counts_csv(read_quadruplets(work() / "generate/quadruplets.jsonl", bins_), bins_));
      io::write_atomic(work() / "counts/kept.csv",
                       counts_csv(read_quadruplets(work() / quadruplet_source(), bins_), bins_));
    };
    return p;
  }

  Config cfg_;
  RunOptions opt_;
  BinScheme bins_;
  llm::TemplateSet templates_;
};

}  // namespace ltswap::pipeline
