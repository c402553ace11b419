#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ltswap/agreement.hpp"
#include "ltswap/io.hpp"
#include "ltswap/llm/gateway.hpp"
#include "ltswap/llm/templates.hpp"
#include "ltswap/morphology.hpp"

namespace ltswap {

struct GenerationOptions {
  int sentences_per_word = 2;
  std::uint64_t seed = 0;
  bool agreement = true;
};

struct WordJob {
  std::string surface;
  WordForm form = WordForm::Noun;
  auto operator<=>(const WordJob&) const = default;
};

struct GeneratedSentence {
  std::uint32_t id = 0;
  std::string surface;
  WordForm form = WordForm::Noun;
  int sample = 0;
  std::string request_hash;
  std::string response;
  bool ok = false;  // a bracketed payload was found
  std::vector<std::string> tokens;
};

struct AgreementResponse {
  std::uint32_t id = 0;
  std::string singular, plural;
  agreement::Spec spec;
  int sample = 0;
  std::string request_hash;
  std::string response;
};

struct GenerationSet {
  std::vector<GeneratedSentence> sentences;
  std::vector<AgreementResponse> agreement;
};

/// One job per distinct (surface, form): every candidate in its own form and
/// every dictionary-valid inflection of it.
inline std::vector<WordJob> word_jobs(const std::vector<WordRecord>& candidates) {
  std::set<WordJob> jobs;
  for (const auto& c : candidates) {
    jobs.insert({c.surface, form_of(c.pos)});
    for (const auto& i : c.inflections) jobs.insert({i.surface, form_of(i.kind)});
  }
  return {jobs.begin(), jobs.end()};
}

/// (singular, plural) for every singular-noun candidate whose plural is in
/// the dictionary.
inline std::vector<std::pair<std::string, std::string>> agreement_nouns(const std::vector<WordRecord>& candidates) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : candidates) {
    if (c.pos != PosTag::Noun) continue;
    if (const auto p = c.inflection(InflectionKind::Plural)) out.emplace_back(c.surface, p->surface);
  }
  return out;
}

inline GenerationSet generate_sentences(const std::vector<WordRecord>& candidates, llm::Gateway& gw,
                                        const llm::TemplateSet& templates, const GenerationOptions& opt) {
  if (opt.sentences_per_word < 1) throw ConfigError("generation.sentences_per_word must be >= 1");
  const auto& gen = templates.get("generate_word");
  std::vector<llm::Call> calls;
  GenerationSet set;
  for (const auto& job : word_jobs(candidates)) {
    for (int k = 0; k < opt.sentences_per_word; ++k) {
      calls.push_back({&gen, {{"w", job.surface}, {"pos", std::string(pos_phrase(job.form))}},
                       opt.seed + static_cast<std::uint64_t>(k)});
      GeneratedSentence g;
      g.id = static_cast<std::uint32_t>(set.sentences.size());
      g.surface = job.surface;
      g.form = job.form;
      g.sample = k;
      set.sentences.push_back(std::move(g));
    }
  }
  if (opt.agreement) {
    for (const auto& [s, p] : agreement_nouns(candidates))
      for (const auto& spec : agreement::all_specs())
        for (int k = 0; k < opt.sentences_per_word; ++k) {
          calls.push_back({&templates.get(agreement::template_name(spec)), {{"singular", s}, {"plural", p}},
                           opt.seed + static_cast<std::uint64_t>(k)});
          AgreementResponse a;
          a.id = static_cast<std::uint32_t>(set.agreement.size());
          a.singular = s;
          a.plural = p;
          a.spec = spec;
          a.sample = k;
          set.agreement.push_back(std::move(a));
        }
  }
  auto results = gw.run(calls);
  std::size_t r = 0;
  for (auto& g : set.sentences) {
    auto& res = results[r++];
    g.request_hash = res.request_hash;
    g.response = std::move(res.text);
    try {
      g.tokens = text::tokenize(llm::extract_bracketed(g.response));
      g.ok = true;
    } catch (const MalformedResponse&) {
      g.ok = false;
    }
  }
  for (auto& a : set.agreement) {
    auto& res = results[r++];
    a.request_hash = res.request_hash;
    a.response = std::move(res.text);
  }
  return set;
}

// ---- serialization ---------------------------------------------------------

inline io::json to_json(const GeneratedSentence& g) {
  io::json j;
  j["id"] = g.id;
  j["surface"] = g.surface;
  j["form"] = to_string(g.form);
  j["sample"] = g.sample;
  j["request_hash"] = g.request_hash;
  j["response"] = g.response;
  j["ok"] = g.ok;
  j["tokens"] = g.tokens;
  return j;
}

inline GeneratedSentence generated_sentence_from_json(const io::json& j) {
  GeneratedSentence g;
  g.id = j.at("id").get<std::uint32_t>();
  g.surface = j.at("surface").get<std::string>();
  g.form = word_form_from_string(j.at("form").get<std::string>());
  g.sample = j.at("sample").get<int>();
  g.request_hash = j.at("request_hash").get<std::string>();
  g.response = j.at("response").get<std::string>();
  g.ok = j.at("ok").get<bool>();
  g.tokens = j.at("tokens").get<std::vector<std::string>>();
  return g;
}

inline io::json to_json(const AgreementResponse& a) {
  io::json j;
  j["id"] = a.id;
  j["singular"] = a.singular;
  j["plural"] = a.plural;
  j["agreement_kind"] = to_string(a.spec.kind);
  j["distance"] = to_string(a.spec.distance);
  j["sample"] = a.sample;
  j["request_hash"] = a.request_hash;
  j["response"] = a.response;
  return j;
}

inline AgreementResponse agreement_response_from_json(const io::json& j) {
  AgreementResponse a;
  a.id = j.at("id").get<std::uint32_t>();
  a.singular = j.at("singular").get<std::string>();
  a.plural = j.at("plural").get<std::string>();
  a.spec.kind = agreement_kind_from_string(j.at("agreement_kind").get<std::string>());
  a.spec.distance = distance_from_string(j.at("distance").get<std::string>());
  a.sample = j.at("sample").get<int>();
  a.request_hash = j.at("request_hash").get<std::string>();
  a.response = j.at("response").get<std::string>();
  return a;
}

inline void write_generation_set(const std::filesystem::path& dir, const GenerationSet& set) {
  io::write_jsonl(dir / "generations.jsonl", set.sentences, [](const auto& g) { return to_json(g); });
  io::write_jsonl(dir / "agreement_responses.jsonl", set.agreement, [](const auto& a) { return to_json(a); });
}

inline GenerationSet read_generation_set(const std::filesystem::path& dir) {
  GenerationSet set;
  io::for_each_jsonl(dir / "generations.jsonl",
                     [&](const io::json& j, std::size_t) { set.sentences.push_back(generated_sentence_from_json(j)); });
  io::for_each_jsonl(dir / "agreement_responses.jsonl",
                     [&](const io::json& j, std::size_t) { set.agreement.push_back(agreement_response_from_json(j)); });
  return set;
}

}  // namespace ltswap
