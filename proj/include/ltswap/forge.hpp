#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ltswap/agreement.hpp"
#include "ltswap/bins.hpp"
#include "ltswap/corpus.hpp"
#include "ltswap/generation.hpp"
#include "ltswap/quadruplet.hpp"

namespace ltswap {

struct ForgeOptions {
  std::uint64_t seed = 0;
  bool oov_filter = true;
};

struct ForgeResult {
  std::vector<Quadruplet> quadruplets;
  std::vector<io::json> discards;

  std::size_t count(Subtask s) const {
    return static_cast<std::size_t>(
        std::count_if(quadruplets.begin(), quadruplets.end(), [&](const Quadruplet& q) { return q.subtask == s; }));
  }
};

inline std::string quadruplet_id(Subtask s, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", std::string(short_name(s)).c_str(), n);
  return buf;
}

namespace detail {

inline io::json discard_record(std::string_view stage, std::string_view reason, io::json detail) {
  io::json j;
  j["stage"] = stage;
  j["reason"] = reason;
  j["detail"] = std::move(detail);
  return j;
}

}  // namespace detail

/// Screens generated sentences, pairs them into WordSwap and InflectionSwap
/// quadruplets, and turns agreement answers into AgreementSwap ones. Ids are
/// assigned per subtask in output order.
inline ForgeResult forge(const GenerationSet& gen, const std::vector<WordRecord>& candidates, const VocabTable& vocab,
                         const BinScheme& bins, const ForgeOptions& opt = {}) {
  ForgeResult out;

  // Usable sentences per (surface, form), in id order.
  std::map<WordJob, std::vector<std::uint32_t>> usable;
  for (const auto& g : gen.sentences) {
    std::string_view reason;
    if (!g.ok) reason = discard::kUnextractable;
    else if (occurrences(g.tokens, g.surface) == 0) reason = discard::kTargetMissing;
    else if (occurrences(g.tokens, g.surface) > 1) reason = discard::kTargetDuplicated;
    else if (opt.oov_filter && !oov_filter(g.tokens, vocab, {g.surface})) reason = discard::kOov;
    if (!reason.empty()) {
      out.discards.push_back(detail::discard_record("sentence", reason, {{"sentence", g.id}, {"surface", g.surface}}));
      continue;
    }
    usable[{g.surface, g.form}].push_back(g.id);
  }
  auto sentence = [&](std::uint32_t id) -> const GeneratedSentence& { return gen.sentences.at(id); };
  auto usable_for = [&](const std::string& w, WordForm f) -> const std::vector<std::uint32_t>& {
    static const std::vector<std::uint32_t> none;
    const auto it = usable.find({w, f});
    return it == usable.end() ? none : it->second;
  };

  std::vector<Quadruplet> ws, is, as;
  auto emit = [&](std::vector<Quadruplet>& dst, Subtask st, std::uint32_t a, std::uint32_t b, FrequencyBin bin,
                  PosTag pos) {
    const auto& sa = sentence(a);
    const auto& sb = sentence(b);
    auto sw = swap(sa.tokens, sa.surface, sb.tokens, sb.surface);
    if (!sw.quad) {
      out.discards.push_back(detail::discard_record("pair", sw.reason,
                                                    {{"subtask", to_string(st)}, {"sentences", {a, b}}}));
      return;
    }
    auto& q = *sw.quad;
    q.subtask = st;
    q.bin = bin;
    q.pos = pos;
    q.gen_hashes = {sa.request_hash, sb.request_hash};
    q.sentence_ids = {a, b};
    dst.push_back(std::move(q));
  };

  // WordSwap
  std::map<std::string, const WordRecord*> by_surface;
  for (const auto& c : candidates) by_surface[c.surface] = &c;
  std::vector<PairItem> items;
  for (const auto& c : candidates)
    for (auto id : usable_for(c.surface, form_of(c.pos))) items.push_back({id, c.surface});
  std::vector<PairItem> unpaired;
  const auto groups =
      pair_wordswap(items, [&](const std::string& w) -> const WordRecord& { return *by_surface.at(w); }, opt.seed,
                    &unpaired);
  for (const auto& [key, pairs] : groups)
    for (const auto& [a, b] : pairs) emit(ws, Subtask::WordSwap, a.sentence_id, b.sentence_id, bins.bin_of(key.bin), key.pos);
  for (const auto& u : unpaired)
    out.discards.push_back(detail::discard_record("pair", discard::kUnpaired,
                                                  {{"subtask", "WORDSWAP"}, {"sentence", u.sentence_id}}));

  // InflectionSwap
  for (const auto& c : candidates) {
    if (c.inflections.empty()) continue;
    std::vector<FamilyMember> members{{c.surface, c.count, usable_for(c.surface, form_of(c.pos))}};
    for (const auto& i : c.inflections) members.push_back({i.surface, i.count, usable_for(i.surface, form_of(i.kind))});
    for (const auto& p : pair_family(members)) {
      const auto bin = bins.bin_of(std::min(members[p.a].count, members[p.b].count));
      emit(is, Subtask::InflectionSwap, p.sa, p.sb, bin, c.pos);
    }
  }

  // AgreementSwap
  for (const auto& a : gen.agreement) {
    auto b = agreement::build(a.response, a.singular, a.plural, a.spec);
    if (b.quad && opt.oov_filter &&
        (!oov_filter(b.quad->s1, vocab, {a.singular}) || !oov_filter(b.quad->s2, vocab, {a.plural}))) {
      b.quad.reset();
      b.reason = discard::kOov;
    }
    if (!b.quad) {
      out.discards.push_back(detail::discard_record(
          "agreement", b.reason, {{"response", a.id}, {"singular", a.singular}, {"detail", b.detail}}));
      continue;
    }
    auto& q = *b.quad;
    q.bin = bins.bin_of(std::min(vocab.count(a.singular), vocab.count(a.plural)));
    q.gen_hashes = {a.request_hash};
    q.sentence_ids = {};
    as.push_back(std::move(q));
  }

  for (auto* group : {&ws, &is, &as})
    for (std::size_t k = 0; k < group->size(); ++k) {
      auto& q = (*group)[k];
      q.id = quadruplet_id(q.subtask, k + 1);
      out.quadruplets.push_back(std::move(q));
    }
  return out;
}

}  // namespace ltswap
