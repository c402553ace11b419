#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ltswap/error.hpp"
#include "ltswap/io.hpp"
#include "ltswap/text.hpp"

namespace ltswap {

namespace fs = std::filesystem;

struct RawDocument {
  std::string source_id;
  std::string text;
};

using RawCorpus = std::vector<RawDocument>;

/// One segmented sentence. `tokens` are normalized (lowercased, symbols
/// padded); `raw_tokens` are the whitespace tokens as they appear in the
/// source, which the tagger sees. `origin[i]` is the raw token that produced
/// `tokens[i]`.
struct SentenceRef {
  std::uint32_t id = 0;
  std::uint32_t doc = 0;
  text::Span char_span;
  std::vector<std::string> tokens;
  std::vector<std::string> raw_tokens;
  std::vector<std::uint32_t> origin;

  friend bool operator==(const SentenceRef&, const SentenceRef&) = default;
};

namespace detail {

inline void flush_sentence(SentenceRef& cur, std::vector<SentenceRef>& out) {
  if (!cur.tokens.empty()) out.push_back(std::move(cur));
  const auto doc = cur.doc;
  cur = SentenceRef{};
  cur.doc = doc;
}

// Shared by segment() and ingest(): boundaries fall after a sentence-final
// token or at the end of a line.
inline std::vector<SentenceRef> segment_document(std::string_view doc, std::uint32_t doc_index,
                                                 bool normalize) {
  std::vector<SentenceRef> out;
  SentenceRef cur;
  cur.doc = doc_index;
  std::size_t line_start = 0;
  while (line_start <= doc.size()) {
    std::size_t nl = doc.find('\n', line_start);
    if (nl == std::string_view::npos) nl = doc.size();
    const auto line = doc.substr(line_start, nl - line_start);
    for (const auto& sp : text::whitespace_spans(line)) {
      const auto raw = line.substr(sp.begin, sp.end - sp.begin);
      std::vector<std::string> subs =
          normalize ? text::split_ws(text::normalize(raw)) : std::vector<std::string>{std::string(raw)};
      bool raw_pushed = false;
      for (auto& tok : subs) {
        if (!raw_pushed) {
          if (cur.tokens.empty()) cur.char_span.begin = line_start + sp.begin;
          cur.raw_tokens.emplace_back(raw);
          cur.char_span.end = line_start + sp.end;
          raw_pushed = true;
        }
        cur.origin.push_back(static_cast<std::uint32_t>(cur.raw_tokens.size() - 1));
        const bool final = text::is_sentence_final(tok);
        cur.tokens.push_back(std::move(tok));
        if (final) {
          flush_sentence(cur, out);
          raw_pushed = false;
        }
      }
    }
    flush_sentence(cur, out);
    if (nl == doc.size()) break;
    line_start = nl + 1;
  }
  return out;
}

}  // namespace detail

/// Splits already normalized text into sentences. Tokens are maximal
/// non-whitespace runs; a sentence ends after ". ! ?" or at a newline.
inline std::vector<SentenceRef> segment(std::string_view normalized_text) {
  auto out = detail::segment_document(normalized_text, 0, false);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<std::uint32_t>(i);
  return out;
}

struct Corpus {
  std::vector<std::string> source_ids;
  std::vector<SentenceRef> sentences;  // sentences[i].id == i

  const SentenceRef& sentence(std::uint32_t id) const { return sentences.at(id); }
};

/// Segments raw documents, keeping both the raw-cased token stream and the
/// normalized one. Documents are processed concurrently when `parallel` is
/// set; sentence ids are assigned afterwards in document order, so the result
/// does not depend on scheduling.
inline Corpus ingest(const RawCorpus& docs, bool parallel = false) {
  if (docs.empty()) throw InputError("empty corpus");
  std::vector<std::vector<SentenceRef>> per_doc(docs.size());
  if (parallel && docs.size() > 1) {
    std::vector<std::future<std::vector<SentenceRef>>> jobs;
    jobs.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d)
      jobs.push_back(std::async(std::launch::async, [&docs, d] {
        return detail::segment_document(docs[d].text, static_cast<std::uint32_t>(d), true);
      }));
    for (std::size_t d = 0; d < docs.size(); ++d) per_doc[d] = jobs[d].get();
  } else {
    for (std::size_t d = 0; d < docs.size(); ++d)
      per_doc[d] = detail::segment_document(docs[d].text, static_cast<std::uint32_t>(d), true);
  }
  Corpus c;
  for (const auto& d : docs) c.source_ids.push_back(d.source_id);
  for (auto& chunk : per_doc)
    for (auto& s : chunk) {
      s.id = static_cast<std::uint32_t>(c.sentences.size());
      c.sentences.push_back(std::move(s));
    }
  return c;
}

/// Newline-delimited English word list. Lines are trimmed and lowercased;
/// blank lines are ignored.
class Dictionary {
 public:
  Dictionary() = default;
  template <class Range>
  explicit Dictionary(const Range& words) {
    for (const auto& w : words) insert(w);
  }

  static Dictionary load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("dictionary_path: cannot read '" + path.string() + "'");
    Dictionary d;
    std::string line;
    while (std::getline(in, line)) {
      auto w = text::to_lower(text::trim(line));
      if (!w.empty()) d.words_.insert(std::move(w));
    }
    return d;
  }

  void insert(std::string_view w) { words_.insert(text::to_lower(w)); }
  bool contains(std::string_view w) const { return words_.count(std::string(w)) != 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Token counts. `all_counts` covers every token and sums to `total_tokens`;
/// `entries` is the dictionary-valid subset used for candidate selection.
struct VocabTable {
  std::map<std::string, std::uint64_t> entries;
  std::map<std::string, std::uint64_t> all_counts;
  std::uint64_t total_tokens = 0;

  /// Corpus count of any token (0 when unseen).
  std::uint64_t count(std::string_view w) const {
    const auto it = all_counts.find(std::string(w));
    return it == all_counts.end() ? 0 : it->second;
  }
  bool in_corpus(std::string_view w) const { return count(w) > 0; }

  /// Associative, order-independent merge of two shards.
  VocabTable& merge(const VocabTable& other) {
    for (const auto& [w, c] : other.entries) entries[w] += c;
    for (const auto& [w, c] : other.all_counts) all_counts[w] += c;
    total_tokens += other.total_tokens;
    return *this;
  }

  friend bool operator==(const VocabTable&, const VocabTable&) = default;
};

inline VocabTable build_vocab(std::span<const SentenceRef> sentences, const Dictionary& dictionary) {
  VocabTable v;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) {
      ++v.all_counts[t];
      ++v.total_tokens;
    }
  for (const auto& [w, c] : v.all_counts)
    if (dictionary.contains(w)) v.entries.emplace(w, c);
  return v;
}

/// Word -> strictly increasing sentence ids. Symbol-only tokens are not
/// indexed.
struct SentenceIndex {
  std::map<std::string, std::vector<std::uint32_t>, std::less<>> postings;

  std::span<const std::uint32_t> lookup(std::string_view word) const {
    const auto it = postings.find(word);
    if (it == postings.end()) return {};
    return it->second;
  }

  /// Merge an index built over sentences whose ids were already offset into
  /// a disjoint range.
  SentenceIndex& merge(const SentenceIndex& other) {
    for (const auto& [w, ids] : other.postings) {
      auto& dst = postings[w];
      std::vector<std::uint32_t> merged;
      merged.reserve(dst.size() + ids.size());
      std::set_union(dst.begin(), dst.end(), ids.begin(), ids.end(), std::back_inserter(merged));
      dst = std::move(merged);
    }
    return *this;
  }

  friend bool operator==(const SentenceIndex&, const SentenceIndex&) = default;
};

inline SentenceIndex build_index(std::span<const SentenceRef> sentences) {
  SentenceIndex idx;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) {
      if (text::is_symbol_token(t)) continue;
      auto& ids = idx.postings[t];
      if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
    }
  return idx;
}

/// All sentences whose tokens contain the exact surface `word`, in id order.
/// Unknown words give an empty list.
inline std::vector<const SentenceRef*> sentences_with(std::string_view word, const SentenceIndex& index,
                                                      const Corpus& corpus) {
  std::vector<const SentenceRef*> out;
  for (auto id : index.lookup(word)) out.push_back(&corpus.sentence(id));
  return out;
}

// ---- serialization -------------------------------------------------------

inline std::string vocab_jsonl(const std::map<std::string, std::uint64_t>& counts) {
  std::string out;
  for (const auto& [w, c] : counts) {
    io::json j;
    j["word"] = w;
    j["count"] = c;
    out += io::dump_line(j) + "\n";
  }
  return out;
}

inline std::map<std::string, std::uint64_t> read_counts_jsonl(const fs::path& path) {
  std::map<std::string, std::uint64_t> out;
  io::for_each_jsonl(path, [&](const io::json& j, std::size_t) {
    out[j.at("word").get<std::string>()] = j.at("count").get<std::uint64_t>();
  });
  return out;
}

inline io::json to_json(const SentenceRef& s) {
  io::json j;
  j["id"] = s.id;
  j["tokens"] = s.tokens;
  j["doc"] = s.doc;
  j["span"] = {s.char_span.begin, s.char_span.end};
  j["raw"] = s.raw_tokens;
  j["origin"] = s.origin;
  return j;
}

inline SentenceRef sentence_from_json(const io::json& j) {
  SentenceRef s;
  s.id = j.at("id").get<std::uint32_t>();
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  if (j.contains("doc")) s.doc = j["doc"].get<std::uint32_t>();
  if (j.contains("span")) s.char_span = {j["span"][0].get<std::size_t>(), j["span"][1].get<std::size_t>()};
  if (j.contains("raw")) {
    s.raw_tokens = j["raw"].get<std::vector<std::string>>();
    s.origin = j.at("origin").get<std::vector<std::uint32_t>>();
  } else {
    s.raw_tokens = s.tokens;
    for (std::uint32_t i = 0; i < s.tokens.size(); ++i) s.origin.push_back(i);
  }
  return s;
}

inline Corpus read_sentences(const fs::path& path) {
  Corpus c;
  io::for_each_jsonl(path, [&](const io::json& j, std::size_t line) {
    auto s = sentence_from_json(j);
    if (s.id != c.sentences.size()) throw InputError("sentence ids must be dense and ordered", line);
    c.sentences.push_back(std::move(s));
  });
  return c;
}

inline VocabTable read_vocab(const fs::path& vocab_path, const fs::path& token_counts_path) {
  VocabTable v;
  v.entries = read_counts_jsonl(vocab_path);
  v.all_counts = read_counts_jsonl(token_counts_path);
  for (const auto& [w, c] : v.all_counts) v.total_tokens += c;
  return v;
}

/// Binary postings file: magic "LTSI", version, then sorted (word, ids).
inline std::string serialize_index(const SentenceIndex& idx) {
  std::string out = "LTSI";
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  put32(1);
  put32(static_cast<std::uint32_t>(idx.postings.size()));
  for (const auto& [w, ids] : idx.postings) {
    put32(static_cast<std::uint32_t>(w.size()));
    out += w;
    put32(static_cast<std::uint32_t>(ids.size()));
    for (auto id : ids) put32(id);
  }
  return out;
}

inline SentenceIndex deserialize_index(std::string_view bytes) {
  std::size_t pos = 0;
  auto get32 = [&]() -> std::uint32_t {
    if (pos + 4 > bytes.size()) throw InputError("index.bin: truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  };
  if (bytes.substr(0, 4) != "LTSI") throw InputError("index.bin: bad magic");
  pos = 4;
  if (get32() != 1) throw InputError("index.bin: unsupported version");
  SentenceIndex idx;
  const auto n = get32();
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto len = get32();
    if (pos + len > bytes.size()) throw InputError("index.bin: truncated");
    std::string w(bytes.substr(pos, len));
    pos += len;
    auto& ids = idx.postings[w];
    const auto m = get32();
    ids.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) ids.push_back(get32());
  }
  return idx;
}

inline void write_corpus(const fs::path& dir, const Corpus& corpus, const VocabTable& vocab) {
  std::string sentences;
  for (const auto& s : corpus.sentences) sentences += io::dump_line(to_json(s)) + "\n";
  io::write_atomic(dir / "sentences.jsonl", sentences);
  io::write_atomic(dir / "vocab.jsonl", vocab_jsonl(vocab.entries));
  io::write_atomic(dir / "token_counts.jsonl", vocab_jsonl(vocab.all_counts));
  io::write_atomic(dir / "index.bin", serialize_index(build_index(corpus.sentences)));
}

}  // namespace ltswap
