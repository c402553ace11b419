#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ltswap::text {

enum class CharClass { Letter, Space, Symbol };

namespace detail {

// Decodes one UTF-8 sequence starting at `pos`. Invalid bytes decode as
// themselves with length 1 so that the text round-trips byte for byte.
inline std::uint32_t decode_utf8(std::string_view s, std::size_t pos, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      len = 2;
      return ((b0 & 0x1Fu) << 6) | static_cast<std::uint32_t>(c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      len = 3;
      return ((b0 & 0x0Fu) << 12) | (static_cast<std::uint32_t>(c1) << 6) |
             static_cast<std::uint32_t>(c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      len = 4;
      return ((b0 & 0x07u) << 18) | (static_cast<std::uint32_t>(c1) << 12) |
             (static_cast<std::uint32_t>(c2) << 6) | static_cast<std::uint32_t>(c3);
    }
  }
  len = 1;
  return b0;
}

}  // namespace detail

inline CharClass classify(std::uint32_t cp) {
  if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f' ||
      cp == 0xA0 || cp == 0x2028 || cp == 0x2029 || (cp >= 0x2000 && cp <= 0x200A))
    return CharClass::Space;
  if (cp < 0x80) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return CharClass::Letter;
    return CharClass::Symbol;
  }
  // Latin-1 punctuation, multiplication/division signs, general punctuation
  // (curly quotes, dashes, ellipsis), currency and arrows count as symbols.
  if ((cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) return CharClass::Symbol;
  if (cp >= 0x2010 && cp <= 0x2BFF) return CharClass::Symbol;
  if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Symbol;
  return CharClass::Letter;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline bool is_capitalized(std::string_view s) { return !s.empty() && s[0] >= 'A' && s[0] <= 'Z'; }

/// Surrounds every symbol (digit, punctuation, apostrophe, ...) with single
/// spaces. Letters and existing whitespace are copied unchanged, and a space
/// is only inserted where the neighbouring character is not already
/// whitespace, which makes the function idempotent.
inline std::string pad_symbols(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  CharClass prev = CharClass::Space;
  bool at_start = true;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    const auto cls = classify(detail::decode_utf8(s, i, len));
    const bool boundary = cls == CharClass::Symbol || prev == CharClass::Symbol;
    if (!at_start && boundary && cls != CharClass::Space && prev != CharClass::Space)
      out.push_back(' ');
    out.append(s.substr(i, len));
    prev = cls;
    at_start = false;
    i += len;
  }
  return out;
}

/// Lowercase then pad: the normalization applied to every corpus and
/// generated sentence before tokenization.
inline std::string normalize(std::string_view s) { return pad_symbols(to_lower(s)); }

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

/// Maximal runs of non-whitespace characters, with byte offsets.
inline std::vector<Span> whitespace_spans(std::string_view s) {
  std::vector<Span> spans;
  std::size_t i = 0;
  bool in_token = false;
  std::size_t start = 0;
  while (i < s.size()) {
    std::size_t len = 1;
    const bool space = classify(detail::decode_utf8(s, i, len)) == CharClass::Space;
    if (space && in_token) {
      spans.push_back({start, i});
      in_token = false;
    } else if (!space && !in_token) {
      start = i;
      in_token = true;
    }
    i += len;
  }
  if (in_token) spans.push_back({start, s.size()});
  return spans;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& sp : whitespace_spans(s)) out.emplace_back(s.substr(sp.begin, sp.end - sp.begin));
  return out;
}

/// Normalized tokens of a free-form sentence (as produced by an LLM).
inline std::vector<std::string> tokenize(std::string_view s) { return split_ws(normalize(s)); }

inline std::string join(std::span<const std::string> tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

inline bool has_letter(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    if (classify(detail::decode_utf8(s, i, len)) == CharClass::Letter) return true;
    i += len;
  }
  return false;
}

/// A token made only of symbols (punctuation, digits). Such tokens are never
/// words for counting, tagging or vocabulary checks.
inline bool is_symbol_token(std::string_view s) { return !has_letter(s); }

inline bool is_sentence_final(std::string_view tok) { return tok == "." || tok == "!" || tok == "?"; }

/// First maximal run of letters in a raw token ("dog." -> "dog",
/// "Jeremy's" -> "Jeremy"). Empty when the token has no letters.
inline std::string letter_core(std::string_view s) {
  std::size_t begin = std::string_view::npos, end = s.size();
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    const bool letter = classify(detail::decode_utf8(s, i, len)) == CharClass::Letter;
    if (letter && begin == std::string_view::npos) begin = i;
    if (!letter && begin != std::string_view::npos) {
      end = i;
      break;
    }
    i += len;
  }
  if (begin == std::string_view::npos) return {};
  return std::string(s.substr(begin, end - begin));
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace ltswap::text
