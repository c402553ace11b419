#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "ltswap/error.hpp"
#include "ltswap/text.hpp"

namespace ltswap::llm {

enum class Choice { A, B, Undecided };

inline std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::A: return "A";
    case Choice::B: return "B";
    case Choice::Undecided: return "UNDECIDED";
  }
  return "?";
}

inline Choice choice_from_string(std::string_view s) {
  if (s == "A") return Choice::A;
  if (s == "B") return Choice::B;
  if (s == "UNDECIDED") return Choice::Undecided;
  throw InputError("unknown choice '" + std::string(s) + "'");
}

struct ChoiceAnswer {
  Choice value = Choice::Undecided;
  std::string raw;
};

/// The last "[A]" or "[B]" in the response (inner whitespace allowed).
/// Anything else is UNDECIDED.
inline ChoiceAnswer parse_choice(std::string raw) {
  static const std::regex re(R"(\[\s*([AB])\s*\])");
  ChoiceAnswer a;
  for (std::sregex_iterator it(raw.begin(), raw.end(), re), end; it != end; ++it)
    a.value = (*it)[1].str() == "A" ? Choice::A : Choice::B;
  a.raw = std::move(raw);
  return a;
}

/// Contents of every non-empty [...] group, in order.
inline std::vector<std::string> bracket_groups(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    const auto open = raw.find('[', i);
    if (open == std::string_view::npos) break;
    const auto close = raw.find(']', open + 1);
    if (close == std::string_view::npos) break;
    const auto inner = raw.substr(open + 1, close - open - 1);
    // Nested opener: restart from the innermost one.
    const auto nested = inner.rfind('[');
    auto payload = text::trim(nested == std::string_view::npos ? inner : inner.substr(nested + 1));
    if (!payload.empty()) out.push_back(std::move(payload));
    i = close + 1;
  }
  return out;
}

/// Bracketed payload of a free-text answer. Several groups are joined with a
/// space. Throws MalformedResponse (carrying the raw text) when there is
/// none.
inline std::string extract_bracketed(std::string_view raw) {
  const auto groups = bracket_groups(raw);
  if (groups.empty()) throw MalformedResponse("no bracketed payload in response", std::string(raw));
  return text::join(groups);
}

/// Splits a token list after each sentence-final token. A trailing piece
/// without final punctuation is kept.
inline std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  for (const auto& t : tokens) {
    cur.push_back(t);
    if (text::is_sentence_final(t)) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace ltswap::llm
