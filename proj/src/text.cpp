#include "fincat/text.hpp"

#include <algorithm>

#include "fincat/error.hpp"
#include "fincat/unicode.hpp"

namespace fincat {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const auto cps = unicode::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (unicode::is_whitespace(cps[i].value)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < cps.size() && !unicode::is_whitespace(cps[i].value)) ++i;
    Token tok;
    tok.char_start = start;
    tok.char_end = i;
    tok.byte_start = cps[start].byte_offset;
    tok.byte_end = cps[i - 1].byte_offset + cps[i - 1].byte_length;
    tok.surface = std::string(text.substr(tok.byte_start, tok.byte_end - tok.byte_start));
    tok.word_index = tokens.size();
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

bool contains_digit(std::string_view surface, DigitRule rule) {
  if (rule == DigitRule::kAscii) {
    return std::any_of(surface.begin(), surface.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  }
  const auto cps = unicode::decode(surface);
  return std::any_of(cps.begin(), cps.end(), [](const unicode::CodePoint& cp) {
    return unicode::is_decimal_digit(cp.value);
  });
}

std::vector<NumeralMention> find_numerals(const std::vector<Token>& tokens,
                                          DigitRule rule) {
  std::vector<NumeralMention> mentions;
  for (const auto& tok : tokens) {
    if (contains_digit(tok.surface, rule)) {
      mentions.push_back({tok, mentions.size()});
    }
  }
  return mentions;
}

ContextWindow context_window(const std::vector<Token>& tokens,
                             const NumeralMention& mention, int k) {
  if (k < 0) throw InvalidArgument("window half-width must be >= 0");
  const std::size_t idx = mention.token.word_index;
  if (idx >= tokens.size() || tokens[idx] != mention.token) {
    throw InvalidArgument("mention '" + mention.token.surface +
                          "' is not among the given tokens");
  }
  const auto half = static_cast<std::size_t>(k);
  const std::size_t first = idx >= half ? idx - half : 0;
  const std::size_t last = std::min(tokens.size() - 1, idx + half);

  ContextWindow window;
  window.k = k;
  window.numeral_pos = idx - first;
  window.words.assign(tokens.begin() + static_cast<std::ptrdiff_t>(first),
                      tokens.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return window;
}

}  // namespace fincat
