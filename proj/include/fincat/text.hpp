// Whitespace tokenization, numeral detection and context windows.
//
// Offsets are counted in Unicode code points, end-exclusive. Byte offsets
// into the UTF-8 source are kept alongside for slicing.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fincat {

inline constexpr int kDefaultWindow = 6;

struct Token {
  std::string surface;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::size_t word_index = 0;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct NumeralMention {
  Token token;
  std::size_t mention_id = 0;

  friend bool operator==(const NumeralMention&, const NumeralMention&) = default;
};

/// The numeral plus up to k words each side. Words are copies so the window
/// outlives the token list it was cut from.
struct ContextWindow {
  std::vector<Token> words;
  std::size_t numeral_pos = 0;
  int k = kDefaultWindow;

  const Token& numeral() const { return words.at(numeral_pos); }

  friend bool operator==(const ContextWindow&, const ContextWindow&) = default;
};

enum class DigitRule {
  kUnicode,  // general category Nd
  kAscii,    // 0-9 only
};

/// Maximal runs of non-whitespace, in order.
std::vector<Token> tokenize(std::string_view text);

bool contains_digit(std::string_view surface, DigitRule rule = DigitRule::kUnicode);

/// Every token carrying at least one decimal digit, numbered from 0.
std::vector<NumeralMention> find_numerals(const std::vector<Token>& tokens,
                                          DigitRule rule = DigitRule::kUnicode);

/// Throws InvalidArgument when the mention's token is not in `tokens` or
/// k is negative.
ContextWindow context_window(const std::vector<Token>& tokens,
                             const NumeralMention& mention,
                             int k = kDefaultWindow);

}  // namespace fincat
