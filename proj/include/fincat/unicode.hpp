// UTF-8 decoding and the two character classes the extractor needs.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fincat::unicode {

/// One decoded code point and where its bytes live in the source string.
struct CodePoint {
  char32_t value;
  std::size_t byte_offset;
  std::size_t byte_length;
};

/// Decodes UTF-8. Malformed sequences decode as U+FFFD, one per offending
/// byte, so every input byte belongs to exactly one code point.
std::vector<CodePoint> decode(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

/// Whitespace as Python's str.split() sees it: the Unicode White_Space
/// property plus the ASCII information separators U+001C..U+001F.
bool is_whitespace(char32_t cp);

/// Unicode general category Nd (15.0).
bool is_decimal_digit(char32_t cp);

inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

/// Number of code points in a UTF-8 string.
std::size_t length(std::string_view text);

}  // namespace fincat::unicode
