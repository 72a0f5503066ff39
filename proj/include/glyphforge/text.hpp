#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the renderer, the tokenizer and the metrics.
namespace glyphforge::text {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
// Decodes the code point starting at byte `i` and advances `i` past it.
char32_t decode_one(std::string_view s, std::size_t& i);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view s);

bool is_space(char32_t cp);
char32_t to_lower(char32_t cp);

// Collapses whitespace runs to one ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string trim(std::string_view s);

// A double-quoted span of a prompt, quotes excluded. Offsets are byte offsets.
struct QuotedSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Scans ASCII "..." and typographic “...” pairs. Throws ValidationError naming
// the code point position of an unmatched quote.
std::vector<QuotedSpan> find_quoted_spans(std::string_view s);

}  // namespace glyphforge::text
