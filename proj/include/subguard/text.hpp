#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/model.hpp"

namespace subguard::text {

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}
/// Space or tab only: the characters that may pad a line without ending it.
constexpr bool is_blank(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
constexpr bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
constexpr bool is_alpha(char c) noexcept { return is_upper(c) || is_lower(c); }
constexpr bool is_alnum(char c) noexcept { return is_alpha(c) || is_digit(c); }
constexpr char to_lower(char c) noexcept { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }
constexpr char to_upper(char c) noexcept { return is_lower(c) ? static_cast<char>(c - 'a' + 'A') : c; }

std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0) noexcept;
std::string_view trim(std::string_view s) noexcept;
/// True when the line holds nothing but blank characters.
bool is_blank_line(std::string_view s) noexcept;

/// Length of the UTF-8 byte-order mark at the start of `s`, or 0.
std::size_t bom_length(std::string_view s) noexcept;

void append_utf8(std::string& out, char32_t cp);

/// Result of decoding bytes as UTF-8 with U+FFFD substitution.
struct Utf8Decoded {
  std::string text;
  /// Source offset of the first byte of every maximal invalid run.
  std::vector<std::size_t> invalid_runs;
};

Utf8Decoded decode_utf8_lossy(std::string_view bytes);

/// A line of source: [begin, end) excludes the '\n' and any trailing '\r's;
/// `next` is where the following line starts.
struct LineSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t next = 0;

  std::string_view in(std::string_view source) const noexcept {
    return source.substr(begin, end - begin);
  }
};

/// Splits from `from` to the end of `source`. Throws LimitExceeded when a
/// line (terminator excluded) is longer than `max_line_bytes`.
std::vector<LineSpan> split_lines(std::string_view source, std::size_t from,
                                  std::size_t max_line_bytes);

/// Maps byte offsets to 1-based line numbers.
class LineIndex {
 public:
  explicit LineIndex(std::string_view source);
  Location locate(std::size_t byte_offset) const noexcept;

 private:
  std::vector<std::size_t> line_starts_;
  std::size_t size_;
};

/// Parses an unsigned decimal of at most `max_digits` digits. Returns false
/// on empty input, non-digits or overflow of the digit budget.
bool parse_uint(std::string_view digits, std::uint64_t& out, std::size_t max_digits = 18) noexcept;

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace subguard::text
