#include "subguard/text.hpp"

#include <algorithm>
#include <cstdio>

#include "subguard/error.hpp"

namespace subguard::text {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) noexcept {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from) noexcept {
  if (needle.empty()) return from <= haystack.size() ? from : std::string_view::npos;
  if (haystack.size() < needle.size()) return std::string_view::npos;
  const char first = to_lower(needle.front());
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    if (to_lower(haystack[i]) == first && iequals(haystack.substr(i, needle.size()), needle)) {
      return i;
    }
  }
  return std::string_view::npos;
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_blank_line(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_blank(c); });
}

std::size_t bom_length(std::string_view s) noexcept {
  return s.substr(0, 3) == "\xEF\xBB\xBF" ? 3 : 0;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

namespace {

// Length of the well-formed UTF-8 sequence starting at s[i], or 0.
std::size_t valid_sequence_length(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len;
  unsigned char lo = 0x80, hi = 0xBF;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;  // no surrogates
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  const auto b1 = static_cast<unsigned char>(s[i + 1]);
  if (b1 < lo || b1 > hi) return 0;
  for (std::size_t k = 2; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if (b < 0x80 || b > 0xBF) return 0;
  }
  return len;
}

}  // namespace

Utf8Decoded decode_utf8_lossy(std::string_view bytes) {
  Utf8Decoded out;
  out.text.reserve(bytes.size());
  bool in_invalid_run = false;
  for (std::size_t i = 0; i < bytes.size();) {
    const std::size_t len = valid_sequence_length(bytes, i);
    if (len == 0) {
      if (!in_invalid_run) {
        out.invalid_runs.push_back(i);
        out.text += "\xEF\xBF\xBD";
        in_invalid_run = true;
      }
      ++i;
      continue;
    }
    in_invalid_run = false;
    out.text.append(bytes.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<LineSpan> split_lines(std::string_view source, std::size_t from,
                                  std::size_t max_line_bytes) {
  std::vector<LineSpan> lines;
  std::size_t pos = std::min(from, source.size());
  while (pos < source.size()) {
    std::size_t nl = source.find('\n', pos);
    const std::size_t stop = nl == std::string_view::npos ? source.size() : nl;
    std::size_t end = stop;
    while (end > pos && source[end - 1] == '\r') --end;
    if (end - pos > max_line_bytes) {
      throw LimitExceeded("line of " + std::to_string(end - pos) + " bytes exceeds max_line_bytes " +
                          std::to_string(max_line_bytes));
    }
    const std::size_t next = nl == std::string_view::npos ? source.size() : nl + 1;
    lines.push_back(LineSpan{pos, end, next});
    pos = next;
  }
  return lines;
}

LineIndex::LineIndex(std::string_view source) : size_(source.size()) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\n') line_starts_.push_back(i + 1);
  }
}

Location LineIndex::locate(std::size_t byte_offset) const noexcept {
  const std::size_t off = std::min(byte_offset, size_);
  const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), off);
  return Location{static_cast<std::size_t>(it - line_starts_.begin()), off};
}

bool parse_uint(std::string_view digits, std::uint64_t& out, std::size_t max_digits) noexcept {
  if (digits.empty() || digits.size() > max_digits) return false;
  std::uint64_t v = 0;
  for (char c : digits) {
    if (!is_digit(c)) return false;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  out = v;
  return true;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace subguard::text
