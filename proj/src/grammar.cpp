#include "grammar.hpp"

#include "subguard/cursor.hpp"
#include "subguard/text.hpp"

namespace subguard::grammar {

namespace {

// Reads up to `max` digits; false when none are present.
bool read_digits(ByteCursor& cur, std::size_t max, std::uint64_t& value, std::size_t& count) {
  const std::size_t begin = cur.pos();
  while (!cur.at_end() && text::is_digit(cur.peek()) && cur.pos() - begin < max) cur.advance();
  count = cur.pos() - begin;
  if (count == 0) return false;
  // A longer digit run than allowed is a different token, not a prefix.
  if (!cur.at_end() && text::is_digit(cur.peek())) return false;
  return text::parse_uint(cur.slice(begin, cur.pos()), value, max);
}

void skip_blanks(ByteCursor& cur) {
  while (!cur.at_end() && (cur.peek() == ' ' || cur.peek() == '\t')) cur.advance();
}

std::optional<TimeStamp> read_srt_time(ByteCursor& cur) {
  std::uint64_t h = 0, m = 0, s = 0, ms = 0;
  std::size_t n = 0;
  if (!read_digits(cur, 6, h, n)) return std::nullopt;
  if (cur.peek_or_nul() != ':') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, 2, m, n) || m >= 60) return std::nullopt;
  if (cur.peek_or_nul() != ':') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, 2, s, n) || s >= 60) return std::nullopt;
  const char sep = cur.peek_or_nul();
  if (sep != ',' && sep != '.') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, 3, ms, n)) return std::nullopt;
  while (n < 3) {
    ms *= 10;
    ++n;
  }
  const auto total = static_cast<std::int64_t>(((h * 60 + m) * 60 + s) * 1000 + ms);
  if (total > TimeStamp::kMaxMillis) return std::nullopt;
  return TimeStamp(total);
}

}  // namespace

std::optional<TimeRange> parse_srt_timing(std::string_view line) {
  ByteCursor cur(line);
  skip_blanks(cur);
  auto start = read_srt_time(cur);
  if (!start) return std::nullopt;
  skip_blanks(cur);
  if (cur.starts_with("-->")) {
    cur.advance(3);
  } else if (cur.starts_with("->")) {
    cur.advance(2);
  } else {
    return std::nullopt;
  }
  skip_blanks(cur);
  auto end = read_srt_time(cur);
  if (!end) return std::nullopt;
  if (!cur.at_end() && cur.peek() != ' ' && cur.peek() != '\t') return std::nullopt;
  return TimeRange{*start, *end};
}

bool is_index_line(std::string_view line) {
  const auto t = text::trim(line);
  std::uint64_t v = 0;
  return text::parse_uint(t, v, 18);
}

std::optional<JssTime> parse_jss_time(std::string_view s, std::uint64_t units_per_second,
                                      std::size_t max_fraction_digits) {
  if (units_per_second == 0) return std::nullopt;
  ByteCursor cur(s);
  std::uint64_t h = 0, m = 0, sec = 0, ff = 0;
  std::size_t n = 0;
  if (!read_digits(cur, 6, h, n)) return std::nullopt;
  if (cur.peek_or_nul() != ':') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, 2, m, n) || m >= 60) return std::nullopt;
  if (cur.peek_or_nul() != ':') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, 2, sec, n) || sec >= 60) return std::nullopt;
  if (cur.peek_or_nul() != '.') return std::nullopt;
  cur.advance();
  if (!read_digits(cur, max_fraction_digits, ff, n)) return std::nullopt;
  const std::uint64_t frac_ms = (ff * 1000 + units_per_second / 2) / units_per_second;
  const auto total = static_cast<std::int64_t>(((h * 60 + m) * 60 + sec) * 1000 + frac_ms);
  if (total > TimeStamp::kMaxMillis) return std::nullopt;
  return JssTime{total, cur.pos()};
}

bool is_jss_timing_line(std::string_view line) {
  ByteCursor cur(line);
  skip_blanks(cur);
  auto first = parse_jss_time(cur.rest(), 100, 2);
  if (!first) return false;
  cur.advance(first->length);
  const std::size_t before = cur.pos();
  skip_blanks(cur);
  if (cur.pos() == before) return false;
  auto second = parse_jss_time(cur.rest(), 100, 2);
  if (!second) return false;
  cur.advance(second->length);
  return cur.at_end() || cur.peek() == ' ' || cur.peek() == '\t';
}

bool parse_microdvd_frames(std::string_view s, std::uint64_t& start, std::uint64_t& end,
                           std::size_t& length) {
  ByteCursor cur(s);
  std::size_t n = 0;
  if (cur.peek_or_nul() != '{') return false;
  cur.advance();
  if (!read_digits(cur, 10, start, n)) return false;
  if (cur.peek_or_nul() != '}') return false;
  cur.advance();
  if (cur.peek_or_nul() != '{') return false;
  cur.advance();
  if (!read_digits(cur, 10, end, n)) return false;
  if (cur.peek_or_nul() != '}') return false;
  cur.advance();
  length = cur.pos();
  return true;
}

}  // namespace subguard::grammar
