#include <algorithm>

#include "grammar.hpp"
#include "parse_common.hpp"
#include "subguard/cursor.hpp"
#include "subguard/parsers.hpp"

namespace subguard {

namespace {

bool is_jss_blank(char c) noexcept { return c == ' ' || c == '\t'; }

std::string_view trim_left_blanks(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size() && is_jss_blank(s[i])) ++i;
  return s.substr(i);
}

// Characters allowed in a directive block outside a {...} group.
bool is_directive_char(char c) noexcept { return text::is_upper(c) || text::is_digit(c) || c == '[' || c == ']'; }

bool looks_like_directive_block(std::string_view block) noexcept {
  if (block.size() < 2) return false;
  if (!text::is_upper(block[0]) && block[0] != '[') return false;
  bool in_group = false;
  for (char c : block) {
    if (in_group) {
      if (c == '}') in_group = false;
    } else if (c == '{') {
      in_group = true;
    } else if (!is_directive_char(c)) {
      return false;
    }
  }
  return true;
}

struct DirectiveBlock {
  std::size_t begin = 0;  // offsets into the line
  std::size_t end = 0;
  bool present = false;
  bool terminated = false;
};

// The directive block is the token after the timing, ending at the first
// blank or at the end of the line, whichever comes first.
DirectiveBlock find_directive_block(std::string_view line, std::size_t from) {
  DirectiveBlock block;
  ByteCursor cur(line);
  cur.seek(from);
  while (!cur.at_end() && is_jss_blank(cur.peek())) cur.advance();
  block.begin = cur.pos();
  while (!cur.at_end() && !is_jss_blank(cur.peek())) cur.advance();
  block.end = cur.pos();
  block.terminated = !cur.at_end();
  block.present = looks_like_directive_block(line.substr(block.begin, block.end - block.begin));
  return block;
}

struct TimingLine {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::size_t length = 0;  // bytes of the two times and the blanks between
};

std::optional<TimingLine> parse_timing(std::string_view line, std::uint64_t res) {
  std::size_t pos = 0;
  while (pos < line.size() && is_jss_blank(line[pos])) ++pos;
  auto first = grammar::parse_jss_time(line.substr(pos), res);
  if (!first) return std::nullopt;
  pos += first->length;
  const std::size_t gap = pos;
  while (pos < line.size() && is_jss_blank(line[pos])) ++pos;
  if (pos == gap) return std::nullopt;
  auto second = grammar::parse_jss_time(line.substr(pos), res);
  if (!second) return std::nullopt;
  pos += second->length;
  if (pos < line.size() && !is_jss_blank(line[pos])) return std::nullopt;
  return TimingLine{first->millis, second->millis, pos};
}

// Bounded scan of "[+-][[H:]M:]S[.F]"; F is in 1/res seconds.
std::optional<std::int64_t> parse_shift_value(std::string_view s, std::uint64_t res) {
  ByteCursor cur(s);
  while (!cur.at_end() && is_jss_blank(cur.peek())) cur.advance();
  bool negative = false;
  if (cur.peek_or_nul() == '-' || cur.peek_or_nul() == '+') negative = cur.next() == '-';
  std::uint64_t fields[3] = {0, 0, 0};
  std::size_t count = 0;
  std::optional<std::uint64_t> fraction;
  for (;;) {
    const std::size_t begin = cur.pos();
    while (!cur.at_end() && text::is_digit(cur.peek()) && cur.pos() - begin < 9) cur.advance();
    std::uint64_t v = 0;
    if (!text::parse_uint(cur.slice(begin, cur.pos()), v, 9)) return std::nullopt;
    if (count == 3) return std::nullopt;
    fields[count++] = v;
    if (cur.peek_or_nul() == ':') {
      cur.advance();
      continue;
    }
    if (cur.peek_or_nul() == '.') {
      cur.advance();
      const std::size_t fb = cur.pos();
      while (!cur.at_end() && text::is_digit(cur.peek()) && cur.pos() - fb < 9) cur.advance();
      std::uint64_t f = 0;
      if (!text::parse_uint(cur.slice(fb, cur.pos()), f, 9)) return std::nullopt;
      fraction = f;
    }
    break;
  }
  while (!cur.at_end() && is_jss_blank(cur.peek())) cur.advance();
  if (!cur.at_end()) return std::nullopt;
  std::uint64_t seconds = 0;
  for (std::size_t i = 0; i < count; ++i) seconds = seconds * 60 + fields[i];
  const std::int64_t ms = static_cast<std::int64_t>(seconds * 1000 + (fraction ? (*fraction * 1000 + res / 2) / res : 0));
  if (ms > TimeStamp::kMaxMillis) return std::nullopt;
  return negative ? -ms : ms;
}

enum class GlobalKind { Shift, TimeRes, Other };

struct GlobalLine {
  GlobalKind kind = GlobalKind::Other;
  std::string keyword;
  std::size_t offset = 0;       // where the value starts, as the directive computes it
  bool out_of_range = false;    // offset lies beyond the end of the line
};

// '#' lines. The value offset is 2 for the one-letter form and the keyword
// length plus one otherwise; it is checked against the line before use.
GlobalLine classify_global(std::string_view line) {
  GlobalLine g;
  std::size_t k = 1;
  while (k < line.size() && text::is_alpha(line[k])) ++k;
  g.keyword = text::lower(line.substr(1, k - 1));
  const char letter = line.size() > 1 ? text::to_upper(line[1]) : '\0';
  const bool long_form = line.size() > 2 && text::is_alpha(line[2]);
  if (letter == 'S') {
    g.offset = long_form ? 6 : 2;
    g.kind = (g.keyword == "s" || g.keyword == "shift") ? GlobalKind::Shift : GlobalKind::Other;
  } else if (letter == 'T') {
    g.offset = long_form ? 8 : 2;
    g.kind = (g.keyword == "t" || g.keyword == "timeres") ? GlobalKind::TimeRes : GlobalKind::Other;
  } else {
    return g;
  }
  g.out_of_range = g.offset > line.size();
  return g;
}

void append_block_codes(std::string_view block, std::vector<JssDirective>& out) {
  std::size_t i = 0;
  while (i < block.size()) {
    JssDirective d;
    const std::size_t begin = i;
    if (block[i] == '[' || block[i] == '{') {
      const char close = block[i] == '[' ? ']' : '}';
      while (i < block.size() && block[i] != close) ++i;
      if (i < block.size()) ++i;
      d.kind = JssDirective::Kind::Unsupported;
    } else {
      const char letter = block[i++];
      const std::size_t digits = i;
      while (i < block.size() && text::is_digit(block[i]) && i - digits < 9) ++i;
      std::uint64_t v = 0;
      if (text::parse_uint(block.substr(digits, i - digits), v, 9)) d.value = static_cast<std::int64_t>(v);
      if (letter == 'C') {
        d.kind = JssDirective::Kind::ColorEscape;
      } else if (letter == 'F') {
        d.kind = JssDirective::Kind::FontEscape;
      } else {
        d.kind = JssDirective::Kind::Unsupported;
      }
    }
    d.raw = std::string(block.substr(begin, i - begin));
    out.push_back(std::move(d));
  }
}

}  // namespace

namespace detail {

std::string decode_jss_payload(std::string_view raw, PayloadWarnings* sink) {
  const std::string text = decode_utf8(raw, sink);
  std::string out;
  out.reserve(text.size());
  auto put_blank = [&out] {
    if (!out.empty() && out.back() != ' ' && out.back() != '\n') out.push_back(' ');
  };
  ByteCursor cur(text);
  while (!cur.at_end()) {
    const std::size_t at = cur.pos();
    const char c = cur.next();
    if (c == '{') {
      // Comment: up to the closing brace or the end of the line.
      while (!cur.at_end() && cur.peek() != '}') cur.advance();
      if (!cur.at_end()) cur.advance();
    } else if (c == '}') {
      continue;
    } else if (c == '~' || is_jss_blank(c)) {
      put_blank();
    } else if (c == '\\') {
      if (cur.at_end() || cur.peek() == '\r' || cur.peek() == '\n' || cur.peek() == '\0') {
        // Escape introducer with nothing (or a terminator) after it: drop
        // only the backslash.
        if (sink) sink->add(WarningCode::TruncatedEscape, "escape introducer at end of text", at);
        continue;
      }
      const char e = cur.next();
      switch (e) {
        case 'n':
        case 'N':
          while (!out.empty() && out.back() == ' ') out.pop_back();
          out.push_back('\n');
          break;
        case 'C':
        case 'c':
        case 'F':
        case 'f':
          // One argument character follows the escape letter.
          if (cur.at_end()) {
            if (sink) sink->add(WarningCode::TruncatedEscape, "colour/font escape without argument", at);
          } else {
            // The argument is one character, which may span several bytes.
            cur.advance();
            while (!cur.at_end() && (static_cast<unsigned char>(cur.peek()) & 0xC0) == 0x80) cur.advance();
          }
          break;
        case '\\':
        case '~':
        case '{':
        case '}':
          out.push_back(e);
          break;
        default:
          if (!text::is_alpha(e)) out.push_back(e);
          break;
      }
    } else {
      out.push_back(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace detail

std::string_view jss_directive_kind_name(JssDirective::Kind kind) noexcept {
  switch (kind) {
    case JssDirective::Kind::Shift: return "shift";
    case JssDirective::Kind::TimeRes: return "timeres";
    case JssDirective::Kind::ColorEscape: return "color";
    case JssDirective::Kind::FontEscape: return "font";
    case JssDirective::Kind::Unsupported: return "unsupported";
  }
  return "unsupported";
}

std::vector<JssDirective> jss_directives(std::string_view line) {
  std::vector<JssDirective> out;
  line = trim_left_blanks(line);
  if (!line.empty() && line[0] == '#') {
    const auto g = classify_global(line);
    JssDirective d;
    const std::size_t raw_end = std::min(line.find_first_of(" \t"), line.size());
    d.raw = std::string(line.substr(0, raw_end));
    if (g.kind != GlobalKind::Other && !g.out_of_range) {
      if (g.kind == GlobalKind::Shift) {
        d.kind = JssDirective::Kind::Shift;
        d.value = parse_shift_value(line.substr(g.offset), 100);
      } else {
        d.kind = JssDirective::Kind::TimeRes;
        std::uint64_t v = 0;
        if (text::parse_uint(text::trim(line.substr(g.offset)), v, 9)) d.value = static_cast<std::int64_t>(v);
      }
    }
    out.push_back(std::move(d));
    return out;
  }
  auto timing = parse_timing(line, 100);
  if (!timing) return out;
  const auto block = find_directive_block(line, timing->length);
  if (!block.present) return out;
  const auto raw = line.substr(block.begin, block.end - block.begin);
  if (!block.terminated) {
    out.push_back({JssDirective::Kind::Unsupported, std::string(raw), std::nullopt});
  } else {
    append_block_codes(raw, out);
  }
  return out;
}

SubtitleDocument parse_jss(std::string_view source, const ParseLimits& limits) {
  detail::DocumentBuilder builder(FormatId::JacoSub, source, limits);
  const auto lines = text::split_lines(source, text::bom_length(source), limits.max_line_bytes);

  struct ShiftUse {
    std::int64_t shift;
    std::size_t offset;
  };
  struct Pending {
    std::int64_t start;
    std::int64_t end;
    std::size_t raw_begin;
    std::size_t raw_end;
    std::size_t line_begin;
    std::size_t shift_id;  // index into shifts
  };
  std::vector<ShiftUse> shifts{{0, 0}};
  std::vector<Pending> pending;
  std::uint64_t res = 100;

  for (const auto& span : lines) {
    const auto full = span.in(source);
    const auto line = trim_left_blanks(full);
    const std::size_t line_begin = span.begin + (full.size() - line.size());
    if (line.empty()) continue;

    if (line[0] == '#') {
      const auto g = classify_global(line);
      if (g.kind == GlobalKind::Other && !g.out_of_range) continue;
      if (g.out_of_range) {
        builder.warn(WarningCode::ShiftOutOfRange, "directive value offset lies past the end of the line",
                     line_begin);
        continue;
      }
      const auto value = line.substr(g.offset);
      if (g.kind == GlobalKind::Shift) {
        auto shift = parse_shift_value(value, res);
        if (!shift) {
          builder.warn(WarningCode::MalformedCue, "unreadable SHIFT value", line_begin);
          continue;
        }
        shifts.push_back({*shift, line_begin});
      } else {
        std::uint64_t v = 0;
        if (!text::parse_uint(text::trim(value), v, 9) || v == 0) {
          builder.warn(WarningCode::InvalidTimeRes, "TIMERES must be a positive integer", line_begin);
          continue;
        }
        res = v;
      }
      continue;
    }
    if (line[0] == '@') {
      builder.warn(WarningCode::UnsupportedFrameForm, "frame-number timing is not supported", line_begin);
      continue;
    }

    auto timing = parse_timing(line, res);
    if (!timing) {
      builder.warn(WarningCode::MalformedCue, "line is neither a cue nor a directive", line_begin);
      continue;
    }
    const auto block = find_directive_block(line, timing->length);
    std::size_t text_from = block.begin;
    if (block.present) {
      if (!block.terminated) {
        builder.warn(WarningCode::DirectiveUnterminated, "directive block runs to the end of the line",
                     line_begin + block.begin);
        text_from = line.size();
      } else {
        text_from = block.end;
        while (text_from < line.size() && is_jss_blank(line[text_from])) ++text_from;
      }
    }
    if (pending.size() >= limits.max_cues) {
      throw LimitExceeded("more than " + std::to_string(limits.max_cues) + " cues");
    }
    pending.push_back({timing->start, timing->end, line_begin + text_from, line_begin + line.size(),
                       line_begin, shifts.size() - 1});
  }

  // A shift may not move cues by more than the document spans.
  std::int64_t duration = 0;
  for (const auto& p : pending) duration = std::max({duration, p.start, p.end});
  for (std::size_t i = 1; i < shifts.size(); ++i) {
    auto& s = shifts[i];
    if (s.shift > duration || s.shift < -duration) {
      builder.warn(WarningCode::ShiftOutOfRange, "SHIFT exceeds the document duration; clamped", s.offset);
      s.shift = std::clamp(s.shift, -duration, duration);
    }
  }
  for (const auto& p : pending) {
    const std::int64_t shift = shifts[p.shift_id].shift;
    const auto apply = [shift](std::int64_t t) { return std::clamp(t + shift, std::int64_t{0}, TimeStamp::kMaxMillis); };
    builder.add_cue(std::nullopt, apply(p.start), apply(p.end), p.raw_begin, p.raw_end, p.line_begin,
                    detail::decode_jss_payload);
  }
  return builder.finish();
}

}  // namespace subguard
