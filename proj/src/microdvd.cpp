#include "grammar.hpp"
#include "parse_common.hpp"
#include "subguard/cursor.hpp"
#include "subguard/parsers.hpp"

namespace subguard {

namespace {

// Frames per second as an exact fraction num/den.
struct FrameRate {
  std::uint64_t num = 23976;
  std::uint64_t den = 1000;
};

// "23.976" style rates in (0, 1000] with at most six decimals.
std::optional<FrameRate> parse_frame_rate(std::string_view s) {
  s = text::trim(s);
  const auto dot = s.find('.');
  const auto whole = s.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
  std::uint64_t w = 0, f = 0;
  if (!text::parse_uint(whole, w, 4)) return std::nullopt;
  if (!frac.empty() && !text::parse_uint(frac, f, 6)) return std::nullopt;
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  FrameRate r{w * den + f, den};
  if (r.num == 0 || r.num > 1000 * den) return std::nullopt;
  return r;
}

std::optional<std::int64_t> frame_to_ms(std::uint64_t frame, const FrameRate& fps) {
  const __int128 numer = static_cast<__int128>(frame) * 1000 * fps.den;
  const __int128 ms = (numer * 2 + fps.num) / (2 * static_cast<__int128>(fps.num));
  if (ms > TimeStamp::kMaxMillis) return std::nullopt;
  return static_cast<std::int64_t>(ms);
}

void append_attr_value(std::string& out, std::string_view v) {
  for (char c : v) {
    if (c == '"') {
      out += "&quot;";
    } else if (c == '&') {
      out += "&amp;";
    } else {
      out += c;
    }
  }
}

bool is_hex(char c) noexcept {
  return text::is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

struct ControlCode {
  char key;  // lowercase
  bool whole_cue;
  std::string_view value;
  std::size_t offset;
  std::size_t length;
};

// "{k:value}" at the start of `s`.
std::optional<ControlCode> read_control_code(std::string_view s, std::size_t base) {
  ByteCursor cur(s);
  if (cur.peek_or_nul() != '{') return std::nullopt;
  cur.advance();
  const char key = cur.peek_or_nul();
  if (!text::is_alpha(key)) return std::nullopt;
  cur.advance();
  if (cur.peek_or_nul() != ':') return std::nullopt;
  cur.advance();
  const std::size_t vb = cur.pos();
  while (!cur.at_end() && cur.peek() != '}' && cur.peek() != '{') cur.advance();
  if (cur.peek_or_nul() != '}') return std::nullopt;
  const auto value = cur.slice(vb, cur.pos());
  cur.advance();
  return ControlCode{text::to_lower(key), text::is_upper(key), value, base, cur.pos()};
}

// Turns one control code into an opening tag, or returns false when the code
// carries no markup.
bool code_to_tag(const ControlCode& code, std::string& open, std::string& close,
                 detail::PayloadWarnings* sink) {
  switch (code.key) {
    case 'y': {
      for (char c : code.value) {
        const char lc = text::to_lower(c);
        if (lc == 'b' || lc == 'i' || lc == 'u') {
          open += '<';
          open += lc;
          open += '>';
          close.insert(0, std::string("</") + lc + ">");
        }
      }
      return true;
    }
    case 'c': {
      auto v = text::trim(code.value);
      if (v.size() == 7 && v[0] == '$' && std::all_of(v.begin() + 1, v.end(), is_hex)) {
        // $BBGGRR
        open += "<font color=\"#";
        open += text::lower(v.substr(5, 2));
        open += text::lower(v.substr(3, 2));
        open += text::lower(v.substr(1, 2));
        open += "\">";
        close.insert(0, "</font>");
      } else if (sink) {
        sink->add(WarningCode::UnknownControlCode, "unreadable colour code", code.offset);
      }
      return true;
    }
    case 'f':
    case 's': {
      open += code.key == 'f' ? "<font face=\"" : "<font size=\"";
      append_attr_value(open, code.value);
      open += "\">";
      close.insert(0, "</font>");
      return true;
    }
    case 'p':
    case 'h':
      return true;
    default:
      if (sink) sink->add(WarningCode::UnknownControlCode, "unknown control code", code.offset);
      return true;
  }
}

}  // namespace

namespace detail {

std::string decode_microdvd_payload(std::string_view raw, PayloadWarnings* sink) {
  const std::string text = decode_utf8(raw, sink);
  std::string cue_open, cue_close, body;
  std::size_t pos = 0;
  bool first_line = true;
  while (pos <= text.size()) {
    std::size_t bar = text.find('|', pos);
    if (bar == std::string::npos) bar = text.size();
    std::string_view line(text.data() + pos, bar - pos);
    std::string open, close;
    std::size_t consumed = 0;
    while (auto code = read_control_code(line.substr(consumed), pos + consumed)) {
      if (code->whole_cue && first_line) {
        code_to_tag(*code, cue_open, cue_close, sink);
      } else {
        code_to_tag(*code, open, close, sink);
      }
      consumed += code->length;
    }
    if (!first_line) body += '\n';
    body += open;
    body += line.substr(consumed);
    body += close;
    first_line = false;
    pos = bar + 1;
  }
  return cue_open + body + cue_close;
}

}  // namespace detail

SubtitleDocument parse_microdvd(std::string_view source, const ParseLimits& limits) {
  detail::DocumentBuilder builder(FormatId::MicroDvd, source, limits);
  const auto lines = text::split_lines(source, text::bom_length(source), limits.max_line_bytes);
  FrameRate fps;
  bool seen_cue_line = false;

  for (const auto& span : lines) {
    const auto line = span.in(source);
    if (text::is_blank_line(line)) continue;
    std::uint64_t a = 0, b = 0;
    std::size_t len = 0;
    if (!grammar::parse_microdvd_frames(line, a, b, len)) {
      builder.warn(WarningCode::MalformedCue, "line does not start with {start}{end}", span.begin);
      continue;
    }
    const auto rest = line.substr(len);
    if (!seen_cue_line && a == b && a <= 1) {
      seen_cue_line = true;
      if (auto rate = parse_frame_rate(rest)) {
        fps = *rate;
        continue;
      }
    }
    seen_cue_line = true;
    const auto start = frame_to_ms(a, fps);
    const auto end = frame_to_ms(b, fps);
    if (!start || !end) {
      builder.warn(WarningCode::MalformedCue, "frame number out of range", span.begin);
      continue;
    }
    builder.add_cue(std::nullopt, *start, *end, span.begin + len, span.end, span.begin,
                    detail::decode_microdvd_payload);
  }
  return builder.finish();
}

}  // namespace subguard
