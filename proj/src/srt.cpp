#include "grammar.hpp"
#include "parse_common.hpp"
#include "subguard/markup.hpp"
#include "subguard/parsers.hpp"

namespace subguard {

namespace detail {

std::string decode_srt_payload(std::string_view raw, PayloadWarnings* sink) {
  std::string decoded = decode_utf8(raw, sink);
  // Body lines keep their own terminators inside raw_text; normalise CRLF.
  std::string out;
  out.reserve(decoded.size());
  std::size_t pending_cr = 0;
  for (char c : decoded) {
    if (c == '\r') {
      ++pending_cr;
      continue;
    }
    if (c != '\n') out.append(pending_cr, '\r');
    pending_cr = 0;
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

SubtitleDocument parse_srt(std::string_view source, const ParseLimits& limits) {
  detail::DocumentBuilder builder(FormatId::Srt, source, limits);
  const auto lines = text::split_lines(source, text::bom_length(source), limits.max_line_bytes);

  auto blank = [&](std::size_t i) { return text::is_blank_line(lines[i].in(source)); };

  std::size_t i = 0;
  while (i < lines.size()) {
    if (blank(i)) {
      ++i;
      continue;
    }
    const std::size_t block_begin = i;
    std::size_t block_end = i;
    while (block_end < lines.size() && !blank(block_end)) ++block_end;

    std::optional<std::uint64_t> index;
    std::size_t t = block_begin;
    if (grammar::is_index_line(lines[t].in(source)) && t + 1 < block_end) {
      std::uint64_t value = 0;
      text::parse_uint(text::trim(lines[t].in(source)), value, 18);
      index = value;
      ++t;
    }
    auto timing = grammar::parse_srt_timing(lines[t].in(source));
    if (!timing) {
      builder.warn(WarningCode::MalformedCue, "block without a timing line skipped",
                   lines[block_begin].begin);
      i = block_end;
      continue;
    }

    std::size_t raw_begin = lines[t].next;
    std::size_t raw_end = raw_begin;
    if (t + 1 < block_end) {
      raw_begin = lines[t + 1].begin;
      raw_end = lines[block_end - 1].end;
    } else {
      raw_begin = raw_end = lines[t].end;
    }
    builder.add_cue(index, timing->start.millis(), timing->end.millis(), raw_begin, raw_end,
                    lines[t].begin, detail::decode_srt_payload);
    i = block_end;
  }
  return builder.finish();
}

namespace {

// Writes rendered markup as SRT body lines. A physical line that would be
// blank ends the cue on re-parse, so the newline in front of it is written
// as a character reference instead; '\r' is always written as a reference.
void append_body(std::string& out, std::string_view body) {
  std::string phys;
  bool nonblank = false;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= body.size()) {
    std::size_t nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    const auto line = body.substr(pos, nl - pos);
    const bool line_blank = text::is_blank_line(line);
    if (!first) {
      if (nonblank && !line_blank) {
        phys += '\n';
        nonblank = false;
      } else {
        phys += "&#10;";
        nonblank = true;
      }
    }
    first = false;
    for (char c : line) {
      if (c == '\r') {
        phys += "&#13;";
      } else {
        phys += c;
      }
    }
    if (!line_blank) nonblank = true;
    pos = nl + 1;
  }
  if (!nonblank) {
    // Only whitespace on the last physical line: make it visible.
    const std::size_t line_start = phys.rfind('\n') == std::string::npos ? 0 : phys.rfind('\n') + 1;
    if (line_start < phys.size()) {
      const auto c = static_cast<unsigned char>(phys[line_start]);
      phys.replace(line_start, 1, "&#" + std::to_string(c) + ";");
    }
  }
  if (phys.empty()) return;
  out += phys;
  out += '\n';
}

}  // namespace

std::string serialize_srt(const SubtitleDocument& doc) {
  std::string out;
  std::size_t n = 0;
  for (const auto& cue : doc.cues) {
    out += std::to_string(++n);
    out += '\n';
    out += format_srt_time(cue.start);
    out += " --> ";
    out += format_srt_time(cue.end);
    out += '\n';
    append_body(out, render_markup(cue.content));
    out += '\n';
  }
  return out;
}

}  // namespace subguard
