#include <algorithm>

#include "parse_common.hpp"
#include "subguard/cursor.hpp"
#include "subguard/markup.hpp"
#include "subguard/parsers.hpp"

namespace subguard {

namespace {

constexpr std::int64_t kLastCueDuration = 4000;

bool is_name_end(char c) noexcept { return text::is_space(c) || c == '>' || c == '/'; }

// Offsets of every "<sync" tag start, case-insensitive.
std::vector<std::size_t> find_syncs(std::string_view s) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = text::ifind(s, "<sync", pos)) != std::string_view::npos) {
    if (pos + 5 >= s.size() || is_name_end(s[pos + 5])) out.push_back(pos);
    pos += 5;
  }
  return out;
}

// Offsets of every "</body" and "</sami", ascending.
std::vector<std::size_t> find_body_ends(std::string_view s) {
  std::vector<std::size_t> out;
  for (std::string_view needle : {"</body", "</sami"}) {
    std::size_t pos = 0;
    while ((pos = text::ifind(s, needle, pos)) != std::string_view::npos) out.push_back(pos++);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// First '>' outside quotes, starting at `from`.
std::size_t find_tag_close(std::string_view s, std::size_t from) {
  char quote = 0;
  for (std::size_t i = from; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i;
    }
  }
  return std::string_view::npos;
}

// Value of the Start attribute inside a sync tag body.
std::optional<std::int64_t> read_start(std::string_view tag) {
  std::size_t pos = 0;
  while ((pos = text::ifind(tag, "start", pos)) != std::string_view::npos) {
    const bool boundary = pos == 0 || text::is_space(tag[pos - 1]);
    std::size_t i = pos + 5;
    pos = i;
    if (!boundary) continue;
    while (i < tag.size() && text::is_space(tag[i])) ++i;
    if (i >= tag.size() || tag[i] != '=') continue;
    ++i;
    while (i < tag.size() && text::is_space(tag[i])) ++i;
    if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) ++i;
    const std::size_t db = i;
    while (i < tag.size() && text::is_digit(tag[i])) ++i;
    std::uint64_t v = 0;
    if (!text::parse_uint(tag.substr(db, i - db), v, 13)) return std::nullopt;
    if (v > static_cast<std::uint64_t>(TimeStamp::kMaxMillis - kLastCueDuration)) return std::nullopt;
    return static_cast<std::int64_t>(v);
  }
  return std::nullopt;
}

bool tag_is(std::string_view s, std::size_t at, std::string_view name) {
  // s[at] == '<'
  const std::size_t n = name.size();
  if (at + 1 + n > s.size()) return false;
  if (!text::iequals(s.substr(at + 1, n), name)) return false;
  return at + 1 + n == s.size() || is_name_end(s[at + 1 + n]);
}

// A cue holding only whitespace and no-break spaces clears the screen.
bool is_clear_marker(const std::vector<SpanNode>& nodes) {
  for (const auto& n : nodes) {
    if (n.is_element()) return false;
    std::string_view t = n.as_text().content;
    std::size_t i = 0;
    while (i < t.size()) {
      if (text::is_space(t[i])) {
        ++i;
      } else if (t.substr(i, 2) == "\xC2\xA0") {
        i += 2;
      } else {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

namespace detail {

std::string decode_sami_payload(std::string_view raw, PayloadWarnings* sink) {
  const std::string text = decode_utf8(raw, sink);
  std::string out;
  out.reserve(text.size());
  auto blank = [&out] {
    if (!out.empty() && out.back() != ' ' && out.back() != '\n') out.push_back(' ');
  };
  // Structural tags end at the next '>'; remembering it keeps this linear.
  std::size_t next_gt = 0;
  auto gt_from = [&](std::size_t from) {
    if (next_gt != std::string::npos && next_gt < from) next_gt = text.find('>', from);
    return next_gt;
  };
  next_gt = text.find('>');
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '<') {
      if (text.compare(i, 4, "<!--") == 0) {
        const auto close = text.find("-->", i + 4);
        i = close == std::string::npos ? text.size() : close + 3;
        blank();
        continue;
      }
      const bool closing = i + 1 < text.size() && text[i + 1] == '/';
      const std::size_t name_at = closing ? i + 1 : i;
      if (tag_is(text, name_at, "p") || tag_is(text, name_at, "sync") || tag_is(text, name_at, "br")) {
        const auto close = gt_from(i);
        if (close != std::string::npos) {
          if (tag_is(text, name_at, "br")) {
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out.push_back('\n');
          } else {
            blank();
          }
          i = close + 1;
          continue;
        }
      }
      out.push_back(c);
      ++i;
    } else if (text::is_space(c)) {
      blank();
      ++i;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  std::size_t lead = 0;
  while (lead < out.size() && out[lead] == ' ') ++lead;
  return out.substr(lead);
}

}  // namespace detail

SubtitleDocument parse_sami(std::string_view source, const ParseLimits& limits) {
  detail::DocumentBuilder builder(FormatId::Sami, source, limits);
  // Lines are only checked against the limit; SAMI is not line-oriented.
  text::split_lines(source, 0, limits.max_line_bytes);

  const auto syncs = find_syncs(source);
  if (syncs.empty()) {
    builder.warn(WarningCode::NoSyncBlocks, "no <SYNC> blocks found", 0);
    return builder.finish();
  }

  struct Block {
    std::int64_t start;
    std::size_t raw_begin;
    std::size_t raw_end;
    std::size_t tag_at;
  };
  const auto body_ends = find_body_ends(source);
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < syncs.size(); ++k) {
    const std::size_t at = syncs[k];
    const std::size_t next = k + 1 < syncs.size() ? syncs[k + 1] : source.size();
    const std::size_t close = find_tag_close(source.substr(0, next), at);
    if (close == std::string_view::npos) {
      builder.warn(WarningCode::MalformedCue, "unterminated <SYNC> tag", at);
      continue;
    }
    auto start = read_start(source.substr(at + 5, close - at - 5));
    if (!start) {
      builder.warn(WarningCode::MalformedCue, "<SYNC> without a readable Start", at);
      continue;
    }
    const auto body_end = std::lower_bound(body_ends.begin(), body_ends.end(), close + 1);
    const std::size_t raw_end = body_end == body_ends.end() ? next : std::min(next, *body_end);
    blocks.push_back({*start, close + 1, std::max(raw_end, close + 1), at});
  }

  std::vector<std::int64_t> starts;
  starts.reserve(blocks.size());
  for (const auto& b : blocks) starts.push_back(b.start);
  std::sort(starts.begin(), starts.end());

  for (const auto& b : blocks) {
    const auto raw = source.substr(b.raw_begin, b.raw_end - b.raw_begin);
    const std::string decoded = detail::decode_sami_payload(raw, nullptr);
    if (is_clear_marker(parse_markup(decoded, limits).nodes)) continue;
    const auto later = std::upper_bound(starts.begin(), starts.end(), b.start);
    const std::int64_t end = later == starts.end() ? b.start + kLastCueDuration : *later;
    builder.add_cue(std::nullopt, b.start, end, b.raw_begin, b.raw_end, b.tag_at,
                    detail::decode_sami_payload);
  }
  return builder.finish();
}

}  // namespace subguard
