#include "parse_common.hpp"

#include <algorithm>

#include "subguard/error.hpp"
#include "subguard/markup.hpp"

namespace subguard::detail {

std::string decode_utf8(std::string_view raw, PayloadWarnings* sink) {
  auto decoded = text::decode_utf8_lossy(raw);
  if (sink) {
    for (auto at : decoded.invalid_runs) sink->add(WarningCode::InvalidUtf8, "invalid UTF-8 replaced", at);
  }
  return std::move(decoded.text);
}

DocumentBuilder::DocumentBuilder(FormatId format, std::string_view source, const ParseLimits& limits)
    : source_(source), limits_(limits), lines_(source) {
  limits.validate();
  doc_.format = format;
}

void DocumentBuilder::warn(WarningCode code, std::string message, std::size_t offset) {
  doc_.warnings.push_back({code, std::move(message), lines_.locate(std::min(offset, source_.size()))});
}

Cue& DocumentBuilder::push(std::optional<std::uint64_t> index, std::int64_t start, std::int64_t end,
                           std::size_t raw_begin, std::size_t raw_end, std::size_t timing_offset,
                           std::string decoded, const PayloadWarnings& sink) {
  if (doc_.cues.size() >= limits_.max_cues) {
    throw LimitExceeded("more than " + std::to_string(limits_.max_cues) + " cues");
  }
  const std::size_t raw_len = raw_end - raw_begin;
  if (end < start) {
    warn(WarningCode::EndBeforeStart, "cue ends before it starts; times swapped", timing_offset);
    std::swap(start, end);
  }
  for (const auto& w : sink.items) warn(w.code, w.message, raw_begin + std::min(w.offset, raw_len));

  auto markup = parse_markup(decoded, limits_);
  for (const auto& w : markup.warnings) {
    // Markup offsets index the decoded text; clamp them into the payload.
    warn(w.code, w.message, raw_begin + std::min(w.offset, raw_len));
  }

  Cue cue;
  cue.index = index;
  cue.start = TimeStamp(start);
  cue.end = TimeStamp(end);
  cue.content = std::move(markup.nodes);
  cue.raw_text = std::string(source_.substr(raw_begin, raw_len));
  cue.raw_location = lines_.locate(raw_begin);
  doc_.cues.push_back(std::move(cue));
  return doc_.cues.back();
}

SubtitleDocument DocumentBuilder::finish() {
  std::stable_sort(doc_.cues.begin(), doc_.cues.end(),
                   [](const Cue& a, const Cue& b) { return a.start < b.start; });
  return std::move(doc_);
}

}  // namespace subguard::detail
