#pragma once

// Plumbing shared by the format parsers: warning locations, cue limits,
// markup attachment and the final ordering pass.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/limits.hpp"
#include "subguard/model.hpp"
#include "subguard/text.hpp"

namespace subguard::detail {

/// Collects warnings produced while decoding one payload; offsets are
/// relative to the raw payload.
struct PayloadWarnings {
  struct Item {
    WarningCode code;
    std::string message;
    std::size_t offset;
  };
  std::vector<Item> items;
  void add(WarningCode code, std::string message, std::size_t offset) {
    items.push_back({code, std::move(message), offset});
  }
};

/// Lossy UTF-8 decode reporting one InvalidUtf8 per replacement run.
std::string decode_utf8(std::string_view raw, PayloadWarnings* sink);

std::string decode_srt_payload(std::string_view raw, PayloadWarnings* sink);
std::string decode_jss_payload(std::string_view raw, PayloadWarnings* sink);
std::string decode_microdvd_payload(std::string_view raw, PayloadWarnings* sink);
std::string decode_sami_payload(std::string_view raw, PayloadWarnings* sink);

class DocumentBuilder {
 public:
  DocumentBuilder(FormatId format, std::string_view source, const ParseLimits& limits);

  std::string_view source() const noexcept { return source_; }
  const ParseLimits& limits() const noexcept { return limits_; }

  void warn(WarningCode code, std::string message, std::size_t offset);

  /// Appends a cue whose payload occupies source[raw_begin, raw_end). The
  /// payload is decoded with `decode`, parsed as markup, and every decode and
  /// markup warning is located inside the payload span. Times are swapped
  /// (with a warning) when end < start.
  template <typename Decode>
  Cue& add_cue(std::optional<std::uint64_t> index, std::int64_t start, std::int64_t end,
               std::size_t raw_begin, std::size_t raw_end, std::size_t timing_offset,
               Decode&& decode) {
    PayloadWarnings sink;
    const auto raw = source_.substr(raw_begin, raw_end - raw_begin);
    std::string decoded = decode(raw, &sink);
    return push(index, start, end, raw_begin, raw_end, timing_offset, std::move(decoded), sink);
  }

  /// Stable sort by start and hand over the document.
  SubtitleDocument finish();

 private:
  Cue& push(std::optional<std::uint64_t> index, std::int64_t start, std::int64_t end,
            std::size_t raw_begin, std::size_t raw_end, std::size_t timing_offset,
            std::string decoded, const PayloadWarnings& sink);

  std::string_view source_;
  const ParseLimits& limits_;
  text::LineIndex lines_;
  SubtitleDocument doc_;
};

}  // namespace subguard::detail
