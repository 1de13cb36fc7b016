#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/limits.hpp"
#include "subguard/model.hpp"

namespace subguard {

// Every parser is total: it returns a document for any byte input and throws
// only LimitExceeded (or std::invalid_argument for invalid limits).

SubtitleDocument parse_srt(std::string_view source, const ParseLimits& limits = {});
SubtitleDocument parse_jss(std::string_view source, const ParseLimits& limits = {});
SubtitleDocument parse_microdvd(std::string_view source, const ParseLimits& limits = {});
SubtitleDocument parse_sami(std::string_view source, const ParseLimits& limits = {});

/// Dispatches on `format`; throws ConversionUnsupported for detect-only ids
/// and UnknownFormat for Unknown.
SubtitleDocument parse_as(FormatId format, std::string_view source, const ParseLimits& limits = {});

/// Canonical SRT: LF line ends, 1-based indices, blank line after each cue.
std::string serialize_srt(const SubtitleDocument& doc);

/// detect_format, parse, serialize_srt.
std::string convert(std::string_view source, const ParseLimits& limits = {});

/// The markup string a parser derives from a cue's raw_text before building
/// the tree (encoding repair, format escapes, control codes).
std::string decode_payload(FormatId format, std::string_view raw_text);

/// Plain text of a cue computed from raw_text alone:
/// strip_markup(decode_payload(format, raw_text)).
std::string plain_projection(FormatId format, std::string_view raw_text);

struct JssDirective {
  enum class Kind { Shift, TimeRes, ColorEscape, FontEscape, Unsupported };
  Kind kind = Kind::Unsupported;
  std::string raw;
  std::optional<std::int64_t> value;  // shift in ms, ticks per second, or escape number
};

std::string_view jss_directive_kind_name(JssDirective::Kind kind) noexcept;

/// Directives carried by one JACOsub line: the global '#S'/'#T' forms, or the
/// directive block of a cue line split into codes. A block that runs to the
/// end of the line is returned whole as one Unsupported directive.
std::vector<JssDirective> jss_directives(std::string_view line);

}  // namespace subguard
