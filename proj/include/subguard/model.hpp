#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace subguard {

/// Milliseconds since media start.
class TimeStamp {
 public:
  /// 999999:59:59,999 -- well beyond anything a two-digit-hour format can name.
  static constexpr std::int64_t kMaxMillis = 3'599'999'999'999;

  constexpr TimeStamp() = default;
  constexpr explicit TimeStamp(std::int64_t millis) : millis_(millis) {}

  constexpr std::int64_t millis() const noexcept { return millis_; }

  friend constexpr auto operator<=>(TimeStamp, TimeStamp) = default;

 private:
  std::int64_t millis_ = 0;
};

/// Formats as HH:MM:SS,mmm (hours widen past two digits when needed).
std::string format_srt_time(TimeStamp t);

enum class FormatId { Srt, JacoSub, MicroDvd, Sami, SsaAss, SubViewer, Vtt, Unknown };

std::string_view format_name(FormatId id) noexcept;
std::optional<FormatId> format_from_name(std::string_view name) noexcept;
/// True for the formats this toolkit can parse.
bool has_parser(FormatId id) noexcept;

struct Location {
  std::size_t line = 1;         // 1-based
  std::size_t byte_offset = 0;  // 0-based into the source buffer

  friend bool operator==(const Location&, const Location&) = default;
};

enum class WarningCode {
  InvalidUtf8,
  MalformedCue,
  EndBeforeStart,
  UnterminatedTag,
  UnknownTag,
  StrayEndTag,
  UnclosedTag,
  SpanDepthExceeded,
  DuplicateAttribute,
  DirectiveUnterminated,
  TruncatedEscape,
  ShiftOutOfRange,
  InvalidTimeRes,
  UnsupportedFrameForm,
  UnknownControlCode,
  NoSyncBlocks,
};

inline constexpr WarningCode kAllWarningCodes[] = {
    WarningCode::InvalidUtf8,         WarningCode::MalformedCue,
    WarningCode::EndBeforeStart,      WarningCode::UnterminatedTag,
    WarningCode::UnknownTag,          WarningCode::StrayEndTag,
    WarningCode::UnclosedTag,         WarningCode::SpanDepthExceeded,
    WarningCode::DuplicateAttribute,  WarningCode::DirectiveUnterminated,
    WarningCode::TruncatedEscape,     WarningCode::ShiftOutOfRange,
    WarningCode::InvalidTimeRes,      WarningCode::UnsupportedFrameForm,
    WarningCode::UnknownControlCode,  WarningCode::NoSyncBlocks,
};

std::string_view warning_name(WarningCode code) noexcept;

struct Warning {
  WarningCode code;
  std::string message;
  Location location;
};

struct SpanNode;

struct TextNode {
  std::string content;

  friend bool operator==(const TextNode&, const TextNode&) = default;
};

using Attribute = std::pair<std::string, std::string>;

struct ElementNode {
  std::string tag;                     // lowercase
  std::vector<Attribute> attributes;   // names lowercase and unique, source order
  std::vector<SpanNode> children;

  const std::string* attribute(std::string_view name) const noexcept;

  friend bool operator==(const ElementNode&, const ElementNode&);
};

/// One node of a cue's markup tree: a text leaf or an element.
struct SpanNode {
  std::variant<TextNode, ElementNode> value;

  static SpanNode text(std::string content);
  static SpanNode element(std::string tag, std::vector<Attribute> attributes = {},
                          std::vector<SpanNode> children = {});

  bool is_text() const noexcept { return std::holds_alternative<TextNode>(value); }
  bool is_element() const noexcept { return std::holds_alternative<ElementNode>(value); }
  const TextNode& as_text() const { return std::get<TextNode>(value); }
  const ElementNode& as_element() const { return std::get<ElementNode>(value); }
  TextNode& as_text() { return std::get<TextNode>(value); }
  ElementNode& as_element() { return std::get<ElementNode>(value); }

  friend bool operator==(const SpanNode&, const SpanNode&) = default;
};

/// Concatenation of every text leaf, in document order.
std::string flatten(const std::vector<SpanNode>& content);

/// Deepest element nesting in the forest (0 for text only).
std::size_t element_depth(const std::vector<SpanNode>& content);

/// Debug rendering, e.g. `[b{}["a"], "b"]`. Used by tests and the CLI.
std::string describe(const std::vector<SpanNode>& content);

struct Cue {
  std::optional<std::uint64_t> index;
  TimeStamp start;
  TimeStamp end;
  std::vector<SpanNode> content;
  /// Exact source bytes of the cue payload (may hold invalid UTF-8).
  std::string raw_text;
  /// Where raw_text begins in the source.
  Location raw_location;
};

struct SubtitleDocument {
  FormatId format = FormatId::Unknown;
  std::vector<Cue> cues;
  std::vector<Warning> warnings;

  bool has_warning(WarningCode code) const noexcept;
  std::size_t count_warnings(WarningCode code) const noexcept;
};

/// Cue-by-cue comparison of timing and markup; indices, raw text and warnings
/// are ignored.
bool structurally_equal(const SubtitleDocument& a, const SubtitleDocument& b);

}  // namespace subguard
