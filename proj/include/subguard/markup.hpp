#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/limits.hpp"
#include "subguard/model.hpp"

namespace subguard {

/// Tags that become ElementNodes: b, i, u, font, img, a, span.
bool is_known_tag(std::string_view lowercase_name) noexcept;

struct MarkupWarning {
  WarningCode code;
  std::string message;
  std::size_t offset;  // into the markup text
};

struct MarkupResult {
  std::vector<SpanNode> nodes;
  std::vector<MarkupWarning> warnings;
};

/// Builds a best-effort tree from HTML-like subtitle markup.
///
/// Grammar, in short:
///  - `<name attrs>` with a known name opens an element (`img` is void); the
///    attribute scan stops at the first `>` outside quotes or at end of input,
///    never later. An unterminated known tag turns the rest of the input into
///    literal text and records UnterminatedTag.
///  - `</name>` closes the nearest matching open element, auto-closing any
///    inside it; with no match it is dropped (StrayEndTag).
///  - `<` before an unknown name is literal text (UnknownTag); any other `<` is
///    literal without a warning.
///  - `&lt; &gt; &amp; &quot; &apos; &nbsp;` and numeric references decode in
///    text and attribute values; anything else is literal.
///  - Opening past `limits.max_span_depth` yields an empty leaf element
///    (SpanDepthExceeded); elements still open at the end are closed
///    (UnclosedTag).
/// Total: returns for every input and reads each byte a bounded number of times.
MarkupResult parse_markup(std::string_view text, const ParseLimits& limits = {});

/// Canonical markup for a tree. `parse_markup(render_markup(t))` reproduces any
/// tree that parse_markup produced.
std::string render_markup(const std::vector<SpanNode>& nodes);

/// Plain-text projection of markup computed directly on the string, without
/// building a tree. Agrees with flatten(parse_markup(text).nodes).
std::string strip_markup(std::string_view text);

/// Decodes the character reference starting at text[pos] (which must be '&').
/// On success returns the UTF-8 replacement and sets `length` to the number of
/// source bytes consumed.
std::optional<std::string> decode_entity_at(std::string_view text, std::size_t pos,
                                            std::size_t& length);

/// A tag spelled out inside a text leaf, for any tag name.
struct RawTag {
  std::string name;  // lowercase
  std::vector<Attribute> attributes;
  bool closing = false;
  std::size_t offset = 0;
};

/// Finds tag-shaped constructs in literal text (what a browser would still
/// parse if the text reached innerHTML). Stops at the first unterminated tag.
std::vector<RawTag> find_embedded_tags(std::string_view text);

}  // namespace subguard
