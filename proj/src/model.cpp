#include "subguard/model.hpp"

#include <algorithm>
#include <cstdio>

namespace subguard {

std::string format_srt_time(TimeStamp t) {
  std::int64_t ms = std::max<std::int64_t>(0, t.millis());
  const auto hours = ms / 3'600'000;
  ms %= 3'600'000;
  const auto minutes = ms / 60'000;
  ms %= 60'000;
  const auto seconds = ms / 1000;
  ms %= 1000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld", static_cast<long long>(hours),
                static_cast<long long>(minutes), static_cast<long long>(seconds),
                static_cast<long long>(ms));
  return buf;
}

std::string_view format_name(FormatId id) noexcept {
  switch (id) {
    case FormatId::Srt: return "srt";
    case FormatId::JacoSub: return "jacosub";
    case FormatId::MicroDvd: return "microdvd";
    case FormatId::Sami: return "sami";
    case FormatId::SsaAss: return "ssa";
    case FormatId::SubViewer: return "subviewer";
    case FormatId::Vtt: return "vtt";
    case FormatId::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<FormatId> format_from_name(std::string_view name) noexcept {
  static constexpr std::pair<std::string_view, FormatId> kNames[] = {
      {"srt", FormatId::Srt},           {"subrip", FormatId::Srt},
      {"jacosub", FormatId::JacoSub},   {"jss", FormatId::JacoSub},
      {"microdvd", FormatId::MicroDvd}, {"sub", FormatId::MicroDvd},
      {"sami", FormatId::Sami},         {"smi", FormatId::Sami},
      {"ssa", FormatId::SsaAss},        {"ass", FormatId::SsaAss},
      {"subviewer", FormatId::SubViewer}, {"vtt", FormatId::Vtt},
      {"unknown", FormatId::Unknown},
  };
  for (const auto& [n, id] : kNames) {
    if (n == name) return id;
  }
  return std::nullopt;
}

bool has_parser(FormatId id) noexcept {
  return id == FormatId::Srt || id == FormatId::JacoSub || id == FormatId::MicroDvd ||
         id == FormatId::Sami;
}

std::string_view warning_name(WarningCode code) noexcept {
  switch (code) {
    case WarningCode::InvalidUtf8: return "InvalidUtf8";
    case WarningCode::MalformedCue: return "MalformedCue";
    case WarningCode::EndBeforeStart: return "EndBeforeStart";
    case WarningCode::UnterminatedTag: return "UnterminatedTag";
    case WarningCode::UnknownTag: return "UnknownTag";
    case WarningCode::StrayEndTag: return "StrayEndTag";
    case WarningCode::UnclosedTag: return "UnclosedTag";
    case WarningCode::SpanDepthExceeded: return "SpanDepthExceeded";
    case WarningCode::DuplicateAttribute: return "DuplicateAttribute";
    case WarningCode::DirectiveUnterminated: return "DirectiveUnterminated";
    case WarningCode::TruncatedEscape: return "TruncatedEscape";
    case WarningCode::ShiftOutOfRange: return "ShiftOutOfRange";
    case WarningCode::InvalidTimeRes: return "InvalidTimeRes";
    case WarningCode::UnsupportedFrameForm: return "UnsupportedFrameForm";
    case WarningCode::UnknownControlCode: return "UnknownControlCode";
    case WarningCode::NoSyncBlocks: return "NoSyncBlocks";
  }
  return "?";
}

const std::string* ElementNode::attribute(std::string_view name) const noexcept {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

bool operator==(const ElementNode& a, const ElementNode& b) {
  return a.tag == b.tag && a.attributes == b.attributes && a.children == b.children;
}

SpanNode SpanNode::text(std::string content) { return SpanNode{TextNode{std::move(content)}}; }

SpanNode SpanNode::element(std::string tag, std::vector<Attribute> attributes,
                           std::vector<SpanNode> children) {
  return SpanNode{ElementNode{std::move(tag), std::move(attributes), std::move(children)}};
}

namespace {

void flatten_into(const std::vector<SpanNode>& nodes, std::string& out) {
  for (const auto& n : nodes) {
    if (n.is_text()) {
      out += n.as_text().content;
    } else {
      flatten_into(n.as_element().children, out);
    }
  }
}

void describe_into(const std::vector<SpanNode>& nodes, std::string& out) {
  out += '[';
  bool first = true;
  for (const auto& n : nodes) {
    if (!first) out += ", ";
    first = false;
    if (n.is_text()) {
      out += '"';
      out += n.as_text().content;
      out += '"';
      continue;
    }
    const auto& e = n.as_element();
    out += e.tag;
    out += '{';
    for (std::size_t i = 0; i < e.attributes.size(); ++i) {
      if (i) out += ',';
      out += e.attributes[i].first + "=\"" + e.attributes[i].second + '"';
    }
    out += '}';
    describe_into(e.children, out);
  }
  out += ']';
}

}  // namespace

std::string flatten(const std::vector<SpanNode>& content) {
  std::string out;
  flatten_into(content, out);
  return out;
}

std::size_t element_depth(const std::vector<SpanNode>& content) {
  std::size_t best = 0;
  for (const auto& n : content) {
    if (n.is_element()) best = std::max(best, 1 + element_depth(n.as_element().children));
  }
  return best;
}

std::string describe(const std::vector<SpanNode>& content) {
  std::string out;
  describe_into(content, out);
  return out;
}

bool SubtitleDocument::has_warning(WarningCode code) const noexcept {
  return count_warnings(code) > 0;
}

std::size_t SubtitleDocument::count_warnings(WarningCode code) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      warnings.begin(), warnings.end(), [code](const Warning& w) { return w.code == code; }));
}

bool structurally_equal(const SubtitleDocument& a, const SubtitleDocument& b) {
  if (a.cues.size() != b.cues.size()) return false;
  for (std::size_t i = 0; i < a.cues.size(); ++i) {
    const auto& x = a.cues[i];
    const auto& y = b.cues[i];
    if (x.start != y.start || x.end != y.end || x.content != y.content) return false;
  }
  return true;
}

}  // namespace subguard
