#include "subguard/detect.hpp"

#include <stdexcept>
#include <vector>

#include "grammar.hpp"
#include "subguard/text.hpp"

namespace subguard {

namespace {

struct ProbeLine {
  std::string_view text;
  std::size_t begin;
  std::size_t number;  // 1-based
};

// Lines are cut by hand rather than with split_lines: probing must not fail
// on long lines, and never looks beyond the probe window.
std::vector<ProbeLine> probe_lines(std::string_view source, std::size_t max_lines) {
  std::vector<ProbeLine> out;
  std::size_t pos = text::bom_length(source);
  std::size_t number = 1;
  while (pos < source.size() && out.size() < max_lines) {
    std::size_t nl = source.find('\n', pos);
    const std::size_t next = nl == std::string_view::npos ? source.size() : nl + 1;
    if (nl == std::string_view::npos) nl = source.size();
    std::size_t end = nl;
    while (end > pos && source[end - 1] == '\r') --end;
    out.push_back({source.substr(pos, end - pos), pos, number++});
    pos = next;
  }
  return out;
}

std::string_view lead_trimmed(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

using Matcher = Confidence (*)(const std::vector<ProbeLine>&, std::size_t);

Confidence match_ssa(const std::vector<ProbeLine>& lines, std::size_t i) {
  return text::istarts_with(lead_trimmed(lines[i].text), "[Script Info]") ? Confidence::Exact
                                                                            : Confidence::Unknown;
}

Confidence match_vtt(const std::vector<ProbeLine>& lines, std::size_t i) {
  return lines[i].text.substr(0, 6) == "WEBVTT" ? Confidence::Exact : Confidence::Unknown;
}

Confidence match_sami(const std::vector<ProbeLine>& lines, std::size_t i) {
  return text::ifind(lines[i].text, "<SAMI>") != std::string_view::npos ? Confidence::Exact
                                                                         : Confidence::Unknown;
}

Confidence match_jacosub(const std::vector<ProbeLine>& lines, std::size_t i) {
  if (grammar::is_jss_timing_line(lines[i].text)) return Confidence::Exact;
  // A '#' directive counts when a timing line follows inside the window.
  if (!lead_trimmed(lines[i].text).starts_with("#")) return Confidence::Unknown;
  for (std::size_t j = i + 1; j < lines.size(); ++j) {
    if (grammar::is_jss_timing_line(lines[j].text)) return Confidence::Heuristic;
  }
  return Confidence::Unknown;
}

Confidence match_microdvd(const std::vector<ProbeLine>& lines, std::size_t i) {
  std::uint64_t a = 0, b = 0;
  std::size_t len = 0;
  return grammar::parse_microdvd_frames(lines[i].text, a, b, len) ? Confidence::Exact : Confidence::Unknown;
}

Confidence match_subviewer(const std::vector<ProbeLine>& lines, std::size_t i) {
  return text::istarts_with(lead_trimmed(lines[i].text), "[INFORMATION]") ? Confidence::Exact
                                                                            : Confidence::Unknown;
}

Confidence match_srt(const std::vector<ProbeLine>& lines, std::size_t i) {
  if (!grammar::parse_srt_timing(lines[i].text)) return Confidence::Unknown;
  if (i > 0 && grammar::is_index_line(lines[i - 1].text)) return Confidence::Exact;
  return Confidence::Heuristic;
}

struct Probe {
  FormatId format;
  Matcher match;
};

constexpr Probe kProbeTable[] = {
    {FormatId::SsaAss, match_ssa},         {FormatId::Vtt, match_vtt},
    {FormatId::Sami, match_sami},          {FormatId::JacoSub, match_jacosub},
    {FormatId::MicroDvd, match_microdvd},  {FormatId::SubViewer, match_subviewer},
    {FormatId::Srt, match_srt},
};

}  // namespace

std::string_view confidence_name(Confidence c) noexcept {
  switch (c) {
    case Confidence::Exact: return "exact";
    case Confidence::Heuristic: return "heuristic";
    case Confidence::Unknown: return "unknown";
  }
  return "unknown";
}

ProbeResult detect_format(std::string_view source, std::size_t max_probe_lines) {
  if (max_probe_lines == 0) throw std::invalid_argument("max_probe_lines must be positive");
  const auto lines = probe_lines(source, max_probe_lines);
  for (const auto& probe : kProbeTable) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto c = probe.match(lines, i);
      if (c != Confidence::Unknown) {
        return {probe.format, c, Location{lines[i].number, lines[i].begin}};
      }
    }
  }
  return {};
}

}  // namespace subguard
