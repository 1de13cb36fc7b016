#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "subguard/model.hpp"

namespace subguard {

enum class Confidence { Exact, Heuristic, Unknown };

std::string_view confidence_name(Confidence c) noexcept;

struct ProbeResult {
  FormatId format = FormatId::Unknown;
  Confidence confidence = Confidence::Unknown;
  std::optional<Location> matched_line;
};

/// Probes at most `max_probe_lines` lines (after a UTF-8 BOM) and returns the
/// first format in table order SSA/ASS, WebVTT, SAMI, JACOsub, MicroDVD,
/// SubViewer, SRT whose signature appears. Throws std::invalid_argument when
/// max_probe_lines is 0.
ProbeResult detect_format(std::string_view source, std::size_t max_probe_lines = 128);

}  // namespace subguard
