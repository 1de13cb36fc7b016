#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/archive.hpp"
#include "subguard/finding.hpp"
#include "subguard/limits.hpp"
#include "subguard/model.hpp"
#include "subguard/sanitize.hpp"

namespace subguard {

struct ThreatReport {
  std::string target;
  std::vector<Finding> findings;
  std::uint64_t scanned_bytes = 0;
  Verdict verdict = Verdict::Clean;
  /// Set when the input could not be parsed at all (unknown format, or a
  /// detect-only format); the CLI maps this to exit code 2.
  std::string note;
  bool unparsed = false;
};

/// T-SCRIPT, T-EXTRES and T-HAZARD over a parsed document.
std::vector<Finding> scan_document(const SubtitleDocument& doc);

/// T-PARAMINJ for names that would smuggle parameters through a naive
/// split on '&'.
std::vector<Finding> scan_filename(std::string_view name);

/// T-TRAVERSAL for escaping entries, T-PARAMINJ for injected names,
/// T-HAZARD for symlinks and duplicates.
std::vector<Finding> scan_archive(const std::vector<ArchiveEntrySummary>& listing);

struct ScanOptions {
  ParseLimits limits;
  /// Applied to every cue before scanning.
  SanitizePolicy policy = SanitizePolicy::none();
};

/// Scans one input: zip archives (by magic) get their listing and every
/// subtitle entry scanned; anything else is detected, parsed and scanned.
/// The base name of `target` always goes through scan_filename.
ThreatReport scan_bytes(std::string_view target, std::string_view bytes, const ScanOptions& options = {});

/// {target, verdict, scanned_bytes, findings:[{rule_id, severity, cve,
/// message, line, byte_offset}]} with a fixed key order, on one line.
std::string report_to_json(const ThreatReport& report);

}  // namespace subguard
