#include "subguard/threatscan.hpp"

#include <map>

#include <json.hpp>

#include "subguard/detect.hpp"
#include "subguard/error.hpp"
#include "subguard/markup.hpp"
#include "subguard/parsers.hpp"
#include "url.hpp"

namespace subguard {

namespace {

struct HazardRule {
  WarningCode code;
  const char* cve;
};

constexpr HazardRule kHazards[] = {
    {WarningCode::UnterminatedTag, "CVE-2017-8310"},
    {WarningCode::TruncatedEscape, "CVE-2017-8311"},
    {WarningCode::ShiftOutOfRange, "CVE-2017-8312"},
    {WarningCode::DirectiveUnterminated, "CVE-2017-8313"},
};

bool is_fetching_attribute(std::string_view name) {
  return name == "src" || name == "href" || name == "data" || name == "background" || name == "poster";
}

void check_tag(std::string_view tag, const std::vector<Attribute>& attributes, const Location& where,
               std::string_view origin, std::vector<Finding>& out) {
  if (tag == "script") out.push_back(Finding::at(RuleId::Script, std::string(origin) + "<script> element", where));
  for (const auto& [name, value] : attributes) {
    if (url::is_event_handler(name)) {
      out.push_back(Finding::at(RuleId::Script,
                                std::string(origin) + "event handler '" + name + "' on <" + std::string(tag) + ">",
                                where));
    }
    if (url::is_script_url(value)) {
      out.push_back(Finding::at(RuleId::Script, std::string(origin) + "script URL in '" + name + "'", where));
    }
    if (is_fetching_attribute(name) && url::is_http(value)) {
      out.push_back(Finding::at(RuleId::ExtRes, std::string(origin) + "external resource " + value, where));
      continue;
    }
    for (const auto& u : url::find_http_urls(value)) {
      out.push_back(Finding::at(RuleId::ExtRes, std::string(origin) + "remote URL " + u + " in '" + name + "'",
                                where));
    }
  }
}

void scan_nodes(const std::vector<SpanNode>& nodes, const Location& where, std::vector<Finding>& out) {
  for (const auto& n : nodes) {
    if (n.is_text()) {
      // Literal text still becomes markup in a player that renders cue
      // text as HTML.
      for (const auto& tag : find_embedded_tags(n.as_text().content)) {
        if (tag.closing) continue;
        check_tag(tag.name, tag.attributes, where, "embedded ", out);
      }
      continue;
    }
    const auto& el = n.as_element();
    check_tag(el.tag, el.attributes, where, "", out);
    scan_nodes(el.children, where, out);
  }
}

bool has_injection_chars(std::string_view name) {
  if (name.find_first_of(std::string_view("&=?\n\r\0", 6)) != std::string_view::npos) return true;
  return name.find("%00") != std::string_view::npos;
}

std::string base_name(std::string_view path) {
  const auto slash = path.find_last_of('/');
  return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

bool is_zip(std::string_view bytes) {
  return bytes.starts_with(std::string_view("PK\x03\x04", 4)) ||
         bytes.starts_with(std::string_view("PK\x05\x06", 4));
}

// Scans a subtitle payload; returns false when it could not be parsed.
bool scan_subtitle(std::string_view bytes, const ScanOptions& options, std::vector<Finding>& out,
                   std::string& note) {
  if (bytes.empty()) return true;
  const auto probe = detect_format(bytes);
  if (!has_parser(probe.format)) {
    note = probe.format == FormatId::Unknown ? "unknown format"
                                             : std::string(format_name(probe.format)) + " is detected but not parsed";
    return false;
  }
  SubtitleDocument doc;
  try {
    doc = parse_as(probe.format, bytes, options.limits);
  } catch (const LimitExceeded& e) {
    out.push_back(Finding::at(RuleId::Hazard, std::string("parse limit exceeded: ") + e.what()));
    return true;
  }
  if (options.policy.name != PolicyName::None) {
    for (auto& cue : doc.cues) cue.content = sanitize(cue.content, options.policy).content;
  }
  auto found = scan_document(doc);
  out.insert(out.end(), found.begin(), found.end());
  return true;
}

}  // namespace

std::vector<Finding> scan_document(const SubtitleDocument& doc) {
  std::vector<Finding> out;
  for (const auto& cue : doc.cues) scan_nodes(cue.content, cue.raw_location, out);
  for (const auto& w : doc.warnings) {
    for (const auto& h : kHazards) {
      if (w.code == h.code) {
        out.push_back(Finding::at(RuleId::Hazard, std::string(warning_name(w.code)) + ": " + w.message,
                                  w.location, std::string(h.cve)));
      }
    }
  }
  return out;
}

std::vector<Finding> scan_filename(std::string_view name) {
  std::vector<Finding> out;
  if (has_injection_chars(name)) {
    out.push_back(Finding::at(RuleId::ParamInj, "file name carries query-string characters"));
  }
  return out;
}

std::vector<Finding> scan_archive(const std::vector<ArchiveEntrySummary>& listing) {
  std::vector<Finding> out;
  std::map<std::string, std::size_t> seen;
  for (const auto& e : listing) {
    if (e.escapes()) {
      out.push_back(Finding::for_entry(RuleId::Traversal, "entry path escapes the extraction root", e.raw_name,
                                       "CVE-2017-8314"));
    }
    if (has_injection_chars(e.raw_name)) {
      out.push_back(Finding::for_entry(RuleId::ParamInj, "entry name carries query-string characters", e.raw_name));
    }
    if (e.is_symlink) out.push_back(Finding::for_entry(RuleId::Hazard, "symlink entry", e.raw_name));
    if (e.normalized && ++seen[*e.normalized] == 2) {
      out.push_back(Finding::for_entry(RuleId::Hazard, "duplicate entry name", e.raw_name));
    }
  }
  return out;
}

ThreatReport scan_bytes(std::string_view target, std::string_view bytes, const ScanOptions& options) {
  ThreatReport report;
  report.target = std::string(target);
  report.scanned_bytes = bytes.size();
  report.findings = scan_filename(base_name(target));

  if (is_zip(bytes)) {
    std::vector<ArchiveEntrySummary> listing;
    try {
      listing = list_zip(bytes);
    } catch (const Error& e) {
      report.findings.push_back(Finding::at(RuleId::Hazard, std::string("unreadable archive: ") + e.what()));
      report.verdict = verdict_of(report.findings);
      return report;
    }
    auto found = scan_archive(listing);
    report.findings.insert(report.findings.end(), found.begin(), found.end());
    for (const auto& e : listing) {
      if (e.is_dir || e.is_symlink) continue;
      std::string data;
      try {
        data = read_entry(bytes, e);
      } catch (const Error&) {
        continue;  // unreadable members are not subtitles we could show
      }
      std::vector<Finding> inner;
      std::string note;
      scan_subtitle(data, options, inner, note);
      for (auto& f : inner) {
        f.entry = e.raw_name;
        report.findings.push_back(std::move(f));
      }
    }
  } else if (!scan_subtitle(bytes, options, report.findings, report.note)) {
    report.unparsed = true;
  }
  report.verdict = verdict_of(report.findings);
  return report;
}

std::string report_to_json(const ThreatReport& report) {
  nlohmann::ordered_json j;
  j["target"] = report.target;
  j["verdict"] = verdict_name(report.verdict);
  j["scanned_bytes"] = report.scanned_bytes;
  auto findings = nlohmann::ordered_json::array();
  for (const auto& f : report.findings) {
    nlohmann::ordered_json o;
    o["rule_id"] = rule_name(f.rule);
    o["severity"] = severity_name(f.severity);
    o["cve"] = f.cve ? nlohmann::ordered_json(*f.cve) : nlohmann::ordered_json(nullptr);
    o["message"] = f.message;
    o["line"] = f.location ? nlohmann::ordered_json(f.location->line) : nlohmann::ordered_json(nullptr);
    o["byte_offset"] =
        f.location ? nlohmann::ordered_json(f.location->byte_offset) : nlohmann::ordered_json(nullptr);
    o["entry"] = f.entry ? nlohmann::ordered_json(*f.entry) : nlohmann::ordered_json(nullptr);
    findings.push_back(std::move(o));
  }
  j["findings"] = std::move(findings);
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace subguard
