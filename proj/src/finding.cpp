#include "subguard/finding.hpp"

#include <algorithm>

namespace subguard {

std::string_view rule_name(RuleId rule) noexcept {
  switch (rule) {
    case RuleId::Script: return "T-SCRIPT";
    case RuleId::ExtRes: return "T-EXTRES";
    case RuleId::ParamInj: return "T-PARAMINJ";
    case RuleId::Traversal: return "T-TRAVERSAL";
    case RuleId::Hazard: return "T-HAZARD";
  }
  return "T-HAZARD";
}

std::string_view severity_name(Severity s) noexcept {
  switch (s) {
    case Severity::Critical: return "critical";
    case Severity::High: return "high";
    case Severity::Medium: return "medium";
    case Severity::Low: return "low";
  }
  return "low";
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Clean: return "clean";
    case Verdict::Suspicious: return "suspicious";
    case Verdict::Malicious: return "malicious";
  }
  return "clean";
}

Severity default_severity(RuleId rule) noexcept {
  switch (rule) {
    case RuleId::Script:
    case RuleId::Traversal: return Severity::Critical;
    case RuleId::ParamInj:
    case RuleId::Hazard: return Severity::High;
    case RuleId::ExtRes: return Severity::Medium;
  }
  return Severity::High;
}

Finding Finding::at(RuleId rule, std::string message, std::optional<Location> location,
                    std::optional<std::string> cve) {
  return Finding{rule, default_severity(rule), std::move(cve), std::move(message), location, std::nullopt};
}

Finding Finding::for_entry(RuleId rule, std::string message, std::string entry,
                           std::optional<std::string> cve) {
  return Finding{rule, default_severity(rule), std::move(cve), std::move(message), std::nullopt,
                 std::move(entry)};
}

Verdict verdict_of(const std::vector<Finding>& findings) noexcept {
  if (findings.empty()) return Verdict::Clean;
  const bool critical = std::any_of(findings.begin(), findings.end(),
                                    [](const Finding& f) { return f.severity == Severity::Critical; });
  return critical ? Verdict::Malicious : Verdict::Suspicious;
}

}  // namespace subguard
