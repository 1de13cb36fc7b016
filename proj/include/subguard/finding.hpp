#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/model.hpp"

namespace subguard {

enum class RuleId { Script, ExtRes, ParamInj, Traversal, Hazard };
enum class Severity { Critical, High, Medium, Low };
enum class Verdict { Clean, Suspicious, Malicious };

std::string_view rule_name(RuleId rule) noexcept;  // "T-SCRIPT", ...
std::string_view severity_name(Severity s) noexcept;
std::string_view verdict_name(Verdict v) noexcept;

/// T-SCRIPT and T-TRAVERSAL are Critical, T-PARAMINJ and T-HAZARD High,
/// T-EXTRES Medium.
Severity default_severity(RuleId rule) noexcept;

struct Finding {
  RuleId rule = RuleId::Hazard;
  Severity severity = Severity::High;
  std::optional<std::string> cve;
  std::string message;
  std::optional<Location> location;  // set for findings inside a document
  std::optional<std::string> entry;  // set for findings about an archive entry

  static Finding at(RuleId rule, std::string message, std::optional<Location> location = std::nullopt,
                    std::optional<std::string> cve = std::nullopt);
  static Finding for_entry(RuleId rule, std::string message, std::string entry,
                           std::optional<std::string> cve = std::nullopt);

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Malicious iff a Critical finding is present, Suspicious iff any finding is.
Verdict verdict_of(const std::vector<Finding>& findings) noexcept;

}  // namespace subguard
