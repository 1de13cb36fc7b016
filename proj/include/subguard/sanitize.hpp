#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/model.hpp"

namespace subguard {

enum class PolicyName { None, Partial, Strict };

struct SanitizePolicy {
  PolicyName name = PolicyName::Strict;
  std::set<std::string> allowed_tags;
  std::map<std::string, std::set<std::string>> allowed_attributes;
  bool allow_external_urls = false;

  /// Identity transform.
  static SanitizePolicy none();
  /// strict() plus img[src] and a[href]; external URLs allowed.
  static SanitizePolicy partial();
  /// b, i, u, font[face,size,color]; no external URLs.
  static SanitizePolicy strict();
  static std::optional<SanitizePolicy> from_name(std::string_view name);
};

std::string_view policy_name(PolicyName p) noexcept;

/// One removal. `path` addresses the node in the input forest as child
/// indices joined by '/', e.g. "1/0".
struct SanitizeFinding {
  enum class Kind { ElementRemoved, EventHandler, ScriptUrl, ExternalUrl, AttributeRemoved };
  Kind kind;
  std::string path;
  std::string tag;
  std::string attribute;  // empty for ElementRemoved
  std::string message;

  friend bool operator==(const SanitizeFinding&, const SanitizeFinding&) = default;
};

std::string_view sanitize_kind_name(SanitizeFinding::Kind k) noexcept;

struct SanitizeResult {
  std::vector<SpanNode> content;
  std::vector<SanitizeFinding> findings;
};

/// Removes every element, attribute and URL the policy does not allow.
/// Removed elements are replaced by their (sanitized) children, so the text
/// is never altered. Idempotent.
SanitizeResult sanitize(const std::vector<SpanNode>& content, const SanitizePolicy& policy);

}  // namespace subguard
