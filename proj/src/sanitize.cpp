#include "subguard/sanitize.hpp"

#include "url.hpp"

namespace subguard {

namespace {

using Kind = SanitizeFinding::Kind;

struct Walker {
  const SanitizePolicy& policy;
  std::vector<SanitizeFinding> findings;

  void note(Kind kind, const std::string& path, const std::string& tag, const std::string& attr,
            std::string message) {
    findings.push_back({kind, path, tag, attr, std::move(message)});
  }

  // Handlers and script URLs are reported wherever they sit, even on an
  // element that is removed anyway: they are the part worth knowing about.
  bool dangerous(const ElementNode& el, const Attribute& a, const std::string& path) {
    bool hit = false;
    if (url::is_event_handler(a.first)) {
      note(Kind::EventHandler, path, el.tag, a.first, "event handler '" + a.first + "' removed");
      if (!policy.allow_external_urls) {
        for (const auto& u : url::find_http_urls(a.second)) {
          note(Kind::ExternalUrl, path, el.tag, a.first, "remote URL " + u + " inside handler removed");
        }
      }
      hit = true;
    }
    if (url::is_script_url(a.second)) {
      note(Kind::ScriptUrl, path, el.tag, a.first, "script URL in '" + a.first + "' removed");
      hit = true;
    }
    return hit;
  }

  void walk(const std::vector<SpanNode>& in, std::vector<SpanNode>& out, const std::string& prefix) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto& node = in[i];
      if (node.is_text()) {
        out.push_back(node);
        continue;
      }
      const auto& el = node.as_element();
      const std::string path = prefix.empty() ? std::to_string(i) : prefix + "/" + std::to_string(i);

      if (!policy.allowed_tags.count(el.tag)) {
        note(Kind::ElementRemoved, path, el.tag, "", "element <" + el.tag + "> removed");
        for (const auto& a : el.attributes) dangerous(el, a, path);
        walk(el.children, out, path);
        continue;
      }

      ElementNode kept;
      kept.tag = el.tag;
      const auto allowed = policy.allowed_attributes.find(el.tag);
      for (const auto& a : el.attributes) {
        if (dangerous(el, a, path)) continue;
        if (allowed == policy.allowed_attributes.end() || !allowed->second.count(a.first)) {
          note(Kind::AttributeRemoved, path, el.tag, a.first, "attribute '" + a.first + "' removed");
          continue;
        }
        if (!policy.allow_external_urls && url::is_absolute(a.second)) {
          note(Kind::ExternalUrl, path, el.tag, a.first, "external URL in '" + a.first + "' removed");
          continue;
        }
        kept.attributes.push_back(a);
      }
      walk(el.children, kept.children, path);
      out.push_back(SpanNode{std::move(kept)});
    }
  }
};

}  // namespace

SanitizePolicy SanitizePolicy::none() {
  SanitizePolicy p;
  p.name = PolicyName::None;
  p.allow_external_urls = true;
  return p;
}

SanitizePolicy SanitizePolicy::strict() {
  SanitizePolicy p;
  p.name = PolicyName::Strict;
  p.allowed_tags = {"b", "i", "u", "font"};
  p.allowed_attributes = {{"font", {"face", "size", "color"}}};
  p.allow_external_urls = false;
  return p;
}

SanitizePolicy SanitizePolicy::partial() {
  SanitizePolicy p = strict();
  p.name = PolicyName::Partial;
  p.allowed_tags.insert({"img", "a"});
  p.allowed_attributes["img"] = {"src"};
  p.allowed_attributes["a"] = {"href"};
  p.allow_external_urls = true;
  return p;
}

std::optional<SanitizePolicy> SanitizePolicy::from_name(std::string_view name) {
  if (name == "none") return none();
  if (name == "partial") return partial();
  if (name == "strict") return strict();
  return std::nullopt;
}

std::string_view policy_name(PolicyName p) noexcept {
  switch (p) {
    case PolicyName::None: return "none";
    case PolicyName::Partial: return "partial";
    case PolicyName::Strict: return "strict";
  }
  return "strict";
}

std::string_view sanitize_kind_name(SanitizeFinding::Kind k) noexcept {
  switch (k) {
    case Kind::ElementRemoved: return "element-removed";
    case Kind::EventHandler: return "event-handler";
    case Kind::ScriptUrl: return "script-url";
    case Kind::ExternalUrl: return "external-url";
    case Kind::AttributeRemoved: return "attribute-removed";
  }
  return "attribute-removed";
}

SanitizeResult sanitize(const std::vector<SpanNode>& content, const SanitizePolicy& policy) {
  if (policy.name == PolicyName::None) return {content, {}};
  Walker w{policy, {}};
  SanitizeResult result;
  w.walk(content, result.content, "");
  result.findings = std::move(w.findings);
  return result;
}

}  // namespace subguard
