#pragma once

// Attribute-value checks shared by the sanitizer and the scanner.

#include <string>
#include <string_view>
#include <vector>

namespace subguard::url {

/// Lowercased, with whitespace and control characters removed, so that
/// "JaVa\tScript :" and "javascript:" compare equal.
std::string normalize(std::string_view value);

bool is_script_url(std::string_view value);
/// scheme://... or protocol-relative //host...
bool is_absolute(std::string_view value);
bool is_http(std::string_view value);

/// http(s) URLs appearing anywhere in `text`, as written.
std::vector<std::string> find_http_urls(std::string_view text);

/// on* attribute names.
bool is_event_handler(std::string_view lowercase_name) noexcept;

}  // namespace subguard::url
