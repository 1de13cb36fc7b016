#include "url.hpp"

#include "subguard/text.hpp"

namespace subguard::url {

std::string normalize(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7f) continue;
    out.push_back(text::to_lower(c));
  }
  return out;
}

bool is_script_url(std::string_view value) {
  const auto n = normalize(value);
  return n.starts_with("javascript:") || n.starts_with("vbscript:");
}

bool is_absolute(std::string_view value) {
  const auto n = normalize(value);
  if (n.starts_with("//")) return true;
  std::size_t i = 0;
  if (n.empty() || !text::is_alpha(n[0])) return false;
  while (i < n.size() && (text::is_alnum(n[i]) || n[i] == '+' || n[i] == '-' || n[i] == '.')) ++i;
  return n.compare(i, 3, "://") == 0;
}

bool is_http(std::string_view value) {
  const auto n = normalize(value);
  return n.starts_with("http://") || n.starts_with("https://");
}

std::vector<std::string> find_http_urls(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text::ifind(s, "http", pos)) != std::string_view::npos) {
    std::size_t i = pos + 4;
    if (i < s.size() && (s[i] == 's' || s[i] == 'S')) ++i;
    if (s.compare(i, 3, "://") != 0) {
      pos += 4;
      continue;
    }
    i += 3;
    const std::size_t host = i;
    while (i < s.size() && !text::is_space(s[i]) && s[i] != '"' && s[i] != '\'' && s[i] != '<' &&
           s[i] != '>' && s[i] != ')' && s[i] != ';')
      ++i;
    if (i > host) out.emplace_back(s.substr(pos, i - pos));
    pos = i;
  }
  return out;
}

bool is_event_handler(std::string_view name) noexcept {
  return name.size() > 2 && name[0] == 'o' && name[1] == 'n';
}

}  // namespace subguard::url
