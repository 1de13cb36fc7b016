#include "subguard/markup.hpp"

#include <algorithm>
#include <array>

#include "subguard/cursor.hpp"
#include "subguard/text.hpp"

namespace subguard {

namespace {

constexpr std::array<std::string_view, 7> kKnownTags = {"b", "i", "u", "font", "img", "a", "span"};

bool is_attr_name_char(char c) noexcept {
  return !text::is_space(c) && c != '=' && c != '>' && c != '/' && c != '"' && c != '\'';
}

bool is_void_tag(std::string_view name) noexcept { return name == "img"; }

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      std::size_t len = 0;
      if (auto d = decode_entity_at(s, i, len)) {
        out += *d;
        i += len;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

// Skips to just past the closing quote. False when the input ends first.
bool skip_quoted(ByteCursor& cur, char quote) {
  const auto idx = cur.rest().find(quote);
  if (idx == std::string_view::npos) {
    cur.seek(cur.size());
    return false;
  }
  cur.seek(cur.pos() + idx + 1);
  return true;
}

struct LexedTag {
  std::vector<Attribute> attributes;
  std::vector<std::string> duplicates;
  bool self_closing = false;
};

// Lexes attributes with the cursor just past the tag name. Returns true with
// the cursor just past '>' when the tag terminates, false at end of input.
bool lex_attributes(ByteCursor& cur, LexedTag& out) {
  auto emit = [&out](std::string name, std::string value) {
    const bool dup = std::any_of(out.attributes.begin(), out.attributes.end(),
                                 [&](const Attribute& a) { return a.first == name; });
    if (dup) {
      out.duplicates.push_back(std::move(name));
    } else {
      out.attributes.emplace_back(std::move(name), std::move(value));
    }
  };
  auto skip_spaces = [&cur] {
    while (!cur.at_end() && text::is_space(cur.peek())) cur.advance();
  };

  bool last_was_slash = false;
  while (!cur.at_end()) {
    const char c = cur.peek();
    if (text::is_space(c)) {
      cur.advance();
      last_was_slash = false;
      continue;
    }
    if (c == '/') {
      cur.advance();
      last_was_slash = true;
      continue;
    }
    if (c == '>') {
      cur.advance();
      out.self_closing = last_was_slash;
      return true;
    }
    last_was_slash = false;
    if (c == '"' || c == '\'') {
      cur.advance();
      if (!skip_quoted(cur, c)) return false;
      continue;
    }

    std::string name;
    if (c == '=') {
      cur.advance();  // stray '=': its value is read and discarded
    } else {
      const std::size_t begin = cur.pos();
      while (!cur.at_end() && is_attr_name_char(cur.peek())) cur.advance();
      name = text::lower(cur.slice(begin, cur.pos()));
      skip_spaces();
      if (cur.at_end()) return false;
      if (cur.peek() != '=') {
        emit(std::move(name), {});
        continue;
      }
      cur.advance();
    }

    skip_spaces();
    if (cur.at_end()) return false;
    const char v = cur.peek();
    if (v == '>') {
      if (!name.empty()) emit(std::move(name), {});
      continue;
    }
    std::string_view raw_value;
    if (v == '"' || v == '\'') {
      cur.advance();
      const std::size_t begin = cur.pos();
      if (!skip_quoted(cur, v)) return false;
      raw_value = cur.slice(begin, cur.pos() - 1);
    } else {
      const std::size_t begin = cur.pos();
      while (!cur.at_end() && !text::is_space(cur.peek()) && cur.peek() != '>') cur.advance();
      if (cur.at_end()) return false;
      raw_value = cur.slice(begin, cur.pos());
    }
    if (!name.empty()) emit(std::move(name), decode_entities(raw_value));
  }
  return false;
}

// Reads [A-Za-z][A-Za-z0-9]* at the cursor.
std::string read_tag_name(ByteCursor& cur) {
  const std::size_t begin = cur.pos();
  while (!cur.at_end() && text::is_alnum(cur.peek())) cur.advance();
  return text::lower(cur.slice(begin, cur.pos()));
}

bool ends_tag_name(char c) noexcept { return text::is_space(c) || c == '/' || c == '>'; }

class TreeBuilder {
 public:
  TreeBuilder(MarkupResult& result, const ParseLimits& limits) : result_(result), limits_(limits) {}

  std::vector<SpanNode>& container() { return open_.empty() ? result_.nodes : open_.back()->children; }

  void append_text(std::string_view s) {
    if (s.empty()) return;
    auto& c = container();
    if (!c.empty() && c.back().is_text()) {
      c.back().as_text().content.append(s);
    } else {
      c.push_back(SpanNode::text(std::string(s)));
    }
  }

  void warn(WarningCode code, std::string message, std::size_t offset) {
    result_.warnings.push_back(MarkupWarning{code, std::move(message), offset});
  }

  void open_element(std::string name, LexedTag tag, std::size_t offset) {
    for (auto& dup : tag.duplicates) {
      warn(WarningCode::DuplicateAttribute, "duplicate attribute '" + dup + "' on <" + name + ">",
           offset);
    }
    auto& vec = container();
    const bool leaf = is_void_tag(name) || tag.self_closing;
    const bool too_deep = !leaf && open_.size() >= limits_.max_span_depth;
    if (too_deep) {
      warn(WarningCode::SpanDepthExceeded,
           "<" + name + "> nested deeper than " + std::to_string(limits_.max_span_depth), offset);
    }
    vec.push_back(SpanNode::element(std::move(name), std::move(tag.attributes)));
    if (!leaf && !too_deep) open_.push_back(&vec.back().as_element());
  }

  void close_element(const std::string& name, std::size_t offset) {
    for (std::size_t k = open_.size(); k-- > 0;) {
      if (open_[k]->tag == name) {
        open_.resize(k);
        return;
      }
    }
    warn(WarningCode::StrayEndTag, "</" + name + "> without a matching open tag", offset);
  }

  void finish(std::size_t end_offset) {
    for (const auto* e : open_) {
      warn(WarningCode::UnclosedTag, "<" + e->tag + "> never closed", end_offset);
    }
    open_.clear();
  }

 private:
  MarkupResult& result_;
  const ParseLimits& limits_;
  std::vector<ElementNode*> open_;
};

}  // namespace

bool is_known_tag(std::string_view lowercase_name) noexcept {
  return std::find(kKnownTags.begin(), kKnownTags.end(), lowercase_name) != kKnownTags.end();
}

std::optional<std::string> decode_entity_at(std::string_view text, std::size_t pos,
                                            std::size_t& length) {
  if (pos >= text.size() || text[pos] != '&') return std::nullopt;
  // Longest reference is "&#x10FFFF;"; never look further than that.
  const auto window = text.substr(pos + 1, 10);
  const auto rel = window.find(';');
  if (rel == std::string_view::npos) return std::nullopt;
  const std::size_t semi = pos + 1 + rel;
  const std::string_view body = text.substr(pos + 1, semi - pos - 1);
  length = semi - pos + 1;

  static constexpr std::pair<std::string_view, std::string_view> kNamed[] = {
      {"lt", "<"}, {"gt", ">"}, {"amp", "&"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", "\xC2\xA0"},
  };
  for (const auto& [name, value] : kNamed) {
    if (body == name) return std::string(value);
  }
  if (body.size() < 2 || body[0] != '#') return std::nullopt;

  char32_t cp = 0;
  if (body[1] == 'x' || body[1] == 'X') {
    const auto hex = body.substr(2);
    if (hex.empty() || hex.size() > 6) return std::nullopt;
    for (char c : hex) {
      int d;
      if (text::is_digit(c)) {
        d = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        d = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        d = c - 'A' + 10;
      } else {
        return std::nullopt;
      }
      cp = cp * 16 + static_cast<char32_t>(d);
    }
  } else {
    const auto dec = body.substr(1);
    std::uint64_t v = 0;
    if (!text::parse_uint(dec, v, 7)) return std::nullopt;
    cp = static_cast<char32_t>(v);
  }
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  std::string out;
  text::append_utf8(out, cp);
  return out;
}

MarkupResult parse_markup(std::string_view text, const ParseLimits& limits) {
  MarkupResult result;
  TreeBuilder tree(result, limits);
  ByteCursor cur(text);

  while (!cur.at_end()) {
    const char c = cur.peek();
    if (c == '&') {
      std::size_t len = 0;
      if (auto decoded = decode_entity_at(text, cur.pos(), len)) {
        tree.append_text(*decoded);
        cur.advance(len);
      } else {
        tree.append_text("&");
        cur.advance();
      }
      continue;
    }
    if (c != '<') {
      auto stop = text.find_first_of("<&", cur.pos());
      if (stop == std::string_view::npos) stop = text.size();
      tree.append_text(cur.slice(cur.pos(), stop));
      cur.seek(stop);
      continue;
    }

    const std::size_t tag_start = cur.pos();
    // Lookahead on a private cursor; the main cursor only moves once the
    // construct is accepted.
    ByteCursor look(text.substr(tag_start));
    look.advance();  // '<'

    if (look.peek_or_nul() == '/' && text::is_alpha(look.peek_or_nul(1))) {
      look.advance();
      const std::string name = read_tag_name(look);
      while (!look.at_end() && text::is_space(look.peek())) look.advance();
      if (!look.at_end() && look.peek() == '>') {
        if (is_known_tag(name)) {
          look.advance();
          tree.close_element(name, tag_start);
          cur.advance(look.pos());
          continue;
        }
        tree.warn(WarningCode::UnknownTag, "unknown tag </" + name + ">", tag_start);
      }
      tree.append_text("<");
      cur.advance();
      continue;
    }

    if (!text::is_alpha(look.peek_or_nul())) {
      tree.append_text("<");
      cur.advance();
      continue;
    }

    std::string name = read_tag_name(look);
    if (!is_known_tag(name)) {
      tree.warn(WarningCode::UnknownTag, "unknown tag <" + name + ">", tag_start);
      tree.append_text("<");
      cur.advance();
      continue;
    }
    if (!look.at_end() && !ends_tag_name(look.peek())) {
      tree.append_text("<");
      cur.advance();
      continue;
    }

    LexedTag tag;
    if (look.at_end() || !lex_attributes(look, tag)) {
      tree.warn(WarningCode::UnterminatedTag, "<" + name + " reaches end of input before '>'",
                tag_start);
      tree.append_text(text.substr(tag_start));
      cur.seek(text.size());
      break;
    }
    tree.open_element(std::move(name), std::move(tag), tag_start);
    cur.advance(look.pos());
  }
  tree.finish(text.size());
  return result;
}

namespace {

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '&') {
      std::size_t len = 0;
      // Only escape ampersands that would otherwise decode on the way back in.
      out += decode_entity_at(s, i, len) ? "&amp;" : "&";
    } else if (c == '<' && !attribute) {
      out += "&lt;";
    } else if (c == '"' && attribute) {
      out += "&quot;";
    } else {
      out += c;
    }
  }
}

void render_into(std::string& out, const std::vector<SpanNode>& nodes) {
  for (const auto& n : nodes) {
    if (n.is_text()) {
      escape_into(out, n.as_text().content, false);
      continue;
    }
    const auto& e = n.as_element();
    out += '<';
    out += e.tag;
    for (const auto& [name, value] : e.attributes) {
      out += ' ';
      out += name;
      out += "=\"";
      escape_into(out, value, true);
      out += '"';
    }
    if (e.children.empty() && !is_void_tag(e.tag)) {
      // Self-closing keeps an empty element a leaf even at the depth limit.
      out += "/>";
      continue;
    }
    out += '>';
    render_into(out, e.children);
    if (!is_void_tag(e.tag)) {
      out += "</";
      out += e.tag;
      out += '>';
    }
  }
}

// Position of the '>' closing a start tag whose name ends at `i`, or npos.
std::size_t find_tag_end(std::string_view s, std::size_t i) {
  enum class State { Outside, AfterEq, Quoted, Unquoted } state = State::Outside;
  char quote = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    switch (state) {
      case State::Outside:
        if (c == '>') return i;
        if (c == '"' || c == '\'') {
          quote = c;
          state = State::Quoted;
        } else if (c == '=') {
          state = State::AfterEq;
        }
        break;
      case State::AfterEq:
        if (text::is_space(c)) break;
        if (c == '>') return i;
        if (c == '"' || c == '\'') {
          quote = c;
          state = State::Quoted;
        } else {
          state = State::Unquoted;
        }
        break;
      case State::Quoted:
        if (c == quote) state = State::Outside;
        break;
      case State::Unquoted:
        if (c == '>') return i;
        if (text::is_space(c)) state = State::Outside;
        break;
    }
  }
  return std::string_view::npos;
}

std::size_t name_end(std::string_view s, std::size_t i) {
  while (i < s.size() && text::is_alnum(s[i])) ++i;
  return i;
}

}  // namespace

std::string render_markup(const std::vector<SpanNode>& nodes) {
  std::string out;
  render_into(out, nodes);
  return out;
}

std::string strip_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '&') {
      std::size_t len = 0;
      if (auto d = decode_entity_at(s, i, len)) {
        out += *d;
        i += len;
      } else {
        out += '&';
        ++i;
      }
      continue;
    }
    if (c != '<') {
      out += c;
      ++i;
      continue;
    }
    const bool closing = i + 1 < s.size() && s[i + 1] == '/';
    if (closing && i + 2 < s.size() && text::is_alpha(s[i + 2])) {
      const std::size_t ne = name_end(s, i + 2);
      std::size_t j = ne;
      while (j < s.size() && text::is_space(s[j])) ++j;
      if (j < s.size() && s[j] == '>' && is_known_tag(text::lower(s.substr(i + 2, ne - i - 2)))) {
        i = j + 1;
        continue;
      }
      out += '<';
      ++i;
      continue;
    }
    if (i + 1 < s.size() && text::is_alpha(s[i + 1])) {
      const std::size_t ne = name_end(s, i + 1);
      if (is_known_tag(text::lower(s.substr(i + 1, ne - i - 1)))) {
        if (ne == s.size()) {
          out.append(s.substr(i));
          break;
        }
        if (ends_tag_name(s[ne])) {
          const std::size_t gt = find_tag_end(s, ne);
          if (gt == std::string_view::npos) {
            out.append(s.substr(i));
            break;
          }
          i = gt + 1;
          continue;
        }
      }
    }
    out += '<';
    ++i;
  }
  return out;
}

std::vector<RawTag> find_embedded_tags(std::string_view text) {
  std::vector<RawTag> tags;
  ByteCursor cur(text);
  while (!cur.at_end()) {
    const auto lt = cur.rest().find('<');
    if (lt == std::string_view::npos) break;
    cur.advance(lt);
    const std::size_t start = cur.pos();
    ByteCursor look(text.substr(start));
    look.advance();
    const bool closing = look.peek_or_nul() == '/';
    if (closing) look.advance();
    if (!text::is_alpha(look.peek_or_nul())) {
      cur.advance();
      continue;
    }
    RawTag tag;
    tag.name = read_tag_name(look);
    tag.closing = closing;
    tag.offset = start;
    if (!look.at_end() && !ends_tag_name(look.peek())) {
      cur.advance();
      continue;
    }
    LexedTag lexed;
    if (look.at_end() || !lex_attributes(look, lexed)) break;
    tag.attributes = std::move(lexed.attributes);
    tags.push_back(std::move(tag));
    cur.advance(look.pos());
  }
  return tags;
}

}  // namespace subguard
