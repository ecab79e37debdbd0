// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/dom.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>

#include "ppkit/text.hpp"

namespace ppkit {

namespace {

constexpr std::array kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen",
    "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array kInlineElements = {
    "a", "abbr", "acronym", "b", "bdi", "bdo", "big", "cite", "code", "data",
    "del", "dfn", "em", "font", "i", "ins", "kbd", "label", "mark", "q", "s",
    "samp", "small", "span", "strike", "strong", "sub", "sup", "time", "tt",
    "u", "var"};

constexpr std::array kInvisibleElements = {
    "head", "script", "style", "template", "title", "noscript", "meta", "link"};

template <std::size_t N>
bool in_set(const std::array<const char*, N>& set, std::string_view tag) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return tag == s; });
}

bool is_raw_text(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "textarea" || tag == "title";
}

// Start tags that implicitly close an open <p>.
bool closes_paragraph(std::string_view tag) {
  static constexpr std::array kTags = {
      "address", "article", "aside", "blockquote", "details", "div", "dl",
      "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
      "h4", "h5", "h6", "header", "hr", "main", "menu", "nav", "ol", "p",
      "pre", "section", "table", "ul"};
  return in_set(kTags, tag);
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

const std::unordered_map<std::string_view, std::uint32_t>& named_entities() {
  static const std::unordered_map<std::string_view, std::uint32_t> kEntities = {
      {"amp", '&'},      {"lt", '<'},        {"gt", '>'},       {"quot", '"'},
      {"apos", '\''},    {"nbsp", ' '},      {"copy", 0xA9},    {"reg", 0xAE},
      {"trade", 0x2122}, {"mdash", 0x2014},  {"ndash", 0x2013}, {"hellip", 0x2026},
      {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C}, {"rdquo", 0x201D},
      {"bull", 0x2022},  {"middot", 0xB7},   {"sect", 0xA7},    {"para", 0xB6},
      {"euro", 0x20AC},  {"pound", 0xA3},    {"laquo", 0xAB},   {"raquo", 0xBB},
      {"eacute", 0xE9},  {"egrave", 0xE8},   {"uuml", 0xFC},    {"ouml", 0xF6},
      {"auml", 0xE4},    {"szlig", 0xDF},    {"ensp", ' '},     {"emsp", ' '},
      {"thinsp", ' '},   {"zwnj", 0x200C},   {"zwj", 0x200D}};
  return kEntities;
}

class HtmlParser {
 public:
  explicit HtmlParser(std::string_view html) : src_(html) {
    stack_.push_back(&root_);
    root_.tag = "#document";
  }

  DomNode run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        if (src_.compare(pos_, 4, "<!--") == 0) {
          skip_past("-->", pos_ + 4);
        } else if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '!' || src_[pos_ + 1] == '?')) {
          skip_past(">", pos_ + 1);
        } else if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
          parse_end_tag();
        } else if (pos_ + 1 < src_.size() && is_name_start(src_[pos_ + 1])) {
          parse_start_tag();
        } else {
          append_text("<");
          ++pos_;
        }
      } else {
        auto next = src_.find('<', pos_);
        if (next == std::string_view::npos) next = src_.size();
        append_text(decode_entities(src_.substr(pos_, next - pos_)));
        pos_ = next;
      }
    }
    return std::move(root_);
  }

 private:
  static bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  static bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == ':' ||
           c == '.';
  }

  DomNode& current() { return *stack_.back(); }

  void skip_past(std::string_view terminator, std::size_t from) {
    auto end = src_.find(terminator, from);
    pos_ = end == std::string_view::npos ? src_.size() : end + terminator.size();
  }

  void append_text(std::string s) {
    if (s.empty()) return;
    auto& children = current().children;
    if (!children.empty() && children.back().is_text()) {
      children.back().text += s;
    } else {
      children.push_back(DomNode::text_node(std::move(s)));
    }
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    return text::to_lower(src_.substr(start, pos_ - start));
  }

  void skip_spaces() {
    while (pos_ < src_.size() && (text::is_space(src_[pos_]) || src_[pos_] == '/')) ++pos_;
  }

  bool is_open(std::string_view tag) const {
    return std::any_of(stack_.begin() + 1, stack_.end(),
                       [&](const DomNode* n) { return n->tag == tag; });
  }

  void close_through(std::string_view tag) {
    while (stack_.size() > 1) {
      bool match = stack_.back()->tag == tag;
      stack_.pop_back();
      if (match) return;
    }
  }

  // Closes an open element of the given tag unless a boundary element sits
  // above it on the stack.
  void close_implied(std::initializer_list<std::string_view> tags,
                     std::initializer_list<std::string_view> boundaries) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const auto& t = stack_[i]->tag;
      if (std::find(boundaries.begin(), boundaries.end(), t) != boundaries.end()) return;
      if (std::find(tags.begin(), tags.end(), t) != tags.end()) {
        stack_.resize(i);
        return;
      }
    }
  }

  void parse_start_tag() {
    ++pos_;  // '<'
    DomNode node;
    node.tag = read_name();
    bool self_closing = false;
    while (pos_ < src_.size()) {
      while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        self_closing = pos_ + 1 < src_.size() && src_[pos_ + 1] == '>';
        ++pos_;
        continue;
      }
      std::size_t name_start = pos_;
      while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '=' &&
             src_[pos_] != '>' && src_[pos_] != '/') {
        ++pos_;
      }
      std::string name = text::to_lower(src_.substr(name_start, pos_ - name_start));
      if (name.empty()) {
        ++pos_;
        continue;
      }
      while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
      std::string value;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          char q = src_[pos_++];
          auto end = src_.find(q, pos_);
          if (end == std::string_view::npos) end = src_.size();
          value = decode_entities(src_.substr(pos_, end - pos_));
          pos_ = std::min(end + 1, src_.size());
        } else {
          std::size_t vstart = pos_;
          while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
          value = decode_entities(src_.substr(vstart, pos_ - vstart));
        }
      }
      node.attrs.try_emplace(std::move(name), std::move(value));
    }

    const std::string tag = node.tag;
    if (closes_paragraph(tag)) close_implied({"p"}, {"button", "table", "td", "th", "li"});
    if (tag == "li") close_implied({"li"}, {"ul", "ol", "menu"});
    if (tag == "dt" || tag == "dd") close_implied({"dt", "dd"}, {"dl"});
    if (tag == "tr") close_implied({"tr", "td", "th"}, {"table", "tbody", "thead", "tfoot"});
    if (tag == "td" || tag == "th") close_implied({"td", "th"}, {"tr", "table"});
    if (tag == "option") close_implied({"option"}, {"select", "datalist"});

    current().children.push_back(std::move(node));
    DomNode* inserted = &current().children.back();
    if (is_void_element(tag) || self_closing) return;

    if (is_raw_text(tag)) {
      const std::string closing = "</" + tag;
      std::size_t end = pos_;
      while (true) {
        end = src_.find("</", end);
        if (end == std::string_view::npos) break;
        if (text::starts_with_ci(src_.substr(end), closing)) break;
        end += 2;
      }
      if (end == std::string_view::npos) end = src_.size();
      auto body = src_.substr(pos_, end - pos_);
      if (!body.empty()) {
        inserted->children.push_back(DomNode::text_node(
            tag == "title" || tag == "textarea" ? decode_entities(body) : std::string(body)));
      }
      pos_ = end;
      if (pos_ < src_.size()) skip_past(">", pos_);
      return;
    }
    stack_.push_back(inserted);
  }

  void parse_end_tag() {
    pos_ += 2;
    std::string tag = read_name();
    skip_past(">", pos_);
    if (tag.empty() || !is_open(tag)) return;
    close_through(tag);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  DomNode root_;
  // Pointers into the tree; only the back element's children are mutated,
  // so pointers to ancestors stay valid.
  std::vector<DomNode*> stack_;
};

void collect_visible(const DomNode& node, std::string& out) {
  if (node.is_text()) {
    out += node.text;
    return;
  }
  if (is_invisible_element(node.tag)) return;
  const bool block = !is_inline_element(node.tag) && node.tag != "#document";
  if (block || node.tag == "br") out.push_back(' ');
  for (const auto& c : node.children) collect_visible(c, out);
  if (block) out.push_back(' ');
}

std::string escape_html(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out.push_back(c);
    }
  }
  return out;
}

void serialize_into(const DomNode& node, std::string& out) {
  if (node.is_text()) {
    out += escape_html(node.text, false);
    return;
  }
  if (node.tag == "#document") {
    for (const auto& c : node.children) serialize_into(c, out);
    return;
  }
  out += '<';
  out += node.tag;
  for (const auto& [k, v] : node.attrs) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape_html(v, true);
    out += '"';
  }
  out += '>';
  if (is_void_element(node.tag)) return;
  const bool raw = node.tag == "script" || node.tag == "style";
  for (const auto& c : node.children) {
    if (raw && c.is_text()) {
      out += c.text;
    } else {
      serialize_into(c, out);
    }
  }
  out += "</";
  out += node.tag;
  out += '>';
}

const DomNode* find_first(const DomNode& node, std::string_view tag) {
  if (node.tag == tag) return &node;
  for (const auto& c : node.children) {
    if (auto* f = find_first(c, tag)) return f;
  }
  return nullptr;
}

}  // namespace

DomNode DomNode::element(std::string tag, std::vector<DomNode> children) {
  DomNode n;
  n.tag = std::move(tag);
  n.children = std::move(children);
  return n;
}

DomNode DomNode::text_node(std::string text) {
  DomNode n;
  n.tag = "#text";
  n.text = std::move(text);
  return n;
}

std::string DomNode::attr(std::string_view name) const {
  auto it = attrs.find(std::string(name));
  return it == attrs.end() ? std::string() : it->second;
}

std::string DomNode::direct_text() const {
  std::string out;
  for (const auto& c : children) {
    if (c.is_text()) out += c.text;
  }
  return out;
}

std::size_t DomNode::element_child_count() const {
  return static_cast<std::size_t>(
      std::count_if(children.begin(), children.end(), [](const DomNode& c) { return c.is_element(); }));
}

DomNode parse_html(std::string_view html) { return HtmlParser(html).run(); }

const DomNode& find_body(const DomNode& document) {
  if (auto* body = find_first(document, "body")) return *body;
  if (auto* html = find_first(document, "html")) return *html;
  return document;
}

std::string serialize_html(const DomNode& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    auto name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      auto digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (!ok) {
        out.push_back('&');
        continue;
      }
      if (cp == 0xA0) cp = ' ';
      append_utf8(out, cp);
      i = semi;
      continue;
    }
    const auto& table = named_entities();
    auto it = table.find(name);
    if (it == table.end()) {
      out.push_back('&');
      continue;
    }
    append_utf8(out, it->second);
    i = semi;
  }
  return out;
}

bool is_void_element(std::string_view tag) { return in_set(kVoidElements, tag); }
bool is_inline_element(std::string_view tag) { return in_set(kInlineElements, tag); }
bool is_invisible_element(std::string_view tag) { return in_set(kInvisibleElements, tag); }

std::string visible_text(const DomNode& node) {
  std::string raw;
  collect_visible(node, raw);
  return text::collapse_whitespace(raw);
}

}  // namespace ppkit
