// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/css_style.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "ppkit/text.hpp"

namespace ppkit {

namespace {

constexpr double kRootFontPx = 16.0;

std::string strip_comments(std::string_view css) {
  std::string out;
  out.reserve(css.size());
  for (std::size_t i = 0; i < css.size(); ++i) {
    if (css.compare(i, 2, "/*") == 0) {
      auto end = css.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      continue;
    }
    out.push_back(css[i]);
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  s = text::trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string strip_important(std::string_view value) {
  auto v = text::to_lower(text::trim(value));
  auto pos = v.find("!important");
  if (pos != std::string::npos) v = std::string(text::trim(std::string_view(v).substr(0, pos)));
  return v;
}

}  // namespace

Declarations parse_declarations(std::string_view body) {
  Declarations out;
  for (const auto& part : text::split(body, ';')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) continue;
    auto name = text::to_lower(text::trim(std::string_view(part).substr(0, colon)));
    auto value = text::trim(std::string_view(part).substr(colon + 1));
    if (!name.empty()) out[name] = std::string(value);
  }
  return out;
}

StyleSheet StyleSheet::parse(std::string_view css_in) {
  StyleSheet sheet;
  const std::string css = strip_comments(css_in);
  std::size_t pos = 0;
  std::size_t order = 0;
  while (pos < css.size()) {
    auto open = css.find('{', pos);
    if (open == std::string::npos) break;
    std::string_view prelude = text::trim(std::string_view(css).substr(pos, open - pos));
    // Find the matching brace; nested blocks belong to at-rules.
    int depth = 1;
    std::size_t close = open + 1;
    for (; close < css.size() && depth > 0; ++close) {
      if (css[close] == '{') ++depth;
      if (css[close] == '}') --depth;
    }
    std::string_view body = std::string_view(css).substr(open + 1, close - open - 2);
    pos = close;
    if (prelude.empty() || prelude.front() == '@') continue;

    const auto decls = parse_declarations(body);
    for (const auto& sel_raw : text::split(prelude, ',')) {
      auto sel = text::trim(sel_raw);
      if (sel.empty() || sel.find_first_of(" >+~[:*") != std::string_view::npos) continue;
      Rule rule;
      std::size_t i = 0;
      auto read_ident = [&]() {
        std::size_t start = i;
        while (i < sel.size() && sel[i] != '.' && sel[i] != '#') ++i;
        return std::string(sel.substr(start, i - start));
      };
      rule.tag = text::to_lower(read_ident());
      bool ok = true;
      while (i < sel.size()) {
        char kind = sel[i++];
        auto ident = read_ident();
        if (ident.empty()) {
          ok = false;
          break;
        }
        if (kind == '.') rule.classes.push_back(ident);
        else rule.id = ident;
      }
      if (!ok) continue;
      rule.specificity = (rule.id.empty() ? 0 : 100) +
                         10 * static_cast<int>(rule.classes.size()) + (rule.tag.empty() ? 0 : 1);
      rule.order = order++;
      rule.declarations = decls;
      sheet.rules_.push_back(std::move(rule));
    }
  }
  return sheet;
}

namespace {

void gather_style_text(const DomNode& node, std::string& out) {
  if (node.tag == "style") {
    for (const auto& c : node.children) {
      if (c.is_text()) out += c.text;
    }
    out += '\n';
    return;
  }
  for (const auto& c : node.children) {
    if (c.is_element()) gather_style_text(c, out);
  }
}

}  // namespace

StyleSheet StyleSheet::from_document(const DomNode& document) {
  std::string css;
  gather_style_text(document, css);
  return parse(css);
}

std::vector<const Declarations*> StyleSheet::matching(const DomNode& element) const {
  std::vector<const Rule*> hits;
  if (rules_.empty()) return {};
  const auto classes = text::split(element.attr("class"), ' ');
  const auto id = element.attr("id");
  for (const auto& r : rules_) {
    if (!r.tag.empty() && r.tag != element.tag) continue;
    if (!r.id.empty() && r.id != id) continue;
    bool all = std::all_of(r.classes.begin(), r.classes.end(), [&](const std::string& c) {
      return std::find(classes.begin(), classes.end(), c) != classes.end();
    });
    if (all) hits.push_back(&r);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Rule* a, const Rule* b) {
    return a->specificity != b->specificity ? a->specificity < b->specificity : a->order < b->order;
  });
  std::vector<const Declarations*> out;
  out.reserve(hits.size());
  for (auto* r : hits) out.push_back(&r->declarations);
  return out;
}

double heading_default_scale(std::string_view tag) {
  if (tag == "h1") return 2.0;
  if (tag == "h2") return 1.5;
  if (tag == "h3") return 1.17;
  if (tag == "h4") return 1.0;
  if (tag == "h5") return 0.83;
  if (tag == "h6") return 0.67;
  return 0.0;
}

double parse_font_weight(std::string_view raw, double parent_weight) {
  const auto v = strip_important(raw);
  if (v == "normal") return 400;
  if (v == "bold") return 700;
  if (v == "inherit" || v == "unset" || v == "initial") return v == "initial" ? 400 : parent_weight;
  if (v == "bolder") {
    if (parent_weight < 0) return -1;
    return parent_weight < 350 ? 400 : parent_weight < 550 ? 700 : 900;
  }
  if (v == "lighter") {
    if (parent_weight < 0) return -1;
    return parent_weight < 550 ? 100 : parent_weight < 750 ? 400 : 700;
  }
  double n = 0;
  if (parse_number(v, n) && n >= 1 && n <= 1000) return n;
  return -1;
}

double parse_font_size(std::string_view raw, double parent_px) {
  static const std::unordered_map<std::string, double> kKeywords = {
      {"xx-small", 9},  {"x-small", 10}, {"small", 13},    {"medium", 16},
      {"large", 18},    {"x-large", 24}, {"xx-large", 32}, {"xxx-large", 48}};
  const auto v = strip_important(raw);
  if (auto it = kKeywords.find(v); it != kKeywords.end()) return it->second;
  if (v == "inherit" || v == "unset") return parent_px;
  if (v == "initial") return kRootFontPx;
  if (v == "smaller") return parent_px < 0 ? -1 : parent_px / 1.2;
  if (v == "larger") return parent_px < 0 ? -1 : parent_px * 1.2;

  struct Unit {
    std::string_view suffix;
    double factor;
    bool relative;
  };
  static constexpr Unit kUnits[] = {{"rem", kRootFontPx, false}, {"px", 1.0, false},
                                    {"pt", 4.0 / 3.0, false},    {"em", 1.0, true},
                                    {"%", 0.01, true},           {"pc", 16.0, false}};
  for (const auto& u : kUnits) {
    if (v.size() > u.suffix.size() && v.ends_with(u.suffix)) {
      double n = 0;
      if (!parse_number(std::string_view(v).substr(0, v.size() - u.suffix.size()), n) || n < 0) {
        return -1;
      }
      if (!u.relative) return n * u.factor;
      return parent_px < 0 ? -1 : n * u.factor * parent_px;
    }
  }
  double n = 0;
  if (parse_number(v, n) && n == 0) return 0;
  return -1;
}

ComputedStyle cascade_style(const ComputedStyle& parent, const DomNode& el,
                            const StyleSheet& sheet) {
  ComputedStyle s = parent;
  if (double scale = heading_default_scale(el.tag); scale > 0) {
    s.font_size_px = parent.font_size_px < 0 ? -1 : scale * parent.font_size_px;
    s.font_weight = 700;
  }
  if (el.tag == "b" || el.tag == "strong" || el.tag == "th") s.font_weight = 700;
  if (el.tag == "small") s.font_size_px = parent.font_size_px < 0 ? -1 : parent.font_size_px / 1.2;
  if (el.tag == "big") s.font_size_px = parent.font_size_px < 0 ? -1 : parent.font_size_px * 1.2;
  if (el.tag == "i" || el.tag == "em" || el.tag == "cite" || el.tag == "var" ||
      el.tag == "dfn" || el.tag == "address") {
    s.italic = true;
  }
  if (el.tag == "u" || el.tag == "ins") s.underline = true;

  auto apply = [&](const Declarations& d) {
    for (const auto& [name, value] : d) {
      if (name == "font-size") {
        s.font_size_px = parse_font_size(value, parent.font_size_px);
      } else if (name == "font-weight") {
        s.font_weight = parse_font_weight(value, parent.font_weight);
      } else if (name == "font-style") {
        auto v = strip_important(value);
        s.italic = v == "italic" || v.starts_with("oblique");
      } else if (name == "text-decoration" || name == "text-decoration-line") {
        auto v = strip_important(value);
        if (v.find("underline") != std::string::npos) s.underline = true;
      } else if (name == "font") {
        // Shorthand: pick out the weight keyword and a size token.
        for (const auto& tok : text::split(text::to_lower(value), ' ')) {
          if (tok.empty()) continue;
          if (tok == "bold" || tok == "bolder" || tok == "lighter" ||
              (tok.size() == 3 && tok[1] == '0' && tok[2] == '0')) {
            s.font_weight = parse_font_weight(tok, parent.font_weight);
          } else if (tok == "italic" || tok == "oblique") {
            s.italic = true;
          } else {
            auto size_part = tok.substr(0, tok.find('/'));
            double px = parse_font_size(size_part, parent.font_size_px);
            if (px > 0) s.font_size_px = px;
          }
        }
      }
    }
  };
  for (const auto* d : sheet.matching(el)) apply(*d);
  if (auto it = el.attrs.find("style"); it != el.attrs.end()) apply(parse_declarations(it->second));
  return s;
}

ComputedStyle compute_style(std::span<const DomNode* const> path, const StyleSheet& sheet) {
  ComputedStyle s;
  for (const auto* n : path) {
    if (n->is_element() && n->tag != "#document") s = cascade_style(s, *n, sheet);
  }
  return s;
}

}  // namespace ppkit
