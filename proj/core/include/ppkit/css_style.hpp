// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/dom.hpp"

namespace ppkit {

/// Parsed `property: value` pairs of one style attribute or rule body.
using Declarations = std::map<std::string, std::string>;

Declarations parse_declarations(std::string_view body);

/// Stylesheet restricted to simple selectors (tag, .class, #id, tag.class);
/// combinators and at-rules are ignored.
class StyleSheet {
 public:
  static StyleSheet parse(std::string_view css);
  /// Concatenates every <style> element of the document.
  static StyleSheet from_document(const DomNode& document);

  /// Declarations matching `element`, lowest precedence first.
  std::vector<const Declarations*> matching(const DomNode& element) const;
  std::size_t rule_count() const { return rules_.size(); }

 private:
  struct Rule {
    std::string tag;
    std::vector<std::string> classes;
    std::string id;
    int specificity = 0;
    std::size_t order = 0;
    Declarations declarations;
  };
  std::vector<Rule> rules_;
};

/// Font attributes that matter for title detection. -1 marks a value that
/// could not be resolved.
struct ComputedStyle {
  double font_size_px = 16.0;
  double font_weight = 400.0;
  bool italic = false;
  bool underline = false;
};

/// Default size of h1..h6 relative to the body font.
double heading_default_scale(std::string_view tag);

/// Applies one element's tag defaults, matched rules and inline style on top
/// of its parent's computed style.
ComputedStyle cascade_style(const ComputedStyle& parent, const DomNode& element,
                            const StyleSheet& sheet);

/// Computes the style of the last element in `path` (document root first).
ComputedStyle compute_style(std::span<const DomNode* const> path, const StyleSheet& sheet);

/// CSS font-weight keyword or number; returns -1 for unknown values.
double parse_font_weight(std::string_view value, double parent_weight);
/// CSS font-size in px; returns -1 for unknown values.
double parse_font_size(std::string_view value, double parent_size_px);

}  // namespace ppkit
