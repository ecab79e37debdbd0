// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ppkit {

/// Simplified HTML DOM node. Text runs are children with tag "#text"; the
/// parse root has tag "#document".
struct DomNode {
  std::string tag;
  std::map<std::string, std::string> attrs;
  std::vector<DomNode> children;
  std::string text;  ///< character data, only for "#text" nodes

  static DomNode element(std::string tag, std::vector<DomNode> children = {});
  static DomNode text_node(std::string text);

  bool is_text() const { return tag == "#text"; }
  bool is_element() const { return !is_text(); }
  std::string attr(std::string_view name) const;

  /// Concatenated text of the direct "#text" children.
  std::string direct_text() const;
  std::size_t element_child_count() const;

  bool operator==(const DomNode&) const = default;
};

/// Lenient HTML parser: void elements, raw-text script/style, implied end
/// tags for p/li/dt/dd/table cells, unmatched end tags ignored, character
/// references decoded.
DomNode parse_html(std::string_view html);

/// The <body> element if present, else <html>, else the document itself.
const DomNode& find_body(const DomNode& document);

/// Serializes a subtree back to HTML.
std::string serialize_html(const DomNode& node);

/// Decodes named and numeric character references.
std::string decode_entities(std::string_view s);

bool is_void_element(std::string_view tag);
/// Inline (phrasing) elements: text flows through them without a break.
bool is_inline_element(std::string_view tag);
/// Elements whose text is never shown to a reader (head, style, script...).
bool is_invisible_element(std::string_view tag);

/// Human-readable text of a subtree: descendant text with block boundaries
/// turned into spaces, whitespace collapsed and trimmed.
std::string visible_text(const DomNode& node);

}  // namespace ppkit
