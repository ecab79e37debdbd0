// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ppkit {

struct ListNode;

/// <item>: text plus optional nested lists.
struct ItemNode {
  std::string text;
  std::vector<ListNode> lists;

  bool operator==(const ItemNode&) const;
};

/// <list>: one or more items.
struct ListNode {
  std::vector<ItemNode> items;

  bool operator==(const ListNode&) const;
};

/// <title> or <paragraph> payload. Lists only occur on paragraphs.
struct TextElement {
  std::string id;
  std::string text;
  std::vector<std::string> labels;
  std::vector<ListNode> lists;

  bool operator==(const TextElement&) const = default;
};

enum class ContentKind { kSegment, kParagraph };

/// Either a <segment> (level, title, children) or a <paragraph>.
struct ContentNode {
  ContentKind kind = ContentKind::kParagraph;
  int level = 0;              ///< segment level 1..4; 0 for paragraphs
  TextElement element;        ///< segment title or paragraph body
  std::vector<ContentNode> children;  ///< segments only

  static ContentNode paragraph(TextElement e);
  static ContentNode segment(int level, TextElement title, std::vector<ContentNode> children = {});

  bool is_segment() const { return kind == ContentKind::kSegment; }
  bool operator==(const ContentNode&) const;
};

/// PP-XML document rooted at <policy>.
struct PolicyDocument {
  std::string source;
  std::vector<ContentNode> children;

  bool operator==(const PolicyDocument&) const = default;
};

/// Title/paragraph visit in document order.
struct TextVisit {
  const TextElement* element = nullptr;
  bool is_title = false;
  int segment_level = 0;             ///< level of the enclosing segment, 0 at policy level
  const TextElement* parent_title = nullptr;     ///< title of the enclosing segment
  const TextElement* preceding_sibling = nullptr;  ///< nearest preceding paragraph sibling
};

/// Calls `fn` for each title and paragraph in document order.
void for_each_text(const PolicyDocument& doc, const std::function<void(const TextVisit&)>& fn);
void for_each_text_mut(PolicyDocument& doc, const std::function<void(TextElement&, bool is_title)>& fn);

/// Formats a document-order index as a node id ("n0001").
std::string format_node_id(std::size_t ordinal);

/// Reassigns node ids to titles and paragraphs in document order.
void assign_node_ids(PolicyDocument& doc);

std::size_t count_text_nodes(const PolicyDocument& doc);

/// Throws FormatError describing the first schema violation.
void check_schema(const PolicyDocument& doc);

std::string serialize_ppxml(const PolicyDocument& doc);
/// Parses PP-XML. Throws FormatError on malformed XML or schema violations.
PolicyDocument parse_ppxml(std::string_view xml);

}  // namespace ppkit
