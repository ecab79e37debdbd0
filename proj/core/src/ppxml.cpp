// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/ppxml.hpp"

#include <expat.h>

#include <cstdio>
#include <memory>
#include <set>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

bool ItemNode::operator==(const ItemNode& o) const { return text == o.text && lists == o.lists; }
bool ListNode::operator==(const ListNode& o) const { return items == o.items; }
bool ContentNode::operator==(const ContentNode& o) const {
  return kind == o.kind && level == o.level && element == o.element && children == o.children;
}

ContentNode ContentNode::paragraph(TextElement e) {
  ContentNode n;
  n.kind = ContentKind::kParagraph;
  n.element = std::move(e);
  return n;
}

ContentNode ContentNode::segment(int level, TextElement title, std::vector<ContentNode> children) {
  ContentNode n;
  n.kind = ContentKind::kSegment;
  n.level = level;
  n.element = std::move(title);
  n.children = std::move(children);
  return n;
}

namespace {

void visit_children(const std::vector<ContentNode>& children, const TextElement* parent_title,
                    int level, const std::function<void(const TextVisit&)>& fn) {
  const TextElement* last_paragraph = nullptr;
  for (const auto& c : children) {
    if (c.is_segment()) {
      fn(TextVisit{&c.element, true, c.level, parent_title, last_paragraph});
      visit_children(c.children, &c.element, c.level, fn);
    } else {
      fn(TextVisit{&c.element, false, level, parent_title, last_paragraph});
      last_paragraph = &c.element;
    }
  }
}

void visit_mut(std::vector<ContentNode>& children,
               const std::function<void(TextElement&, bool)>& fn) {
  for (auto& c : children) {
    fn(c.element, c.is_segment());
    if (c.is_segment()) visit_mut(c.children, fn);
  }
}

std::string first_id(const ContentNode& n) {
  if (!n.element.id.empty()) return n.element.id;
  for (const auto& c : n.children) {
    auto id = first_id(c);
    if (!id.empty()) return id;
  }
  return {};
}

void check_children(const std::vector<ContentNode>& children, int parent_level,
                    std::set<std::string>& ids) {
  for (const auto& c : children) {
    const auto& id = c.element.id;
    if (id.empty()) {
      throw FormatError(std::string(c.is_segment() ? "title" : "paragraph") +
                        " without id near node " + first_id(c));
    }
    if (!ids.insert(id).second) throw FormatError("duplicate node id " + id);
    if (c.is_segment()) {
      if (c.level < 1 || c.level > 4) {
        throw FormatError("segment level out of range at node " + id);
      }
      if (c.level <= parent_level) {
        throw FormatError("segment level does not increase at node " + id);
      }
      if (!c.element.lists.empty()) throw FormatError("title with list at node " + id);
      check_children(c.children, c.level, ids);
    } else if (!c.children.empty()) {
      throw FormatError("paragraph with child content at node " + id);
    }
  }
}

void check_list(const ListNode& list, const std::string& where) {
  if (list.items.empty()) throw FormatError("list without item at node " + where);
  for (const auto& item : list.items) {
    for (const auto& l : item.lists) check_list(l, where);
  }
}

void check_lists(const std::vector<ContentNode>& children) {
  for (const auto& c : children) {
    for (const auto& l : c.element.lists) check_list(l, c.element.id);
    check_lists(c.children);
  }
}

std::string escape_xml(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out += ch;
        break;
      case '\n':
      case '\t':
      case '\r':
        if (attribute) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "&#%d;", static_cast<int>(ch));
          out += buf;
        } else {
          out += ch;
        }
        break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) break;  // not representable in XML 1.0
        out += ch;
    }
  }
  return out;
}

void write_list(const ListNode& list, std::string& out) {
  out += "<list>";
  for (const auto& item : list.items) {
    out += "<item>";
    out += escape_xml(item.text, false);
    for (const auto& l : item.lists) write_list(l, out);
    out += "</item>";
  }
  out += "</list>";
}

void write_text_element(const char* tag, const TextElement& e, std::string& out) {
  out += '<';
  out += tag;
  out += " id=\"";
  out += escape_xml(e.id, true);
  out += '"';
  if (!e.labels.empty()) {
    out += " labels=\"";
    out += escape_xml(text::join(e.labels, ";"), true);
    out += '"';
  }
  out += '>';
  out += escape_xml(e.text, false);
  for (const auto& l : e.lists) write_list(l, out);
  out += "</";
  out += tag;
  out += ">\n";
}

void write_children(const std::vector<ContentNode>& children, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& c : children) {
    if (c.is_segment()) {
      out += pad + "<segment level=\"" + std::to_string(c.level) + "\">\n";
      out += pad + "  ";
      write_text_element("title", c.element, out);
      write_children(c.children, indent + 1, out);
      out += pad + "</segment>\n";
    } else {
      out += pad;
      write_text_element("paragraph", c.element, out);
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

enum class FrameKind { kPolicy, kSegment, kTitle, kParagraph, kList, kItem };

struct Frame {
  FrameKind kind;
  ContentNode node;   // segment or paragraph under construction
  ListNode list;      // list under construction
  ItemNode item;      // item under construction
  std::string text;   // raw character data
  bool has_title = false;
};

class PpxmlReader {
 public:
  PolicyDocument read(std::string_view xml) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                      &XML_ParserFree);
    if (!parser) throw Error("cannot create XML parser");
    parser_ = parser.get();
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &PpxmlReader::on_start, &PpxmlReader::on_end);
    XML_SetCharacterDataHandler(parser_, &PpxmlReader::on_text);
    if (XML_Parse(parser_, xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
      if (!error_.empty()) throw FormatError(error_);
      throw FormatError("malformed PP-XML at line " +
                        std::to_string(XML_GetCurrentLineNumber(parser_)) + ": " +
                        XML_ErrorString(XML_GetErrorCode(parser_)));
    }
    if (!seen_policy_) throw FormatError("missing <policy> root element");
    return std::move(doc_);
  }

 private:
  static void on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<PpxmlReader*>(self)->start(name, attrs);
  }
  static void on_end(void* self, const XML_Char* name) {
    static_cast<PpxmlReader*>(self)->end(name);
  }
  static void on_text(void* self, const XML_Char* s, int len) {
    static_cast<PpxmlReader*>(self)->chars(std::string_view(s, static_cast<std::size_t>(len)));
  }

  void fail(std::string message) {
    if (error_.empty()) {
      error_ = std::move(message) + " (line " +
               std::to_string(XML_GetCurrentLineNumber(parser_)) + ")";
    }
    XML_StopParser(parser_, XML_FALSE);
  }

  std::string line() const { return std::to_string(XML_GetCurrentLineNumber(parser_)); }

  void start(std::string_view name, const XML_Char** attrs) {
    if (!error_.empty()) return;
    auto attr = [&](std::string_view key) -> const char* {
      for (auto** a = attrs; *a; a += 2) {
        if (key == a[0]) return a[1];
      }
      return nullptr;
    };
    const FrameKind parent = stack_.empty() ? FrameKind::kPolicy : stack_.back().kind;
    auto expect_parent = [&](std::initializer_list<FrameKind> allowed) {
      if (stack_.empty()) return false;
      for (auto k : allowed) {
        if (parent == k) return true;
      }
      return false;
    };

    Frame f;
    if (name == "policy") {
      if (!stack_.empty() || seen_policy_) return fail("unexpected <policy> element");
      seen_policy_ = true;
      f.kind = FrameKind::kPolicy;
      if (auto* src = attr("source")) doc_.source = src;
    } else if (name == "segment") {
      if (!expect_parent({FrameKind::kPolicy, FrameKind::kSegment})) {
        return fail("<segment> outside policy or segment");
      }
      if (parent == FrameKind::kSegment && !stack_.back().has_title) {
        return fail("segment without title before nested segment at line " + line());
      }
      f.kind = FrameKind::kSegment;
      f.node.kind = ContentKind::kSegment;
      const char* level = attr("level");
      if (!level) return fail("segment without level attribute");
      std::string lv = level;
      if (lv.size() != 1 || lv[0] < '1' || lv[0] > '4') return fail("segment level must be 1-4");
      f.node.level = lv[0] - '0';
    } else if (name == "title" || name == "paragraph") {
      const bool title = name == "title";
      if (title) {
        if (!expect_parent({FrameKind::kSegment})) return fail("<title> outside segment");
        if (stack_.back().has_title) return fail("segment with more than one title");
        if (!stack_.back().node.children.empty()) return fail("segment title must come first");
      } else {
        if (!expect_parent({FrameKind::kPolicy, FrameKind::kSegment})) {
          return fail("<paragraph> outside policy or segment");
        }
        if (parent == FrameKind::kSegment && !stack_.back().has_title) {
          const char* id = attr("id");
          return fail(std::string("segment without title at node ") + (id ? id : "?"));
        }
      }
      f.kind = title ? FrameKind::kTitle : FrameKind::kParagraph;
      const char* id = attr("id");
      if (!id || !*id) return fail(std::string("<") + std::string(name) + "> without id");
      f.node.element.id = id;
      if (const char* labels = attr("labels"); labels && *labels) {
        for (auto& l : text::split(labels, ';')) {
          auto t = std::string(text::trim(l));
          if (!t.empty()) f.node.element.labels.push_back(std::move(t));
        }
      }
    } else if (name == "list") {
      if (!expect_parent({FrameKind::kParagraph, FrameKind::kItem})) {
        return fail("<list> outside paragraph or item");
      }
      f.kind = FrameKind::kList;
    } else if (name == "item") {
      if (!expect_parent({FrameKind::kList})) return fail("<item> outside list");
      f.kind = FrameKind::kItem;
    } else {
      return fail("unknown element <" + std::string(name) + ">");
    }
    stack_.push_back(std::move(f));
  }

  void chars(std::string_view s) {
    if (!error_.empty() || stack_.empty()) return;
    auto& f = stack_.back();
    switch (f.kind) {
      case FrameKind::kTitle:
      case FrameKind::kParagraph:
      case FrameKind::kItem:
        f.text.append(s);
        break;
      default:
        if (!text::trim(s).empty()) fail("unexpected text in structural element");
    }
  }

  void end(std::string_view) {
    if (!error_.empty()) return;
    Frame f = std::move(stack_.back());
    stack_.pop_back();
    switch (f.kind) {
      case FrameKind::kPolicy:
        return;
      case FrameKind::kSegment: {
        if (!f.has_title) return fail("segment without title at line " + line());
        auto& p = stack_.back();
        if (p.kind == FrameKind::kSegment && f.node.level <= p.node.level) {
          return fail("segment level does not increase at node " + f.node.element.id);
        }
        append_content(std::move(f.node));
        return;
      }
      case FrameKind::kTitle: {
        auto& seg = stack_.back();
        seg.node.element = std::move(f.node.element);
        seg.node.element.text = text::collapse_whitespace(f.text);
        seg.has_title = true;
        return;
      }
      case FrameKind::kParagraph:
        f.node.element.text = text::collapse_whitespace(f.text);
        append_content(std::move(f.node));
        return;
      case FrameKind::kList: {
        if (f.list.items.empty()) return fail("list without item");
        auto& p = stack_.back();
        if (p.kind == FrameKind::kParagraph) p.node.element.lists.push_back(std::move(f.list));
        else p.item.lists.push_back(std::move(f.list));
        return;
      }
      case FrameKind::kItem:
        f.item.text = text::collapse_whitespace(f.text);
        stack_.back().list.items.push_back(std::move(f.item));
        return;
    }
  }

  void append_content(ContentNode node) {
    auto& p = stack_.back();
    if (p.kind == FrameKind::kPolicy) doc_.children.push_back(std::move(node));
    else p.node.children.push_back(std::move(node));
  }

  XML_Parser parser_ = nullptr;
  std::vector<Frame> stack_;
  PolicyDocument doc_;
  std::string error_;
  bool seen_policy_ = false;
};

}  // namespace

void for_each_text(const PolicyDocument& doc, const std::function<void(const TextVisit&)>& fn) {
  visit_children(doc.children, nullptr, 0, fn);
}

void for_each_text_mut(PolicyDocument& doc, const std::function<void(TextElement&, bool)>& fn) {
  visit_mut(doc.children, fn);
}

std::string format_node_id(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "n%04zu", ordinal);
  return buf;
}

void assign_node_ids(PolicyDocument& doc) {
  std::size_t next = 1;
  for_each_text_mut(doc, [&](TextElement& e, bool) { e.id = format_node_id(next++); });
}

std::size_t count_text_nodes(const PolicyDocument& doc) {
  std::size_t n = 0;
  for_each_text(doc, [&](const TextVisit&) { ++n; });
  return n;
}

void check_schema(const PolicyDocument& doc) {
  std::set<std::string> ids;
  check_children(doc.children, 0, ids);
  check_lists(doc.children);
}

std::string serialize_ppxml(const PolicyDocument& doc) {
  check_schema(doc);
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<policy source=\"" + escape_xml(doc.source, true) + "\">\n";
  write_children(doc.children, 1, out);
  out += "</policy>\n";
  return out;
}

PolicyDocument parse_ppxml(std::string_view xml) {
  PpxmlReader reader;
  auto doc = reader.read(xml);
  check_schema(doc);
  return doc;
}

}  // namespace ppkit
