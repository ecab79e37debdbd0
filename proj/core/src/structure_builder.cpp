// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/structure_builder.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>

#include "ppkit/text.hpp"

namespace ppkit {

namespace {

bool is_list_tag(std::string_view tag) { return tag == "ul" || tag == "ol" || tag == "dl"; }

bool is_highlight_tag(std::string_view tag) {
  return tag == "b" || tag == "strong" || tag == "em" || tag == "i" || tag == "u" || tag == "mark" ||
         tag == "span" || tag == "font" || tag == "big";
}

bool is_flow_content(const DomNode& n) {
  return n.is_text() || is_inline_element(n.tag) || n.tag == "br";
}

bool has_block_descendant(const DomNode& n) {
  for (const auto& c : n.children) {
    if (c.is_text() || is_invisible_element(c.tag)) continue;
    if (!is_flow_content(c)) return true;
    if (has_block_descendant(c)) return true;
  }
  return false;
}

bool is_blank(const DomNode& n) { return n.is_text() && text::trim(n.text).empty(); }

// Descends through wrappers like <p><strong><u>x</u></strong></p> and
// returns the chain of highlighted inline elements that make up the whole
// content of `n`, outermost first; empty when `n` has other content.
std::vector<const DomNode*> sole_highlight_chain(const DomNode& n) {
  std::vector<const DomNode*> chain;
  const DomNode* cur = &n;
  while (true) {
    const DomNode* only = nullptr;
    std::size_t count = 0;
    for (const auto& c : cur->children) {
      if (is_blank(c)) continue;
      ++count;
      only = &c;
    }
    if (count != 1 || only->is_text() || !is_highlight_tag(only->tag)) break;
    chain.push_back(only);
    cur = only;
  }
  return chain;
}

DomNode without_lists(const DomNode& n) {
  DomNode copy = n;
  std::function<void(DomNode&)> strip = [&](DomNode& d) {
    std::erase_if(d.children, [](const DomNode& c) { return is_list_tag(c.tag); });
    for (auto& c : d.children) strip(c);
  };
  strip(copy);
  return copy;
}

std::optional<ListNode> build_list(const DomNode& el);

// Lists anywhere inside `n` that are not nested in another list.
void collect_nested_lists(const DomNode& n, std::vector<ListNode>& out) {
  for (const auto& c : n.children) {
    if (c.is_text()) continue;
    if (is_list_tag(c.tag)) {
      if (auto l = build_list(c)) out.push_back(std::move(*l));
    } else {
      collect_nested_lists(c, out);
    }
  }
}

ItemNode build_item(const DomNode& el) {
  ItemNode item;
  item.text = visible_text(without_lists(el));
  collect_nested_lists(el, item.lists);
  return item;
}

std::optional<ListNode> build_list(const DomNode& el) {
  ListNode list;
  for (const auto& c : el.children) {
    if (c.is_text() || is_invisible_element(c.tag)) continue;
    if (c.tag == "dd") {
      ItemNode sub = build_item(c);
      if (sub.text.empty() && sub.lists.empty()) continue;
      if (list.items.empty()) {
        list.items.push_back(std::move(sub));
      } else {
        ListNode nested;
        nested.items.push_back(std::move(sub));
        list.items.back().lists.push_back(std::move(nested));
      }
      continue;
    }
    if (is_list_tag(c.tag)) {
      auto nested = build_list(c);
      if (!nested) continue;
      if (list.items.empty()) list.items.emplace_back();
      list.items.back().lists.push_back(std::move(*nested));
      continue;
    }
    ItemNode item = build_item(c);
    if (item.text.empty() && item.lists.empty()) continue;
    list.items.push_back(std::move(item));
  }
  if (list.items.empty()) return std::nullopt;
  return list;
}

class Collector {
 public:
  Collector(const StyleSheet& sheet, std::vector<const DomNode*> path)
      : sheet_(sheet), path_(std::move(path)), policy_index_(path_.size() - 1) {}

  std::vector<Block> run() {
    const DomNode& policy = *path_.back();
    if (is_list_tag(policy.tag)) {
      if (auto l = build_list(policy)) attach_list(std::move(*l));
    } else if (has_block_descendant(policy)) {
      visit_container(policy);
    } else {
      emit_leaf(policy);
    }
    return std::move(out_);
  }

 private:
  void visit_container(const DomNode& el) {
    std::vector<const DomNode*> flow;
    for (const auto& c : el.children) {
      if (!c.is_text() && is_invisible_element(c.tag)) continue;
      if (is_flow_content(c) && !has_block_descendant(c)) {
        flow.push_back(&c);
        continue;
      }
      flush_flow(flow);
      path_.push_back(&c);
      if (is_list_tag(c.tag)) {
        if (auto l = build_list(c)) attach_list(std::move(*l));
      } else if (has_block_descendant(c)) {
        visit_container(c);
      } else {
        emit_leaf(c);
      }
      path_.pop_back();
    }
    flush_flow(flow);
  }

  // Text and inline elements between block siblings form an anonymous block
  // described by the container's style.
  void flush_flow(std::vector<const DomNode*>& flow) {
    if (flow.empty()) return;
    DomNode wrapper = DomNode::element("span");
    std::vector<const DomNode*> non_blank;
    for (const DomNode* n : flow) {
      wrapper.children.push_back(*n);
      if (!is_blank(*n)) non_blank.push_back(n);
    }
    flow.clear();
    std::string text = visible_text(wrapper);
    if (text.empty()) return;
    if (non_blank.size() == 1 && !non_blank[0]->is_text() && is_highlight_tag(non_blank[0]->tag)) {
      const std::size_t depth = path_.size();
      path_.push_back(non_blank[0]);
      for (const DomNode* inner : sole_highlight_chain(*non_blank[0])) path_.push_back(inner);
      emit(text, true);
      path_.resize(depth);
      return;
    }
    emit(text, false);
  }

  void emit_leaf(const DomNode& el) {
    std::string text = visible_text(el);
    if (text.empty()) return;
    const auto chain = sole_highlight_chain(el);
    for (const DomNode* n : chain) path_.push_back(n);
    emit(text, !chain.empty());
    path_.resize(path_.size() - chain.size());
  }

  void emit(const std::string& text, bool promoted) {
    BlockContext ctx{path_, policy_index_, &sheet_, promoted};
    Block b;
    b.text = text;
    b.features = extract_block_features(ctx, &b.text);
    out_.push_back(std::move(b));
  }

  void attach_list(ListNode list) {
    if (out_.empty()) {
      Block holder;
      holder.list_holder = true;
      BlockContext ctx{path_, policy_index_, &sheet_, false};
      holder.features = extract_block_features(ctx, &holder.text);
      out_.push_back(std::move(holder));
    }
    out_.back().lists.push_back(std::move(list));
  }

  const StyleSheet& sheet_;
  std::vector<const DomNode*> path_;
  std::size_t policy_index_;
  std::vector<Block> out_;
};

bool find_path(const DomNode& cur, const DomNode& target, std::vector<const DomNode*>& path) {
  path.push_back(&cur);
  if (&cur == &target) return true;
  for (const auto& c : cur.children) {
    if (find_path(c, target, path)) return true;
  }
  path.pop_back();
  return false;
}

}  // namespace

std::vector<Block> collect_blocks(const DomNode& document, const DomNode& policy, const StyleSheet& sheet) {
  std::vector<const DomNode*> path;
  if (!find_path(document, policy, path)) throw ArgumentError("policy element is not inside the document");
  return Collector(sheet, std::move(path)).run();
}

PolicyDocument build_segment_tree(std::span<const ClassifiedBlock> blocks, std::string source) {
  PolicyDocument doc;
  doc.source = std::move(source);
  std::vector<ContentNode*> open;
  auto container = [&]() -> std::vector<ContentNode>& {
    return open.empty() ? doc.children : open.back()->children;
  };
  for (const auto& b : blocks) {
    if (is_title(b.cls)) {
      const int level = title_level(b.cls);
      while (!open.empty() && open.back()->level >= level) open.pop_back();
      TextElement title;
      title.text = b.text;
      auto& siblings = container();
      siblings.push_back(ContentNode::segment(level, std::move(title)));
      open.push_back(&siblings.back());
      if (!b.lists.empty()) {
        TextElement holder;
        holder.lists = b.lists;
        open.back()->children.push_back(ContentNode::paragraph(std::move(holder)));
      }
    } else {
      TextElement p;
      p.text = b.text;
      p.lists = b.lists;
      container().push_back(ContentNode::paragraph(std::move(p)));
    }
  }
  assign_node_ids(doc);
  return doc;
}

std::vector<BlockClass> heuristic_classify(std::span<const Block> blocks) {
  std::set<int> heading_tags;
  for (const auto& b : blocks) {
    const int t = static_cast<int>(b.features.tag_code);
    if (t >= 1 && t <= 6) heading_tags.insert(t);
  }
  const std::vector<int> ranks(heading_tags.begin(), heading_tags.end());
  const int emphasis_level = std::min<int>(4, static_cast<int>(ranks.size()) + 1);
  std::vector<BlockClass> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    const auto& f = b.features;
    const int t = static_cast<int>(f.tag_code);
    int level = 0;
    if (!b.list_holder && !b.text.empty()) {
      if (t >= 1 && t <= 6) {
        const auto rank = std::find(ranks.begin(), ranks.end(), t) - ranks.begin();
        level = std::min<int>(4, static_cast<int>(rank) + 1);
      } else if (f.text_length <= 80 && b.text.back() != '.' &&
                 (f.font_weight >= 600 || f.is_promoted_inline || f.font_size > 17.0)) {
        level = f.lol.empty() ? emphasis_level : static_cast<int>(f.lol.depth());
      }
    }
    out.push_back(level == 0 ? BlockClass::kParagraph : static_cast<BlockClass>(level - 1));
  }
  return out;
}

std::string ValidationReport::to_text() const {
  std::string out;
  for (const auto& e : errors) out += "error: " + e + "\n";
  for (const auto& w : warnings) out += "warning: " + w + "\n";
  if (out.empty()) out = "ok\n";
  return out;
}

ValidationReport validate_structure(const PolicyDocument& doc, const ValidationOptions& opts) {
  ValidationReport r;
  try {
    check_schema(doc);
  } catch (const FormatError& e) {
    r.errors.push_back(e.what());
  }
  if (count_text_nodes(doc) == 0) r.warnings.push_back("document has no titles or paragraphs");
  std::function<void(const std::vector<ContentNode>&, int, const std::string&)> walk =
      [&](const std::vector<ContentNode>& nodes, int parent_level, const std::string& where) {
        std::size_t segments = 0;
        for (const auto& n : nodes) {
          if (!n.is_segment()) continue;
          ++segments;
          const std::string& id = n.element.id;
          if (n.level > parent_level + 1) {
            r.warnings.push_back("level jump from " + std::to_string(parent_level) + " to " +
                                 std::to_string(n.level) + " at node " + id);
          }
          if (n.element.text.empty()) r.warnings.push_back("empty title at node " + id);
          if (text::utf8_length(n.element.text) > opts.max_title_length) {
            r.warnings.push_back("unusually long title at node " + id);
          }
          if (n.children.empty()) r.warnings.push_back("segment without content at node " + id);
          walk(n.children, n.level, "segment " + id);
        }
        if (segments > opts.max_sibling_segments) {
          r.warnings.push_back(std::to_string(segments) + " sibling segments under " + where);
        }
      };
  walk(doc.children, 0, "policy");
  return r;
}

ConversionResult convert_html(std::string_view html, const std::string& source, const ExtractionConfig& cfg,
                              const BlockClassifierModel* model) {
  cfg.validate();
  const DomNode page = parse_html(html);
  ConversionResult result;
  const DomNode cleaned = strip_irrelevant_elements(page);
  result.cleaned_html = serialize_html(cleaned);
  const StyleSheet sheet = StyleSheet::from_document(page);
  const DomNode& body = find_body(cleaned);
  const DomNode& policy = extract_pp_element(body, cfg);
  if (text_length(policy) == 0) {
    auto links = find_policy_links(page);
    std::string msg = "no policy element found in " + (source.empty() ? std::string("input") : source);
    if (links.empty()) {
      msg += "; no policy links on the page, manual selection required";
    } else {
      msg += "; candidate policy links:";
      for (const auto& l : links) msg += "\n  " + l.text + " -> " + l.href;
    }
    throw NoPolicyElementError(msg, std::move(links));
  }
  result.blocks = collect_blocks(cleaned, policy, sheet);
  if (model) {
    for (const auto& b : result.blocks) result.classes.push_back(model->classify(b.features));
  } else {
    result.classes = heuristic_classify(result.blocks);
  }
  std::vector<ClassifiedBlock> classified;
  classified.reserve(result.blocks.size());
  for (std::size_t i = 0; i < result.blocks.size(); ++i) {
    const auto& b = result.blocks[i];
    if (b.list_holder) result.classes[i] = BlockClass::kParagraph;
    classified.push_back({b.text, result.classes[i], b.lists});
  }
  result.document = build_segment_tree(classified, source);
  result.report = validate_structure(result.document);
  return result;
}

}  // namespace ppkit
