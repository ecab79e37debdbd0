// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/html_pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

namespace {

constexpr std::array kMultimedia = {"img",    "picture", "video",      "audio",
                                    "canvas", "map",     "area",       "figure",
                                    "figcaption", "source", "track",   "svg"};
constexpr std::array kEmbedded = {"applet", "embed",    "object", "param",
                                  "script", "noscript", "iframe"};
constexpr std::array kNonContent = {"footer", "nav",      "form",     "input",  "button",
                                    "select", "textarea", "option",   "optgroup",
                                    "datalist", "output", "keygen"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& set, std::string_view tag) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return tag == s; });
}

DomNode strip_copy(const DomNode& node) {
  DomNode out;
  out.tag = node.tag;
  out.attrs = node.attrs;
  out.text = node.text;
  out.children.reserve(node.children.size());
  for (const auto& c : node.children) {
    if (c.is_element() && removal_type(c.tag) != 0) continue;
    out.children.push_back(strip_copy(c));
  }
  return out;
}

void collect_links(const DomNode& node, const std::vector<std::string>& keywords,
                   std::vector<PageLink>& out) {
  if (node.tag == "a") {
    auto label = visible_text(node);
    for (const auto& k : keywords) {
      if (text::contains_ci(label, k)) {
        out.push_back({label, node.attr("href")});
        break;
      }
    }
  }
  for (const auto& c : node.children) {
    if (c.is_element()) collect_links(c, keywords, out);
  }
}

const DomNode* longest_child(const DomNode& node) {
  const DomNode* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& c : node.children) {
    if (!c.is_element()) continue;
    auto len = text_length(c);
    if (!best || len > best_len) {
      best = &c;
      best_len = len;
    }
  }
  return best;
}

}  // namespace

void ExtractionConfig::validate() const {
  if (!(ratio_threshold > 0.0 && ratio_threshold < 1.0)) {
    throw ArgumentError("ratio threshold must lie in (0, 1)");
  }
}

int removal_type(std::string_view tag) {
  if (contains(kMultimedia, tag)) return static_cast<int>(RemovalType::kMultimedia);
  if (contains(kEmbedded, tag)) return static_cast<int>(RemovalType::kEmbedded);
  if (contains(kNonContent, tag)) return static_cast<int>(RemovalType::kNonContent);
  return 0;
}

DomNode strip_irrelevant_elements(const DomNode& root) { return strip_copy(root); }

std::vector<PageLink> find_links(const DomNode& root, const std::vector<std::string>& keywords) {
  std::vector<PageLink> out;
  collect_links(root, keywords, out);
  return out;
}

std::vector<PageLink> find_policy_links(const DomNode& root) {
  return find_links(root, policy_link_keywords());
}

std::size_t text_length(const DomNode& node) {
  return text::utf8_length(visible_text(node));
}

double children_similarity_score(const DomNode& node) {
  std::vector<double> lengths;
  for (const auto& c : node.children) {
    if (c.is_element()) lengths.push_back(static_cast<double>(text_length(c)));
  }
  if (lengths.empty()) throw ArgumentError("leaf node");
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= static_cast<double>(lengths.size());
  double var = 0.0;
  for (double l : lengths) var += (l - mean) * (l - mean);
  return std::sqrt(var / static_cast<double>(lengths.size()));
}

std::vector<const DomNode*> extraction_path(const DomNode& root, const ExtractionConfig& cfg) {
  cfg.validate();
  std::vector<const DomNode*> path;
  std::vector<double> passed_scores;
  double passed_sum = 0.0;
  const DomNode* current = &root;
  while (true) {
    path.push_back(current);
    if (current->element_child_count() == 0) return path;
    const double score = children_similarity_score(*current);
    double ratio = std::numeric_limits<double>::infinity();
    if (!passed_scores.empty()) {
      const double mean = passed_sum / static_cast<double>(passed_scores.size());
      if (mean > 0.0) ratio = score / mean;
    }
    if (ratio < cfg.ratio_threshold) return path;
    passed_scores.push_back(score);
    passed_sum += score;
    current = longest_child(*current);
  }
}

const DomNode& extract_pp_element(const DomNode& root, const ExtractionConfig& cfg) {
  return *extraction_path(root, cfg).back();
}

}  // namespace ppkit
