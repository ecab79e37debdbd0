// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/dom.hpp"

namespace ppkit {

/// Threshold for the children-similarity ratio test.
struct ExtractionConfig {
  double ratio_threshold = 0.55;

  /// Throws ArgumentError unless 0 < ratio_threshold < 1.
  void validate() const;
};

struct PageLink {
  std::string text;
  std::string href;

  bool operator==(const PageLink&) const = default;
};

/// Removal categories applied before content extraction.
enum class RemovalType { kMultimedia = 1, kEmbedded = 2, kNonContent = 3 };

/// Category of `tag` or 0 if the element is kept.
int removal_type(std::string_view tag);

/// Copy of `root` with multimedia, embedded-object and non-content elements
/// (footer, nav, form, input controls) removed together with their subtrees.
DomNode strip_irrelevant_elements(const DomNode& root);

inline const std::vector<std::string>& policy_link_keywords() {
  static const std::vector<std::string> k = {"privacy policy", "privacy notice", "privacy terms"};
  return k;
}
inline const std::vector<std::string>& registration_link_keywords() {
  static const std::vector<std::string> k = {"create account", "register", "sign up", "sign-up"};
  return k;
}

/// Anchors whose visible text contains one of `keywords` (case-insensitive),
/// in document order.
std::vector<PageLink> find_links(const DomNode& root, const std::vector<std::string>& keywords);

/// Anchors naming a privacy policy. An empty result means the caller should
/// try a registration page, then escalate to a person.
std::vector<PageLink> find_policy_links(const DomNode& root);

/// Characters a reader sees in the subtree (see visible_text()).
std::size_t text_length(const DomNode& node);

/// Population standard deviation of the element children's text lengths.
/// Throws ArgumentError("leaf node") when there are no element children.
double children_similarity_score(const DomNode& node);

/// Descends from `root` towards the element holding the policy content.
///
/// Keeps the similarity scores of the elements passed over; an element whose
/// score divided by their mean falls below the threshold is returned. The
/// first element is always passed over, a leaf is always returned, and the
/// descent follows the child with the longest visible text.
const DomNode& extract_pp_element(const DomNode& root, const ExtractionConfig& cfg = {});

/// Same as extract_pp_element() but returns every node visited, root first.
std::vector<const DomNode*> extraction_path(const DomNode& root, const ExtractionConfig& cfg = {});

/// Fetches a page body for a URL; the library never does network I/O itself.
using PageFetcher = std::function<std::string(const std::string& url)>;

}  // namespace ppkit
