// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/block_classifier.hpp"
#include "ppkit/block_features.hpp"
#include "ppkit/css_style.hpp"
#include "ppkit/dom.hpp"
#include "ppkit/error.hpp"
#include "ppkit/html_pipeline.hpp"
#include "ppkit/ppxml.hpp"

namespace ppkit {

/// A title/paragraph candidate collected from the policy element.
struct Block {
  std::string text;
  BlockFeatures features;
  std::vector<ListNode> lists;  ///< lists that directly follow the block
  bool list_holder = false;     ///< empty block created only to carry lists
};

/// Walks the policy element in document order and returns its candidate
/// blocks. <ul>/<ol>/<dl> become lists attached to the preceding block,
/// <li>/<dt> become items and <dd> a nested list of the preceding item.
/// Inline elements inside a block are flattened into its text; a
/// highlighted inline element that is the sole content of its block is
/// promoted and described by its own style.
///
/// `document` must contain `policy`; it is needed for the style cascade.
std::vector<Block> collect_blocks(const DomNode& document, const DomNode& policy, const StyleSheet& sheet);

struct ClassifiedBlock {
  std::string text;
  BlockClass cls = BlockClass::kParagraph;
  std::vector<ListNode> lists;
};

/// Nests titles into segments: a title opens a segment at its level that
/// takes every following block up to the next title of the same or a
/// shallower level. Paragraphs before the first title stay at policy
/// level. No intermediate segments are invented for skipped levels. Lists
/// on a title move to an untitled paragraph right after it. Node ids are
/// assigned in document order.
PolicyDocument build_segment_tree(std::span<const ClassifiedBlock> blocks, std::string source = {});

/// Rule-based title detection used when no trained model is available:
/// heading tags rank by tag, short bold or labelled blocks become titles.
std::vector<BlockClass> heuristic_classify(std::span<const Block> blocks);

/// Findings for manual review of a generated document.
struct ValidationReport {
  std::vector<std::string> errors;    ///< schema violations
  std::vector<std::string> warnings;  ///< suspicious but legal structure
  bool ok() const { return errors.empty(); }
  std::string to_text() const;
};

struct ValidationOptions {
  std::size_t max_sibling_segments = 50;
  std::size_t max_title_length = 200;
};

ValidationReport validate_structure(const PolicyDocument& doc, const ValidationOptions& opts = {});

/// Output of the whole HTML -> PP-XML conversion for one page.
struct ConversionResult {
  PolicyDocument document;
  ValidationReport report;
  std::string cleaned_html;
  std::vector<Block> blocks;
  std::vector<BlockClass> classes;
};

/// Thrown when a page yields no policy-bearing element; carries the
/// policy links found on the page so a person can pick the right one.
class NoPolicyElementError : public Error {
 public:
  NoPolicyElementError(const std::string& message, std::vector<PageLink> links)
      : Error(message), links_(std::move(links)) {}
  const std::vector<PageLink>& candidate_links() const { return links_; }

 private:
  std::vector<PageLink> links_;
};

/// Parses, cleans, extracts the policy element, classifies its blocks (with
/// `model`, or heuristic_classify() when null) and builds the document.
ConversionResult convert_html(std::string_view html, const std::string& source, const ExtractionConfig& cfg,
                              const BlockClassifierModel* model);

}  // namespace ppkit
