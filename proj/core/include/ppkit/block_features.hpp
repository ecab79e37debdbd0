// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/css_style.hpp"
#include "ppkit/dom.hpp"
#include "ppkit/leading_label.hpp"

namespace ppkit {

/// Tag enumeration over the title/paragraph candidate elements.
enum class TagCode : int {
  kOther = 0,
  kH1 = 1,
  kH2 = 2,
  kH3 = 3,
  kH4 = 4,
  kH5 = 5,
  kH6 = 6,
  kP = 7,
  kDiv = 8,
  kHighlightedInline = 9,
  kListItem = 10,
  kTableCell = 11,
};

TagCode tag_code_for(std::string_view tag);

/// Per-block inputs of the title/paragraph classifier: 8 scalars followed by
/// the 12-D leading-ordinal-label descriptor.
struct BlockFeatures {
  int text_length = 0;
  double font_size = -1;    ///< px, -1 when unknown
  double font_weight = -1;  ///< CSS weight scale, -1 when unknown
  int is_italic = 0;
  int is_underlined = 0;
  int dom_depth = 0;        ///< edges from the policy element
  TagCode tag_code = TagCode::kOther;
  int is_promoted_inline = 0;  ///< block is a sole highlighted inline element
  LolDescriptor lol;

  static constexpr std::size_t kScalarCount = 8;
  static constexpr std::size_t kDimension = kScalarCount + 12;

  std::array<double, kDimension> to_vector() const;
  static BlockFeatures from_vector(std::span<const double> v);

  bool operator==(const BlockFeatures&) const = default;
};

/// Where a block sits in its page: the element chain from the document root
/// down to the block element, the policy element's position in that chain,
/// and the page stylesheet.
struct BlockContext {
  std::span<const DomNode* const> path;  ///< document root first, block element last
  std::size_t policy_index = 0;          ///< index of the policy element in `path`
  const StyleSheet* sheet = nullptr;
  bool promoted_inline = false;
};

/// Computes all 20 features of the block element at the end of `ctx.path`.
/// The text is the element's visible text unless `text_override` is given.
BlockFeatures extract_block_features(const BlockContext& ctx,
                                     const std::string* text_override = nullptr);

/// Five block classes.
enum class BlockClass : int { kTitleL1 = 0, kTitleL2 = 1, kTitleL3 = 2, kTitleL4 = 3, kParagraph = 4 };

constexpr int kBlockClassCount = 5;

inline bool is_title(BlockClass c) { return c != BlockClass::kParagraph; }
/// Title level 1..4; 0 for paragraphs.
inline int title_level(BlockClass c) { return is_title(c) ? static_cast<int>(c) + 1 : 0; }
std::string_view to_string(BlockClass c);
BlockClass parse_block_class(std::string_view s);

}  // namespace ppkit
