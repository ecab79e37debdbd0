// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/block_features.hpp"

#include <cmath>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

TagCode tag_code_for(std::string_view tag) {
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
    return static_cast<TagCode>(tag[1] - '0');
  }
  if (tag == "p") return TagCode::kP;
  if (tag == "div") return TagCode::kDiv;
  if (tag == "li" || tag == "dt" || tag == "dd") return TagCode::kListItem;
  if (tag == "td" || tag == "th") return TagCode::kTableCell;
  if (is_inline_element(tag)) return TagCode::kHighlightedInline;
  return TagCode::kOther;
}

std::array<double, BlockFeatures::kDimension> BlockFeatures::to_vector() const {
  std::array<double, kDimension> v{};
  v[0] = text_length;
  v[1] = font_size;
  v[2] = font_weight;
  v[3] = is_italic;
  v[4] = is_underlined;
  v[5] = dom_depth;
  v[6] = static_cast<int>(tag_code);
  v[7] = is_promoted_inline;
  for (std::size_t i = 0; i < lol.values.size(); ++i) v[kScalarCount + i] = lol.values[i];
  return v;
}

BlockFeatures BlockFeatures::from_vector(std::span<const double> v) {
  if (v.size() != kDimension) {
    throw ArgumentError("block feature vector must have " + std::to_string(kDimension) +
                        " values, got " + std::to_string(v.size()));
  }
  BlockFeatures f;
  f.text_length = static_cast<int>(std::lround(v[0]));
  f.font_size = v[1];
  f.font_weight = v[2];
  f.is_italic = static_cast<int>(std::lround(v[3]));
  f.is_underlined = static_cast<int>(std::lround(v[4]));
  f.dom_depth = static_cast<int>(std::lround(v[5]));
  f.tag_code = static_cast<TagCode>(std::lround(v[6]));
  f.is_promoted_inline = static_cast<int>(std::lround(v[7]));
  for (std::size_t i = 0; i < f.lol.values.size(); ++i) {
    f.lol.values[i] = static_cast<int>(std::lround(v[kScalarCount + i]));
  }
  return f;
}

BlockFeatures extract_block_features(const BlockContext& ctx, const std::string* text_override) {
  if (ctx.path.empty()) throw ArgumentError("block context has an empty path");
  const DomNode& el = *ctx.path.back();
  static const StyleSheet kEmpty;
  const StyleSheet& sheet = ctx.sheet ? *ctx.sheet : kEmpty;

  const std::string text = text_override ? *text_override : visible_text(el);
  const ComputedStyle style = compute_style(ctx.path, sheet);

  BlockFeatures f;
  f.text_length = static_cast<int>(text::utf8_length(text));
  f.font_size = style.font_size_px < 0 ? -1 : std::round(style.font_size_px * 100.0) / 100.0;
  f.font_weight = style.font_weight;
  f.is_italic = style.italic ? 1 : 0;
  f.is_underlined = style.underline ? 1 : 0;
  f.dom_depth = static_cast<int>(ctx.path.size() - 1 - std::min(ctx.policy_index, ctx.path.size() - 1));
  f.tag_code = tag_code_for(el.tag);
  f.is_promoted_inline = ctx.promoted_inline ? 1 : 0;
  f.lol = parse_leading_ordinal_label(text);
  return f;
}

std::string_view to_string(BlockClass c) {
  switch (c) {
    case BlockClass::kTitleL1: return "title1";
    case BlockClass::kTitleL2: return "title2";
    case BlockClass::kTitleL3: return "title3";
    case BlockClass::kTitleL4: return "title4";
    case BlockClass::kParagraph: return "paragraph";
  }
  return "paragraph";
}

BlockClass parse_block_class(std::string_view s) {
  for (int i = 0; i < kBlockClassCount; ++i) {
    auto c = static_cast<BlockClass>(i);
    if (to_string(c) == s) return c;
  }
  throw ArgumentError("unknown block class: " + std::string(s));
}

}  // namespace ppkit
