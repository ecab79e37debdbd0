// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>

namespace ppkit {

enum class LabelFormat : int {
  kNone = 0,
  kArabic = 1,
  kLowercase = 2,
  kUppercase = 3,
  kRoman = 4,
  kOther = 5,
};

enum class SeparatorFormat : int {
  kNone = 0,
  kFullStop = 1,
  kColon = 2,
  kParenthesis = 3,
  kOther = 4,
};

/// Leading ordinal label descriptor: four (format, value, separator)
/// triples, one per heading level; unused triples are zero.
struct LolDescriptor {
  std::array<int, 12> values{};

  static constexpr std::size_t kLevels = 4;

  int label_format(std::size_t level) const { return values[3 * level]; }
  int label_value(std::size_t level) const { return values[3 * level + 1]; }
  int separator_format(std::size_t level) const { return values[3 * level + 2]; }
  /// Number of parsed sub-labels (0..4).
  std::size_t depth() const;
  bool empty() const { return depth() == 0; }

  bool operator==(const LolDescriptor&) const = default;
};

/// Parses up to four leading sub-labels such as "3.a.i", "ii)" or "(b)".
///
/// Roman numerals i..x win over single letters. A letter or Roman label at
/// the start needs a separator ("a." or "ii)"), so ordinary words like "A" or
/// "I" are not taken as labels; later sub-labels may end bare at whitespace.
LolDescriptor parse_leading_ordinal_label(std::string_view text);

std::string to_string(const LolDescriptor& d);

}  // namespace ppkit
