// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/leading_label.hpp"

#include <array>
#include <optional>

#include "ppkit/text.hpp"

namespace ppkit {

namespace {

constexpr std::array<std::string_view, 10> kRoman = {"i",   "ii", "iii", "iv", "v",
                                                     "vi", "vii", "viii", "ix", "x"};

// Bullet-like marks that act as "other" labels.
constexpr std::array<std::string_view, 6> kOtherMarks = {"\xC2\xA7",      // §
                                                         "\xE2\x80\xA2",  // •
                                                         "\xE2\x97\xA6",  // ◦
                                                         "\xE2\x96\xAA",  // ▪
                                                         "\xE2\x80\xA3",  // ‣
                                                         "*"};

// Separator marks classified as "other".
constexpr std::array<std::string_view, 5> kOtherSeparators = {
    "-", "/", "\xE2\x80\x93" /* – */, "\xE2\x80\x94" /* — */, "]"};

struct SubLabel {
  LabelFormat format = LabelFormat::kNone;
  int value = 0;
  SeparatorFormat separator = SeparatorFormat::kNone;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alpha(char c) { return is_lower(c) || is_upper(c); }

std::optional<SubLabel> read_label_token(std::string_view s, std::size_t& pos) {
  SubLabel out;
  std::size_t start = pos;
  if (pos < s.size() && is_digit(s[pos])) {
    long long v = 0;
    while (pos < s.size() && is_digit(s[pos])) {
      if (v < 1000000) v = v * 10 + (s[pos] - '0');
      ++pos;
    }
    out.format = LabelFormat::kArabic;
    out.value = static_cast<int>(v);
    return out;
  }
  if (pos < s.size() && is_alpha(s[pos])) {
    while (pos < s.size() && is_alpha(s[pos])) ++pos;
    auto word = s.substr(start, pos - start);
    auto lower = text::to_lower(word);
    for (std::size_t i = 0; i < kRoman.size(); ++i) {
      if (lower == kRoman[i]) {
        bool same_case = true;
        for (char c : word) same_case = same_case && (is_lower(c) == is_lower(word[0]));
        if (!same_case) break;
        out.format = LabelFormat::kRoman;
        out.value = static_cast<int>(i) + 1;
        return out;
      }
    }
    if (word.size() == 1) {
      char c = word[0];
      out.format = is_lower(c) ? LabelFormat::kLowercase : LabelFormat::kUppercase;
      out.value = (is_lower(c) ? c - 'a' : c - 'A') + 1;
      return out;
    }
    pos = start;
    return std::nullopt;
  }
  for (auto mark : kOtherMarks) {
    if (s.substr(pos).starts_with(mark)) {
      pos += mark.size();
      out.format = LabelFormat::kOther;
      out.value = 1;
      return out;
    }
  }
  return std::nullopt;
}

// Reads the separator after a label. Returns false when the label is not
// followed by a separator, whitespace or the end of the text.
bool read_separator(std::string_view s, std::size_t& pos, bool parenthesized,
                    SeparatorFormat& sep) {
  if (pos >= s.size() || text::is_space(s[pos])) {
    sep = SeparatorFormat::kNone;
    return !parenthesized;
  }
  const char c = s[pos];
  if (parenthesized) {
    if (c != ')') return false;
    ++pos;
    sep = SeparatorFormat::kParenthesis;
    return true;
  }
  if (c == '.') sep = SeparatorFormat::kFullStop;
  else if (c == ':') sep = SeparatorFormat::kColon;
  else if (c == ')') sep = SeparatorFormat::kParenthesis;
  if (sep != SeparatorFormat::kNone) {
    ++pos;
    return true;
  }
  for (auto mark : kOtherSeparators) {
    if (s.substr(pos).starts_with(mark)) {
      pos += mark.size();
      sep = SeparatorFormat::kOther;
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t LolDescriptor::depth() const {
  std::size_t d = 0;
  while (d < kLevels && values[3 * d] != 0) ++d;
  return d;
}

LolDescriptor parse_leading_ordinal_label(std::string_view input) {
  LolDescriptor d;
  const auto s = text::trim(input);
  std::size_t pos = 0;
  std::size_t level = 0;
  while (level < LolDescriptor::kLevels && pos < s.size()) {
    std::size_t attempt = pos;
    bool parenthesized = false;
    if (s[attempt] == '(') {
      parenthesized = true;
      ++attempt;
    }
    auto label = read_label_token(s, attempt);
    if (!label) break;
    SeparatorFormat sep = SeparatorFormat::kNone;
    if (!read_separator(s, attempt, parenthesized, sep)) break;
    const bool word_like = label->format == LabelFormat::kLowercase ||
                           label->format == LabelFormat::kUppercase ||
                           label->format == LabelFormat::kRoman;
    if (level == 0 && word_like && sep == SeparatorFormat::kNone && !parenthesized) break;
    label->separator = sep;
    d.values[3 * level] = static_cast<int>(label->format);
    d.values[3 * level + 1] = label->value;
    d.values[3 * level + 2] = static_cast<int>(label->separator);
    ++level;
    pos = attempt;
    // Sub-labels are contiguous; whitespace ends the label.
    if (sep == SeparatorFormat::kNone || pos >= s.size() || text::is_space(s[pos])) break;
  }
  return d;
}

std::string to_string(const LolDescriptor& d) {
  std::string out = "[";
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(d.values[i]);
  }
  return out + "]";
}

}  // namespace ppkit
