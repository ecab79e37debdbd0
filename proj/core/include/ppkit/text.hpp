// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ppkit::text {

bool is_space(char c);

/// Collapses runs of whitespace to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string_view trim(std::string_view s);

/// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

/// Lowercased alphanumeric runs. Bytes >= 0x80 count as word characters so
/// UTF-8 words stay whole.
std::vector<std::string> word_tokens(std::string_view s);

/// word_tokens() minus single-character tokens; the TF-IDF tokenizer.
std::vector<std::string> tfidf_tokens(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);
/// Parses a whole string as a double (C locale); throws FormatError.
double parse_double(std::string_view s);

/// Fixed-point rendering with the given number of decimals.
std::string format_fixed(double v, int decimals);

/// Splits one CSV record; fields may be double-quoted with "" escapes.
std::vector<std::string> csv_fields(std::string_view line);
/// Quotes `s` when it contains a comma or a quote.
std::string csv_escape(const std::string& s);

}  // namespace ppkit::text
