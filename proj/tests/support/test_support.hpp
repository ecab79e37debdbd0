// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

// Generators and reference implementations shared by the unit, property and
// acceptance tests. Nothing here calls into the code under test except to
// build inputs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ppkit/corpus.hpp"
#include "ppkit/dom.hpp"
#include "ppkit/ppxml.hpp"
#include "ppkit/random.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit::testing {

const Taxonomy& shipped_taxonomy();

/// Lowercase pseudo-word, 2..8 letters.
std::string word(Rng& rng);
/// `n` words joined by single spaces.
std::string words(Rng& rng, std::size_t n);

/// Random schema-valid document: nested segments (levels may skip),
/// paragraphs with nested lists, awkward characters in text, labels drawn
/// from `t` when given. Node ids are assigned.
PolicyDocument random_document(Rng& rng, const Taxonomy* t = nullptr);

/// Small labeled corpus of `docs` random documents.
Corpus random_corpus(Rng& rng, std::size_t docs, const Taxonomy& t);

/// Page whose policy content sits in one planted element: its element
/// children all have the same visible length and together hold at least 90%
/// of the page text.
struct PlantedPage {
  std::string html;
  std::string planted_id;  ///< id attribute of the planted element
};
PlantedPage planted_page(Rng& rng);

/// Brute-force oracle: the deepest element with at least one element child,
/// all element children of equal text length, and at least 90% of the text
/// under `root`. Lengths are computed independently of the library.
const DomNode* planted_oracle(const DomNode& root);

/// Reference visible-text length: characters of all descendant text runs
/// with each run trimmed and runs joined by one space.
std::size_t reference_text_length(const DomNode& node);

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& content);

/// Writes every document of `c` as <id>.ppxml into `dir`.
void write_corpus(const Corpus& c, const std::filesystem::path& dir);

}  // namespace ppkit::testing
