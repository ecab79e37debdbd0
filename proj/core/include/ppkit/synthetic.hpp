// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ppkit/block_classifier.hpp"
#include "ppkit/corpus.hpp"
#include "ppkit/random.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

/// Parameters of a corpus whose concept signal is mostly document-private:
/// each (document, concept) pair gets its own trigger word, so a model can
/// only exploit it when nodes of the same document sit on both sides of a
/// split.
struct LeakageCorpusParams {
  std::size_t documents = 50;
  std::vector<std::string> concepts = {"CONTROLLER",   "DATA SUBJECT RIGHT", "PD ORIGIN",   "PD SECURITY",
                                       "DATA SHARING", "LAWFUL BASIS",       "PD CATEGORY", "PROCESSING PURPOSES"};
  std::size_t concepts_per_document = 4;
  std::size_t paragraphs_per_concept = 3;
  std::size_t filler_paragraphs = 2;   ///< unlabeled paragraphs per document
  std::size_t words_per_paragraph = 12;
  std::size_t filler_vocabulary = 40;  ///< shared words, carry no label signal
  double shared_signal_rate = 0.25;    ///< chance a labeled paragraph also carries its concept's shared word
};

/// Generated documents (ids "doc000".."docNNN"); pass to Corpus::from_documents().
std::vector<CorpusDocument> make_leakage_corpus(const Taxonomy& t, const LeakageCorpusParams& p, std::uint64_t seed);

/// Lowercase pseudo-word of `length` letters.
std::string random_word(Rng& rng, std::size_t length);

/// Block samples where titles are short, bold, large and carry a leading
/// label as deep as their level, and paragraphs are long and plain.
std::vector<BlockSample> make_separable_blocks(std::size_t per_class, std::uint64_t seed);

}  // namespace ppkit
