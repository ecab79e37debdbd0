// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppkit/ppxml.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

/// "<doc-id>/<node-id>", the key used by splits and embedding stores.
std::string make_node_key(std::string_view doc_id, std::string_view node_id);

/// Title or paragraph with its context, flattened out of a document.
struct AnnotatedNode {
  std::string doc_id;
  std::string node_id;
  bool is_title = false;
  std::string text;  ///< element text followed by the text of its list items
  std::vector<std::string> labels;
  std::optional<std::string> parent_title_id;
  std::optional<std::string> preceding_sibling_id;
  std::string parent_title_text;
  std::string preceding_sibling_text;

  std::string key() const { return make_node_key(doc_id, node_id); }
};

/// Text of a title or paragraph including all nested list items.
std::string element_text(const TextElement& e);

struct CorpusDocument {
  std::string id;
  PolicyDocument document;
};

struct CorpusSummary {
  std::size_t documents = 0;
  std::size_t titles = 0;
  std::size_t paragraphs = 0;
  std::size_t labeled_nodes = 0;
};

/// Annotated PP-XML documents sorted by id plus a flat node index in
/// document order.
class Corpus {
 public:
  /// Validates document ids and labels (normalizing label order).
  static Corpus from_documents(std::vector<CorpusDocument> docs, const Taxonomy& taxonomy);

  const std::vector<CorpusDocument>& documents() const { return docs_; }
  const std::vector<AnnotatedNode>& nodes() const { return nodes_; }
  /// Node indices of document `doc_index`, in document order.
  std::span<const std::size_t> document_nodes(std::size_t doc_index) const { return doc_nodes_[doc_index]; }
  /// Index of the node with `key`; throws ArgumentError for unknown keys.
  std::size_t node_index(std::string_view key) const;
  bool contains_node(std::string_view key) const;
  std::size_t document_index(std::string_view doc_id) const;
  CorpusSummary summary() const;

 private:
  std::vector<CorpusDocument> docs_;
  std::vector<AnnotatedNode> nodes_;
  std::vector<std::vector<std::size_t>> doc_nodes_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> doc_index_;
};

/// Loads every `<doc-id>.ppxml` in `dir`. Per-file failures are aggregated
/// into one FormatError naming each file.
Corpus load_corpus(const std::filesystem::path& dir, const Taxonomy& taxonomy, std::size_t jobs = 1);

enum class SplitMode { kSegment, kDocument };
std::string to_string(SplitMode m);
SplitMode parse_split_mode(std::string_view s);

/// Train/test partition: document ids in document mode, node keys in
/// segment mode.
struct SplitSpec {
  SplitMode mode = SplitMode::kDocument;
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  bool operator==(const SplitSpec&) const = default;
};

/// Seeded choice of `n_test` whole test documents.
SplitSpec split_document_level(const Corpus& c, std::size_t n_test, std::uint64_t seed);
/// Seeded split of all pooled nodes; round(test_fraction * N) nodes, at
/// least one on each side.
SplitSpec split_segment_level(const Corpus& c, double test_fraction, std::uint64_t seed);

struct ResolvedSplit {
  std::vector<std::size_t> train;  ///< node indices, corpus order
  std::vector<std::size_t> test;
};

/// Maps a split onto node indices. Throws ArgumentError for ids that are not
/// in the corpus.
ResolvedSplit resolve_split(const Corpus& c, const SplitSpec& s);

std::string serialize_split(const SplitSpec& s);
SplitSpec parse_split(std::string_view content);

/// Cohen's kappa of two binary judgment lists. Returns 1 when both raters
/// agree perfectly, including the chance-agreement-1 case.
double cohens_kappa(std::span<const bool> a, std::span<const bool> b);

struct AgreementReport {
  std::vector<std::pair<std::string, double>> per_document;  ///< doc id, mean kappa
  double mean = 0.0;
  std::string unit = "per-concept node-level presence, averaged over concepts then documents";
};

/// Agreement between two annotations of the same documents: for each
/// document, kappa per concept used by either annotator over that
/// document's nodes, averaged; then averaged across documents.
AgreementReport annotation_agreement(const Corpus& a, const Corpus& b);

struct CoverageRow {
  std::string concept_id;
  std::size_t docs_covered = 0;
  double coverage_fraction = 0.0;
};

/// Fraction of documents with at least one node labeled with the concept
/// (or, with `include_descendants`, one of its descendants).
std::vector<CoverageRow> corpus_statistics(const Corpus& c, const Taxonomy& t, bool include_descendants = true);
std::string coverage_csv(std::span<const CoverageRow> rows);

}  // namespace ppkit
