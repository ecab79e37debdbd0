// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppkit/corpus.hpp"
#include "ppkit/error.hpp"
#include "ppkit/matrix.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

/// TF-IDF vocabulary: the most frequent terms by document frequency.
class Vocabulary {
 public:
  struct Term {
    std::string term;
    std::size_t df = 0;
    bool operator==(const Term&) const = default;
  };

  /// Tokenizes with text::tfidf_tokens() and keeps the `dim` terms with the
  /// highest document frequency (ties: lexicographic). Shrinks with a
  /// warning when fewer terms exist. Throws ArgumentError("empty corpus
  /// vocabulary") when no term is found.
  static Vocabulary fit(std::span<const std::string> texts, std::size_t dim, Diagnostics* diag = nullptr);

  /// tf * ln(N / df), L2-normalized unless all zero.
  std::vector<double> transform(std::string_view text) const;
  void transform_into(std::string_view text, std::span<double> out) const;

  std::size_t dimension() const { return terms_.size(); }
  std::size_t document_count() const { return doc_count_; }
  const std::vector<Term>& terms() const { return terms_; }
  /// Position of `term` or npos.
  std::size_t index_of(std::string_view term) const;

  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  bool operator==(const Vocabulary& o) const { return doc_count_ == o.doc_count_ && terms_ == o.terms_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Term> terms_;
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

inline Vocabulary fit_tfidf(std::span<const std::string> texts, std::size_t dim, Diagnostics* diag = nullptr) {
  return Vocabulary::fit(texts, dim, diag);
}
inline std::vector<double> transform_tfidf(const Vocabulary& v, std::string_view text) { return v.transform(text); }

/// Keywords per concept in taxonomy order; each keyword is stored as its
/// token sequence and matches whole tokens only.
class KeywordTable {
 public:
  /// Parses `concept_id,keyword` CSV. Every taxonomy concept needs at least
  /// one keyword.
  static KeywordTable parse(std::string_view csv, const Taxonomy& t);
  static KeywordTable load(const std::filesystem::path& path, const Taxonomy& t);

  std::size_t size() const { return keywords_.size(); }
  const std::vector<std::string>& keywords(std::size_t concept_index) const { return raw_[concept_index]; }

  /// One bit per concept: does any of its keywords occur in `text`?
  std::vector<double> vector_for(std::string_view text) const;
  void vector_into(std::string_view text, std::span<double> out) const;

  std::string to_csv(const Taxonomy& t) const;

 private:
  std::vector<std::vector<std::vector<std::string>>> keywords_;
  std::vector<std::vector<std::string>> raw_;
};

inline std::vector<double> keyword_vector(const KeywordTable& kt, std::string_view text) {
  return kt.vector_for(text);
}

/// Precomputed text embeddings keyed by "<doc-id>/<node-id>".
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(const EmbeddingStore& o) : dim_(o.dim_), vectors_(o.vectors_) {}

  static EmbeddingStore parse(std::string_view content);
  static EmbeddingStore load(const std::filesystem::path& path);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(std::string_view key) const { return vectors_.count(std::string(key)) > 0; }

  /// Copies the vector for `key` into `out`; writes zeros and counts a miss
  /// when the key is absent.
  void lookup_into(std::string_view key, std::span<double> out) const;
  std::vector<double> lookup(std::string_view key) const;
  std::size_t missing_lookups() const { return missing_.load(); }

  void insert(std::string key, std::vector<double> v);
  std::string serialize() const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  mutable std::atomic<std::size_t> missing_{0};
};

inline EmbeddingStore load_embeddings(const std::filesystem::path& path) { return EmbeddingStore::load(path); }

enum class FeatureSource { kTfidf, kEmbedding };
enum class Architecture { kLcn, kLcpn };
std::string to_string(Architecture a);
Architecture parse_architecture(std::string_view s);

/// One of the twelve classifier configurations.
struct FeatureConfig {
  int type_id = 1;
  FeatureSource source = FeatureSource::kTfidf;
  Architecture architecture = Architecture::kLcn;
  bool use_context = false;
  bool use_keywords = false;
  std::size_t current_dim = 300;
  std::size_t parent_dim = 0;
  std::size_t sibling_dim = 0;
  std::size_t keyword_dim = 0;

  static constexpr std::size_t kCurrentTfidfDim = 300;
  static constexpr std::size_t kParentTfidfDim = 100;
  static constexpr std::size_t kKeywordDim = 96;

  /// Throws ArgumentError for type ids outside 1..12 and
  /// "embedding store required for type N" when an embedding type is
  /// requested with `embedding_dim` 0.
  static FeatureConfig for_type(int type_id, std::size_t embedding_dim = 0);
  static bool needs_embeddings(int type_id);

  std::size_t dimension() const { return current_dim + parent_dim + sibling_dim + keyword_dim; }
  std::string describe() const;
};

/// Fitted resources for assembling feature vectors.
struct FeatureResources {
  std::shared_ptr<const Vocabulary> current;  ///< 300-term vocabulary over node texts
  std::shared_ptr<const Vocabulary> parent;   ///< 100-term vocabulary over title texts
  std::shared_ptr<const KeywordTable> keywords;
  std::shared_ptr<const EmbeddingStore> embeddings;
};

/// Fits the vocabularies a configuration needs on the training nodes.
FeatureResources fit_feature_resources(const FeatureConfig& cfg, const Corpus& corpus,
                                       std::span<const std::size_t> train_nodes,
                                       std::shared_ptr<const KeywordTable> keywords,
                                       std::shared_ptr<const EmbeddingStore> embeddings,
                                       Diagnostics* diag = nullptr);

/// Throws ArgumentError naming the first resource `cfg` needs but `r` lacks.
void check_resources(const FeatureConfig& cfg, const FeatureResources& r);

/// [current | parent | sibling | keywords]; absent context is all zeros.
std::vector<double> assemble_features(const FeatureConfig& cfg, const AnnotatedNode& node,
                                      const FeatureResources& r);

/// Feature rows for the listed nodes, in order.
Matrix assemble_matrix(const FeatureConfig& cfg, const Corpus& corpus, std::span<const std::size_t> nodes,
                       const FeatureResources& r);

}  // namespace ppkit
