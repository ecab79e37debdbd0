// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppkit/corpus.hpp"
#include "ppkit/decision_forest.hpp"
#include "ppkit/features.hpp"
#include "ppkit/neural_net.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

/// Row list with positive rows duplicated (seeded, with replacement) until
/// positives / negatives >= ratio_target. Original rows come first and are
/// never removed. Throws ArgumentError("cannot upsample empty class") when
/// there is no positive row.
std::vector<std::size_t> upsample_positives(std::span<const std::size_t> rows, std::span<const int> labels,
                                            double ratio_target, std::uint64_t seed);

struct LcnParams {
  ForestParams forest = ForestParams::random_forest(100);
  std::size_t min_pos = 20;
  double upsample_ratio = 1.0 / 3.0;  ///< 0 disables upsampling
  double threshold = 0.5;
};

struct LcpnParams {
  MlpParams network;
  std::size_t min_pos = 1;  ///< positives a child needs to count as eligible
  double threshold = 0.5;
};

struct SkipEntry {
  std::string concept_id;
  std::string reason;
};

/// Per-parent network of the cascade. `outputs` are taxonomy indices of the
/// parent's children in file order.
struct ParentModel {
  std::size_t parent = 0;  ///< taxonomy index, or npos for the virtual root
  std::vector<std::size_t> outputs;
  std::optional<Mlp> network;               ///< set when >= 2 children are eligible
  std::optional<std::size_t> inherited_child;  ///< sole eligible child, emitted with its parent
};

/// Trained LCN or LCPN classifier set plus the resources its features need.
class HierarchyClassifier {
 public:
  Architecture architecture = Architecture::kLcn;
  FeatureConfig config;
  FeatureResources resources;
  std::uint64_t seed = 0;
  LcnParams lcn;
  LcpnParams lcpn;
  std::vector<SkipEntry> skipped;

  /// LCN: one optional forest per taxonomy index.
  std::vector<std::optional<DecisionForest>> concept_models;
  /// LCPN: index 0 is the virtual root, then one entry per taxonomy parent
  /// in file order.
  std::vector<ParentModel> parent_models;

  /// Taxonomy indices predicted for one feature row, closed under
  /// ancestors and sorted.
  std::vector<std::size_t> predict_row(std::span<const double> features, const Taxonomy& t) const;

  std::size_t trained_model_count() const;

  /// Bundle directory: `manifest`, vocabularies, keyword table and one
  /// model file per concept (LCNF1) or parent (LCPN1).
  void save(const std::filesystem::path& dir, const Taxonomy& t) const;
  /// Embeddings are not bundled; pass the store for embedding types.
  static HierarchyClassifier load(const std::filesystem::path& dir, const Taxonomy& t,
                                  std::shared_ptr<const EmbeddingStore> embeddings = nullptr);
};

inline constexpr const char* kLcnModelMagic = "LCNF1";
inline constexpr const char* kLcpnModelMagic = "LCPN1";

/// Positive rows for concept `c`: nodes labeled with `c` or a descendant.
bool node_has_concept(const AnnotatedNode& n, std::size_t concept_index, const Taxonomy& t);

/// Label closure: indices of every label and all its ancestors, sorted.
std::vector<std::size_t> label_closure(std::span<const std::string> labels, const Taxonomy& t);

HierarchyClassifier train_lcn(const Corpus& corpus, std::span<const std::size_t> train_nodes,
                              const FeatureConfig& cfg, const FeatureResources& resources, const Taxonomy& t,
                              const LcnParams& params, std::uint64_t seed, std::size_t jobs = 1);

HierarchyClassifier train_lcpn(const Corpus& corpus, std::span<const std::size_t> train_nodes,
                               const FeatureConfig& cfg, const FeatureResources& resources, const Taxonomy& t,
                               const LcpnParams& params, std::uint64_t seed, std::size_t jobs = 1);

/// Node key -> predicted concept ids (taxonomy order).
using Predictions = std::map<std::string, std::vector<std::string>>;

/// Predictions for the listed corpus nodes.
Predictions predict_nodes(const HierarchyClassifier& h, const Corpus& corpus, std::span<const std::size_t> nodes,
                          const Taxonomy& t, std::size_t jobs = 1);

/// Node id -> labels for every title and paragraph of one document. The
/// document id is used for embedding lookups.
std::map<std::string, std::vector<std::string>> predict_document_lcn(const HierarchyClassifier& h,
                                                                     const std::string& doc_id,
                                                                     const PolicyDocument& doc, const Taxonomy& t);
std::map<std::string, std::vector<std::string>> predict_document_lcpn(const HierarchyClassifier& h,
                                                                      const std::string& doc_id,
                                                                      const PolicyDocument& doc, const Taxonomy& t);

/// Cascade evaluation of LCPN root/parent scores. `scores[p]` holds the
/// outputs of parent_models[p] (empty when that parent has no network).
/// Exposed for property tests of the gate.
std::vector<std::size_t> lcpn_cascade(const HierarchyClassifier& h, const std::vector<std::vector<double>>& scores,
                                      const Taxonomy& t);

}  // namespace ppkit
