// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/classifiers.hpp"
#include "ppkit/corpus.hpp"
#include "ppkit/evaluation.hpp"
#include "ppkit/html_pipeline.hpp"
#include "ppkit/features.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

/// Everything a train/evaluate run depends on. Read from a key=value file;
/// command-line flags override individual keys.
struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path taxonomy_path;
  std::filesystem::path keyword_path;
  std::filesystem::path embedding_path;
  std::filesystem::path model_dir;
  std::filesystem::path report_dir;
  std::filesystem::path split_file;

  double ratio_threshold = 0.55;
  std::vector<SplitMode> modes{SplitMode::kDocument};
  std::vector<std::uint64_t> seeds{1};
  std::size_t n_test = 30;
  double test_fraction = 0.2;
  std::vector<int> type_ids{1};
  std::size_t min_pos = 20;
  std::size_t min_support = 5;
  double upsample_ratio = 1.0 / 3.0;
  std::size_t forest_trees = 100;
  std::size_t hidden = 256;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;
  double learning_rate = 1e-3;
  std::size_t jobs = 1;

  /// Sets one key. Throws ArgumentError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Applies `key=value` lines; `#` starts a comment.
  void apply(std::string_view content);
  static PipelineConfig load(const std::filesystem::path& path);
  /// Canonical key=value rendering (for run provenance).
  std::string serialize() const;
  /// Checks numeric ranges and that referenced paths exist.
  void validate() const;

  LcnParams lcn_params() const;
  LcpnParams lcpn_params() const;
  std::filesystem::path resolved_taxonomy_path() const;
  std::filesystem::path resolved_keyword_path() const;
};

struct ExperimentInputs {
  const Corpus* corpus = nullptr;
  const Taxonomy* taxonomy = nullptr;
  std::shared_ptr<const KeywordTable> keywords;
  std::shared_ptr<const EmbeddingStore> embeddings;
};

struct RunArtifacts {
  SplitSpec split;
  HierarchyClassifier model;
  MetricsReport report;
  Diagnostics diagnostics;
};

SplitSpec make_split(const Corpus& corpus, SplitMode mode, std::uint64_t seed, const PipelineConfig& cfg);

/// Splits, fits features, trains the type's classifier and evaluates it on
/// the test side.
RunArtifacts run_experiment(const ExperimentInputs& in, int type_id, const SplitSpec& split,
                            const PipelineConfig& cfg);

/// Cartesian product of types x modes x seeds. Embedding types are skipped
/// with a warning when no store is available.
std::vector<MetricsReport> compare_frameworks(const ExperimentInputs& in, const PipelineConfig& cfg,
                                              Diagnostics* diag = nullptr);

}  // namespace ppkit
