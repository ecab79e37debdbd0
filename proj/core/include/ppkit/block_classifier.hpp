// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppkit/block_features.hpp"
#include "ppkit/decision_forest.hpp"

namespace ppkit {

struct BlockSample {
  BlockFeatures features;
  BlockClass label = BlockClass::kParagraph;
};

/// Title/paragraph classifier over the 20-D block features.
class BlockClassifierModel {
 public:
  BlockClassifierModel() = default;
  explicit BlockClassifierModel(DecisionForest forest) : forest_(std::move(forest)) {}

  BlockClass classify(const BlockFeatures& f) const;
  /// Throws ArgumentError when `v` does not have the model's dimension.
  BlockClass classify(std::span<const double> v) const;

  const DecisionForest& forest() const { return forest_; }

  void write(std::ostream& out) const;
  static BlockClassifierModel read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static BlockClassifierModel load(const std::filesystem::path& path);

 private:
  DecisionForest forest_;
};

inline constexpr const char* kBlockModelMagic = "PPSB1";

/// Extremely randomized trees, 200 by default. Throws ArgumentError("empty
/// sample list") or ArgumentError("single class").
BlockClassifierModel train_block_classifier(std::span<const BlockSample> samples, std::uint64_t seed,
                                            const ForestParams& params = ForestParams::extra_trees(200));

std::vector<BlockClass> classify_blocks(const BlockClassifierModel& model,
                                        std::span<const BlockFeatures> blocks);

/// Macro F1 over the classes that occur in gold or prediction.
double block_macro_f1(std::span<const BlockClass> gold, std::span<const BlockClass> predicted);

struct BlockCvResult {
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
};

/// Stratified k-fold cross validation of train_block_classifier().
BlockCvResult cross_validate_blocks(std::span<const BlockSample> samples, std::size_t folds,
                                    std::uint64_t seed,
                                    const ForestParams& params = ForestParams::extra_trees(200));

/// Stratified holdout: trains on 1 - test_fraction, returns macro F1 on the rest.
double holdout_block_f1(std::span<const BlockSample> samples, double test_fraction, std::uint64_t seed,
                        const ForestParams& params = ForestParams::extra_trees(200));

/// Labeled block table: a header, then `class,f0,...,f19[,text]` per row.
/// The optional trailing text column is ignored on read and exists so that
/// people can correct labels by looking at the blocks.
std::string block_samples_csv(std::span<const BlockSample> samples,
                              std::span<const std::string> texts = {});
std::vector<BlockSample> parse_block_samples_csv(std::string_view csv);

}  // namespace ppkit
