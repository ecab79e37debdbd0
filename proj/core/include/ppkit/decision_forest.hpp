// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ppkit/matrix.hpp"

namespace ppkit {

/// How a tree node picks its split among the sampled candidate features.
enum class SplitStrategy {
  kBestThreshold,    ///< exhaustive threshold search (random forest)
  kRandomThreshold,  ///< one uniform threshold per feature (extremely randomized trees)
};

struct ForestParams {
  std::size_t tree_count = 100;
  SplitStrategy strategy = SplitStrategy::kBestThreshold;
  bool bootstrap = true;
  std::size_t max_features = 0;  ///< 0 means round(sqrt(dimension))
  std::size_t max_depth = 0;     ///< 0 means unlimited
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;

  static ForestParams random_forest(std::size_t trees = 100);
  static ForestParams extra_trees(std::size_t trees = 200);
};

std::string to_string(SplitStrategy s);
SplitStrategy parse_split_strategy(const std::string& s);

/// Ensemble of Gini-criterion classification trees. Prediction averages the
/// per-tree leaf class distributions.
class DecisionForest {
 public:
  struct Node {
    std::int32_t feature = -1;  ///< -1 for leaves
    double threshold = 0.0;     ///< go left when x[feature] <= threshold
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t value = 0;    ///< offset of the leaf distribution
  };
  struct Tree {
    std::vector<Node> nodes;
    std::vector<double> values;
  };

  /// Trains on the rows of `x` listed in `rows` (duplicates allowed, e.g.
  /// after upsampling); an empty `rows` means every row once.
  static DecisionForest train(const Matrix& x, std::span<const int> labels, int class_count,
                              const ForestParams& params, std::uint64_t seed,
                              std::span<const std::size_t> rows = {});

  std::vector<double> predict_proba(std::span<const double> features) const;
  int predict(std::span<const double> features) const;

  std::size_t dimension() const { return dimension_; }
  int class_count() const { return class_count_; }
  std::uint64_t seed() const { return seed_; }
  const ForestParams& params() const { return params_; }
  const std::vector<Tree>& trees() const { return trees_; }

  void write(std::ostream& out) const;
  static DecisionForest read(std::istream& in);

  bool operator==(const DecisionForest& o) const;

 private:
  std::vector<Tree> trees_;
  std::size_t dimension_ = 0;
  int class_count_ = 0;
  std::uint64_t seed_ = 0;
  ForestParams params_;
};

}  // namespace ppkit
