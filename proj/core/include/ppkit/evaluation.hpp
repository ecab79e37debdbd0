// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppkit/classifiers.hpp"
#include "ppkit/corpus.hpp"
#include "ppkit/metrics.hpp"
#include "ppkit/taxonomy.hpp"

namespace ppkit {

struct ConceptResult {
  std::string concept_id;
  int level = 1;
  ConfusionCounts counts;
  PrfScores scores;
  std::size_t support = 0;  ///< gold positive test nodes
  bool evaluated = false;   ///< support >= min_support
};

struct EvaluationOptions {
  std::size_t min_support = 5;
  bool include_descendants = true;  ///< gold positives include descendant labels
};

/// Scores of one (type, mode, seed) run.
struct MetricsReport {
  int type_id = 0;
  SplitMode mode = SplitMode::kDocument;
  std::uint64_t seed = 0;
  std::size_t min_support = 0;
  std::size_t test_nodes = 0;
  std::vector<ConceptResult> concepts;  ///< taxonomy order
  double macro_f1_level1 = 0.0;
  double macro_f1_all = 0.0;
  double macro_precision_all = 0.0;
  double macro_recall_all = 0.0;

  std::vector<std::string> evaluated_level1() const;
  std::vector<std::string> evaluated_all() const;
};

/// Scores `predictions` against the gold labels of `test_nodes`. The
/// prediction keys must be exactly the test node keys.
MetricsReport evaluate_run(const Predictions& predictions, const Corpus& corpus,
                           std::span<const std::size_t> test_nodes, const Taxonomy& t,
                           const EvaluationOptions& opts = {});

/// Per-concept rows: type_id,mode,concept_id,level,tp,fp,fn,tn,precision,recall,f1,support
std::string report_csv(std::span<const MetricsReport> reports);
/// Human-readable run summary including the evaluated concept sets.
std::string report_text(const MetricsReport& r);

/// One (type, mode) row of the comparison table, averaged over seeds.
struct ComparisonRow {
  int type_id = 0;
  SplitMode mode = SplitMode::kDocument;
  std::vector<std::uint64_t> seeds;
  double macro_f1_level1 = 0.0;
  double macro_f1_all = 0.0;
  std::size_t best_level1 = 0;   ///< level-1 concepts where this type has the top F1
  std::size_t total_level1 = 0;
  std::size_t best_all = 0;
  std::size_t total_all = 0;
};

/// Groups reports by (type, mode), averages macros over seeds and counts,
/// within each mode, the concepts where a type reaches the maximum mean F1
/// (ties count for every tied type).
std::vector<ComparisonRow> build_comparison(std::span<const MetricsReport> reports);

/// type_id,mode,seeds,macro_f1_level1,macro_f1_all,best_level1,total_level1,best_all,total_all
std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string comparison_table(std::span<const ComparisonRow> rows);

}  // namespace ppkit
