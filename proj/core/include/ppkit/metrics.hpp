// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace ppkit {

/// Binary confusion counts for one concept.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  void add(bool predicted, bool actual) {
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1 with 0 for every zero denominator.
PrfScores precision_recall_f1(const ConfusionCounts& c);

/// Unweighted mean; 0 for an empty range.
double macro_average(std::span<const double> values);

}  // namespace ppkit
