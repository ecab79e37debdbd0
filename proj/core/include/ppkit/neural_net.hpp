// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ppkit/matrix.hpp"

namespace ppkit {

struct MlpParams {
  std::size_t hidden = 256;
  double learning_rate = 1e-3;  ///< Adam step size
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;           ///< epochs without validation improvement
  double validation_fraction = 0.1;   ///< held out from the training rows
};

struct MlpTrainingLog {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
};

/// One-hidden-layer network: ReLU hidden units, one sigmoid per output,
/// trained on binary cross-entropy with Adam and early stopping.
class Mlp {
 public:
  /// `targets` holds one 0/1 column per output. Only `rows` are used.
  static Mlp train(const Matrix& x, const Matrix& targets, std::span<const std::size_t> rows,
                   const MlpParams& params, std::uint64_t seed, MlpTrainingLog* log = nullptr);

  /// Sigmoid outputs for one input row.
  std::vector<double> predict(std::span<const double> features) const;

  std::size_t input_dimension() const { return inputs_; }
  std::size_t output_count() const { return outputs_; }
  std::size_t hidden() const { return hidden_; }
  bool all_finite() const;

  void write(std::ostream& out) const;
  static Mlp read(std::istream& in);
  bool operator==(const Mlp&) const = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> w1_;  ///< hidden x inputs, column-major
  std::vector<double> b1_;
  std::vector<double> w2_;  ///< outputs x hidden, column-major
  std::vector<double> b2_;
};

}  // namespace ppkit
