// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/block_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "ppkit/error.hpp"
#include "ppkit/metrics.hpp"
#include "ppkit/random.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

BlockClass BlockClassifierModel::classify(const BlockFeatures& f) const {
  const auto v = f.to_vector();
  return classify(std::span<const double>(v.data(), v.size()));
}

BlockClass BlockClassifierModel::classify(std::span<const double> v) const {
  return static_cast<BlockClass>(forest_.predict(v));
}

void BlockClassifierModel::write(std::ostream& out) const {
  out << kBlockModelMagic << "\n";
  forest_.write(out);
}

BlockClassifierModel BlockClassifierModel::read(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != kBlockModelMagic) {
    throw FormatError("not a block classifier model (expected " + std::string(kBlockModelMagic) + " header)");
  }
  auto forest = DecisionForest::read(in);
  if (forest.class_count() != kBlockClassCount) throw FormatError("block model must have 5 classes");
  return BlockClassifierModel(std::move(forest));
}

void BlockClassifierModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write(out);
}

BlockClassifierModel BlockClassifierModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read(in);
}

BlockClassifierModel train_block_classifier(std::span<const BlockSample> samples, std::uint64_t seed,
                                            const ForestParams& params) {
  if (samples.empty()) throw ArgumentError("empty sample list");
  std::set<BlockClass> classes;
  for (const auto& s : samples) classes.insert(s.label);
  if (classes.size() < 2) throw ArgumentError("single class");
  Matrix x(0, 0);
  std::vector<int> y;
  y.reserve(samples.size());
  for (const auto& s : samples) {
    const auto v = s.features.to_vector();
    x.append_row(v);
    y.push_back(static_cast<int>(s.label));
  }
  return BlockClassifierModel(DecisionForest::train(x, y, kBlockClassCount, params, seed));
}

std::vector<BlockClass> classify_blocks(const BlockClassifierModel& model,
                                        std::span<const BlockFeatures> blocks) {
  std::vector<BlockClass> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(model.classify(b));
  return out;
}

double block_macro_f1(std::span<const BlockClass> gold, std::span<const BlockClass> predicted) {
  if (gold.size() != predicted.size()) throw ArgumentError("gold/prediction length mismatch");
  std::vector<double> f1s;
  for (int c = 0; c < kBlockClassCount; ++c) {
    ConfusionCounts cc;
    bool seen = false;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool a = static_cast<int>(gold[i]) == c;
      const bool p = static_cast<int>(predicted[i]) == c;
      seen = seen || a || p;
      cc.add(p, a);
    }
    if (seen) f1s.push_back(precision_recall_f1(cc).f1);
  }
  return macro_average(f1s);
}

namespace {

// Fold index per sample: each class is shuffled and dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const BlockSample> samples, std::size_t folds,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> fold(samples.size(), 0);
  std::size_t offset = 0;
  for (int c = 0; c < kBlockClassCount; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (static_cast<int>(samples[i].label) == c) idx.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t j = 0; j < idx.size(); ++j) fold[idx[j]] = (offset + j) % folds;
    offset += idx.size();
  }
  return fold;
}

double score_fold(std::span<const BlockSample> samples, const std::vector<bool>& is_test, std::uint64_t seed,
                  const ForestParams& params) {
  std::vector<BlockSample> train;
  std::vector<BlockFeatures> test;
  std::vector<BlockClass> gold;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (is_test[i]) {
      test.push_back(samples[i].features);
      gold.push_back(samples[i].label);
    } else {
      train.push_back(samples[i]);
    }
  }
  const auto model = train_block_classifier(train, seed, params);
  const auto pred = classify_blocks(model, test);
  return block_macro_f1(gold, pred);
}

}  // namespace

BlockCvResult cross_validate_blocks(std::span<const BlockSample> samples, std::size_t folds,
                                    std::uint64_t seed, const ForestParams& params) {
  if (folds < 2) throw ArgumentError("need at least 2 folds");
  if (samples.size() < folds) throw ArgumentError("fewer samples than folds");
  const auto fold = stratified_folds(samples, folds, seed);
  BlockCvResult r;
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<bool> is_test(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) is_test[i] = fold[i] == k;
    r.fold_f1.push_back(score_fold(samples, is_test, derive_seed(seed, k + 1), params));
  }
  r.mean_f1 = macro_average(r.fold_f1);
  return r;
}

double holdout_block_f1(std::span<const BlockSample> samples, double test_fraction, std::uint64_t seed,
                        const ForestParams& params) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ArgumentError("test_fraction must be in (0, 1)");
  const auto folds = static_cast<std::size_t>(std::lround(1.0 / test_fraction));
  const auto fold = stratified_folds(samples, std::max<std::size_t>(2, folds), seed);
  std::vector<bool> is_test(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) is_test[i] = fold[i] == 0;
  return score_fold(samples, is_test, derive_seed(seed, 1), params);
}

std::string block_samples_csv(std::span<const BlockSample> samples, std::span<const std::string> texts) {
  if (!texts.empty() && texts.size() != samples.size()) throw ArgumentError("one text per block sample expected");
  std::string out = "class";
  for (std::size_t i = 0; i < BlockFeatures::kDimension; ++i) out += ",f" + std::to_string(i);
  if (!texts.empty()) out += ",text";
  out += '\n';
  for (std::size_t r = 0; r < samples.size(); ++r) {
    out += to_string(samples[r].label);
    for (double v : samples[r].features.to_vector()) out += "," + text::format_double(v);
    if (!texts.empty()) out += "," + text::csv_escape(text::collapse_whitespace(texts[r]));
    out += '\n';
  }
  return out;
}

std::vector<BlockSample> parse_block_samples_csv(std::string_view csv) {
  std::vector<BlockSample> out;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(csv, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || (line_no == 1 && line.substr(0, 5) == "class")) continue;
    const auto fields = text::csv_fields(line);
    if (fields.size() < 1 + BlockFeatures::kDimension) {
      throw FormatError("block sample line " + std::to_string(line_no) + ": expected " +
                        std::to_string(1 + BlockFeatures::kDimension) + " fields");
    }
    BlockSample s;
    s.label = parse_block_class(text::trim(fields[0]));
    std::vector<double> v(BlockFeatures::kDimension);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = text::parse_double(text::trim(fields[i + 1]));
    s.features = BlockFeatures::from_vector(v);
    out.push_back(s);
  }
  return out;
}

}  // namespace ppkit
