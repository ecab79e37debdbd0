// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/decision_forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ppkit/error.hpp"
#include "ppkit/random.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

ForestParams ForestParams::random_forest(std::size_t trees) {
  ForestParams p;
  p.tree_count = trees;
  p.strategy = SplitStrategy::kBestThreshold;
  p.bootstrap = true;
  return p;
}

ForestParams ForestParams::extra_trees(std::size_t trees) {
  ForestParams p;
  p.tree_count = trees;
  p.strategy = SplitStrategy::kRandomThreshold;
  p.bootstrap = false;
  return p;
}

std::string to_string(SplitStrategy s) {
  return s == SplitStrategy::kBestThreshold ? "best" : "random";
}

SplitStrategy parse_split_strategy(const std::string& s) {
  if (s == "best") return SplitStrategy::kBestThreshold;
  if (s == "random") return SplitStrategy::kRandomThreshold;
  throw FormatError("unknown split strategy: " + s);
}

namespace {

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini, lower is better
};

double gini_from_counts(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

class TreeBuilder {
 public:
  // `columns` holds the training matrix column-major: split search reads
  // one feature across many rows.
  TreeBuilder(std::span<const double> columns, std::size_t row_count, std::size_t col_count,
              std::span<const int> labels, int class_count, const ForestParams& params,
              std::size_t max_features, Rng& rng)
      : columns_(columns),
        row_count_(row_count),
        labels_(labels),
        k_(class_count),
        params_(params),
        max_features_(max_features),
        rng_(rng),
        features_(col_count) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionForest::Tree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    tree_ = {};
    tree_.nodes.emplace_back();
    struct Task {
      std::uint32_t node;
      std::size_t begin, end, depth;
      std::vector<char> constant;  // features known to be constant on the rows
    };
    std::vector<Task> stack;
    stack.push_back({0, 0, rows_.size(), 0, std::vector<char>(features_.size(), 0)});
    while (!stack.empty()) {
      Task t = std::move(stack.back());
      stack.pop_back();
      std::vector<double> counts = class_counts(t.begin, t.end);
      const double n = static_cast<double>(t.end - t.begin);
      const double parent_gini = gini_from_counts(counts, n);
      bool can_split = parent_gini > 0.0 && t.end - t.begin >= params_.min_samples_split &&
                       (params_.max_depth == 0 || t.depth < params_.max_depth);
      Split best;
      if (can_split) best = find_split(t.begin, t.end, t.constant);
      if (best.feature < 0) {
        make_leaf(t.node, counts, n);
        continue;
      }
      auto mid_it = std::partition(rows_.begin() + t.begin, rows_.begin() + t.end,
                                   [&](std::size_t r) { return x_(r, best.feature) <= best.threshold; });
      const std::size_t mid = static_cast<std::size_t>(mid_it - rows_.begin());
      const auto left = static_cast<std::uint32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      auto& node = tree_.nodes[t.node];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      // Right first so the left subtree is laid out first.
      stack.push_back({left + 1, mid, t.end, t.depth + 1, t.constant});
      stack.push_back({left, t.begin, mid, t.depth + 1, std::move(t.constant)});
    }
    return std::move(tree_);
  }

 private:
  std::vector<double> class_counts(std::size_t b, std::size_t e) const {
    std::vector<double> c(k_, 0.0);
    for (std::size_t i = b; i < e; ++i) c[labels_[rows_[i]]] += 1.0;
    return c;
  }

  void make_leaf(std::uint32_t node, const std::vector<double>& counts, double n) {
    tree_.nodes[node].feature = -1;
    tree_.nodes[node].value = static_cast<std::uint32_t>(tree_.values.size());
    for (double c : counts) tree_.values.push_back(n > 0 ? c / n : 0.0);
  }

  // Samples features without replacement until max_features non-constant ones
  // were evaluated (or all features are exhausted). A feature constant on a
  // node stays constant below it, so `known_constant` is inherited and the
  // scan is skipped; the draw sequence is unaffected.
  Split find_split(std::size_t b, std::size_t e, std::vector<char>& known_constant) {
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
    std::size_t remaining = features_.size();
    while (remaining > 0 && evaluated < max_features_) {
      const std::size_t pick = rng_.uniform_index(remaining);
      std::swap(features_[pick], features_[remaining - 1]);
      const std::size_t f = features_[--remaining];
      if (known_constant[f]) continue;
      bool constant = true;
      Split s = params_.strategy == SplitStrategy::kBestThreshold ? best_threshold(f, b, e, constant)
                                                                  : random_threshold(f, b, e, constant);
      if (constant) {
        known_constant[f] = 1;
        continue;
      }
      ++evaluated;
      if (s.feature >= 0 && s.impurity < best.impurity) best = s;
    }
    return best;
  }

  Split best_threshold(std::size_t f, std::size_t b, std::size_t e, bool& constant) {
    Split out;
    // Sparse inputs make most features constant deep in the tree; rule
    // them out before sorting.
    const double first = x_(rows_[b], f);
    std::size_t i0 = b + 1;
    while (i0 < e && x_(rows_[i0], f) == first) ++i0;
    if (i0 == e) return out;
    constant = false;
    pairs_.clear();
    for (std::size_t i = b; i < e; ++i) pairs_.emplace_back(x_(rows_[i], f), labels_[rows_[i]]);
    // Only boundaries between distinct values are scored, so the order of
    // tied values is irrelevant: zeros need no sorting.
    auto by_value = [](const auto& a, const auto& c) { return a.first < c.first; };
    auto neg_end = std::partition(pairs_.begin(), pairs_.end(), [](const auto& p) { return p.first < 0.0; });
    auto zero_end = std::partition(neg_end, pairs_.end(), [](const auto& p) { return p.first == 0.0; });
    std::sort(pairs_.begin(), neg_end, by_value);
    std::sort(zero_end, pairs_.end(), by_value);
    const std::size_t n = pairs_.size();
    std::vector<double> left(k_, 0.0), right(k_, 0.0);
    for (const auto& p : pairs_) right[p.second] += 1.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left[pairs_[i].second] += 1.0;
      right[pairs_[i].second] -= 1.0;
      if (pairs_[i].first == pairs_[i + 1].first) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double imp = (nl * gini_from_counts(left, nl) + nr * gini_from_counts(right, nr)) / n;
      if (imp < best) {
        best = imp;
        out.feature = static_cast<std::int32_t>(f);
        out.threshold = pairs_[i].first + (pairs_[i + 1].first - pairs_[i].first) / 2.0;
        // Guard against the midpoint rounding onto the upper value.
        if (!(out.threshold < pairs_[i + 1].first)) out.threshold = pairs_[i].first;
        out.impurity = imp;
      }
    }
    return out;
  }

  Split random_threshold(std::size_t f, std::size_t b, std::size_t e, bool& constant) {
    double lo = x_(rows_[b], f), hi = lo;
    for (std::size_t i = b + 1; i < e; ++i) {
      const double v = x_(rows_[i], f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Split out;
    if (lo == hi) return out;
    constant = false;
    double thr = rng_.uniform_real(lo, hi);
    if (!(thr < hi)) thr = lo;
    std::vector<double> left(k_, 0.0), right(k_, 0.0);
    double nl = 0, nr = 0;
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t r = rows_[i];
      if (x_(r, f) <= thr) {
        left[labels_[r]] += 1.0;
        nl += 1;
      } else {
        right[labels_[r]] += 1.0;
        nr += 1;
      }
    }
    const double min_leaf = static_cast<double>(std::max<std::size_t>(1, params_.min_samples_leaf));
    if (nl < min_leaf || nr < min_leaf) return out;
    out.feature = static_cast<std::int32_t>(f);
    out.threshold = thr;
    out.impurity = (nl * gini_from_counts(left, nl) + nr * gini_from_counts(right, nr)) / (nl + nr);
    return out;
  }

  double x_(std::size_t r, std::size_t f) const { return columns_[f * row_count_ + r]; }

  std::span<const double> columns_;
  std::size_t row_count_;
  std::span<const int> labels_;
  int k_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> rows_;
  std::vector<std::pair<double, int>> pairs_;
  DecisionForest::Tree tree_;
};

}  // namespace

DecisionForest DecisionForest::train(const Matrix& x, std::span<const int> labels, int class_count,
                                     const ForestParams& params, std::uint64_t seed,
                                     std::span<const std::size_t> rows) {
  if (x.rows() == 0) throw ArgumentError("empty training set");
  if (labels.size() != x.rows()) throw ArgumentError("label count does not match sample count");
  if (class_count < 2) throw ArgumentError("class_count must be >= 2");
  if (params.tree_count == 0) throw ArgumentError("tree_count must be >= 1");
  for (int y : labels) {
    if (y < 0 || y >= class_count) throw ArgumentError("label out of range");
  }
  std::vector<std::size_t> base;
  if (rows.empty()) {
    base.resize(x.rows());
    std::iota(base.begin(), base.end(), 0);
  } else {
    base.assign(rows.begin(), rows.end());
    for (std::size_t r : base) {
      if (r >= x.rows()) throw ArgumentError("row index out of range");
    }
  }
  std::size_t max_features = params.max_features;
  if (max_features == 0) {
    max_features = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(x.cols()))));
  }
  max_features = std::clamp<std::size_t>(max_features, 1, std::max<std::size_t>(1, x.cols()));

  DecisionForest forest;
  forest.dimension_ = x.cols();
  forest.class_count_ = class_count;
  forest.seed_ = seed;
  forest.params_ = params;
  forest.trees_.reserve(params.tree_count);
  std::vector<double> columns(x.rows() * x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) columns[c * x.rows() + r] = x(r, c);
  }
  for (std::size_t t = 0; t < params.tree_count; ++t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> sample;
    if (params.bootstrap) {
      sample.resize(base.size());
      for (auto& s : sample) s = base[rng.uniform_index(base.size())];
    } else {
      sample = base;
    }
    TreeBuilder builder(columns, x.rows(), x.cols(), labels, class_count, params, max_features, rng);
    forest.trees_.push_back(builder.build(std::move(sample)));
  }
  return forest;
}

std::vector<double> DecisionForest::predict_proba(std::span<const double> features) const {
  if (features.size() != dimension_) {
    throw ArgumentError("feature dimension mismatch: model expects " + std::to_string(dimension_) +
                        ", got " + std::to_string(features.size()));
  }
  std::vector<double> out(class_count_, 0.0);
  for (const auto& tree : trees_) {
    std::uint32_t i = 0;
    while (tree.nodes[i].feature >= 0) {
      const auto& n = tree.nodes[i];
      i = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    const double* v = tree.values.data() + tree.nodes[i].value;
    for (int c = 0; c < class_count_; ++c) out[c] += v[c];
  }
  if (!trees_.empty()) {
    for (double& p : out) p /= static_cast<double>(trees_.size());
  }
  return out;
}

int DecisionForest::predict(std::span<const double> features) const {
  const auto p = predict_proba(features);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

void DecisionForest::write(std::ostream& out) const {
  out << "forest classes=" << class_count_ << " dimension=" << dimension_ << " trees=" << trees_.size()
      << " seed=" << seed_ << " strategy=" << to_string(params_.strategy)
      << " bootstrap=" << (params_.bootstrap ? 1 : 0) << " max_features=" << params_.max_features
      << " max_depth=" << params_.max_depth << " min_samples_split=" << params_.min_samples_split
      << " min_samples_leaf=" << params_.min_samples_leaf << "\n";
  for (const auto& tree : trees_) {
    out << "tree " << tree.nodes.size() << "\n";
    for (const auto& n : tree.nodes) {
      if (n.feature < 0) {
        out << "L";
        for (int c = 0; c < class_count_; ++c) out << ' ' << text::format_double(tree.values[n.value + c]);
      } else {
        out << "S " << n.feature << ' ' << text::format_double(n.threshold) << ' ' << n.left << ' '
            << n.right;
      }
      out << "\n";
    }
  }
}

namespace {

std::uint64_t header_field(const std::string& line, const std::string& key) {
  const std::string needle = " " + key + "=";
  const auto pos = line.find(needle);
  if (pos == std::string::npos) throw FormatError("forest header lacks " + key);
  try {
    return std::stoull(line.substr(pos + needle.size()));
  } catch (const std::exception&) {
    throw FormatError("bad forest header value for " + key);
  }
}

std::string header_word(const std::string& line, const std::string& key) {
  const std::string needle = " " + key + "=";
  const auto pos = line.find(needle);
  if (pos == std::string::npos) throw FormatError("forest header lacks " + key);
  const auto start = pos + needle.size();
  return line.substr(start, line.find(' ', start) - start);
}

}  // namespace

DecisionForest DecisionForest::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("forest ", 0) != 0) throw FormatError("missing forest header");
  DecisionForest f;
  f.class_count_ = static_cast<int>(header_field(line, "classes"));
  f.dimension_ = header_field(line, "dimension");
  const std::size_t tree_count = header_field(line, "trees");
  f.seed_ = header_field(line, "seed");
  f.params_.tree_count = tree_count;
  f.params_.strategy = parse_split_strategy(header_word(line, "strategy"));
  f.params_.bootstrap = header_field(line, "bootstrap") != 0;
  f.params_.max_features = header_field(line, "max_features");
  f.params_.max_depth = header_field(line, "max_depth");
  f.params_.min_samples_split = header_field(line, "min_samples_split");
  f.params_.min_samples_leaf = header_field(line, "min_samples_leaf");
  if (f.class_count_ < 2) throw FormatError("forest class count must be >= 2");
  for (std::size_t t = 0; t < tree_count; ++t) {
    if (!std::getline(in, line) || line.rfind("tree ", 0) != 0) throw FormatError("missing tree header");
    const std::size_t n = std::stoull(line.substr(5));
    Tree tree;
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw FormatError("truncated tree");
      std::istringstream ls(line);
      std::string kind;
      ls >> kind;
      auto& node = tree.nodes[i];
      if (kind == "L") {
        node.feature = -1;
        node.value = static_cast<std::uint32_t>(tree.values.size());
        for (int c = 0; c < f.class_count_; ++c) {
          std::string tok;
          if (!(ls >> tok)) throw FormatError("truncated leaf");
          tree.values.push_back(text::parse_double(tok));
        }
      } else if (kind == "S") {
        std::string thr;
        ls >> node.feature >> thr >> node.left >> node.right;
        if (!ls) throw FormatError("malformed split node");
        node.threshold = text::parse_double(thr);
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= f.dimension_ || node.left >= n ||
            node.right >= n) {
          throw FormatError("split node out of range");
        }
      } else {
        throw FormatError("unknown tree node kind: " + kind);
      }
    }
    f.trees_.push_back(std::move(tree));
  }
  return f;
}

bool DecisionForest::operator==(const DecisionForest& o) const {
  if (dimension_ != o.dimension_ || class_count_ != o.class_count_ || seed_ != o.seed_ ||
      trees_.size() != o.trees_.size()) {
    return false;
  }
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto& a = trees_[t];
    const auto& b = o.trees_[t];
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      const auto& x = a.nodes[i];
      const auto& y = b.nodes[i];
      if (x.feature != y.feature) return false;
      if (x.feature < 0) {
        // Leaf payloads may sit at different offsets; compare the values.
        if (!std::equal(a.values.begin() + x.value, a.values.begin() + x.value + class_count_,
                        b.values.begin() + y.value)) {
          return false;
        }
      } else if (x.threshold != y.threshold || x.left != y.left || x.right != y.right) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace ppkit
