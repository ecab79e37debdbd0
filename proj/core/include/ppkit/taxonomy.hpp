// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ppkit {

/// One concept of the GDPR taxonomy. `id` is the canonical uppercase
/// dot-path, e.g. "DATA SUBJECT RIGHT.INFORMATION.POLICY CHANGE".
struct ConceptNode {
  std::string id;
  std::string name;
  int level = 1;
  std::optional<std::string> parent;

  bool operator==(const ConceptNode&) const = default;
};

/// Expected shape of a taxonomy file; the shipped file is 96 nodes, 19 roots.
struct TaxonomyShape {
  std::size_t node_count = 96;
  std::size_t root_count = 19;
  int max_depth = 3;
};

/// Immutable concept tree. Node order is file order; sibling order follows it.
class Taxonomy {
 public:
  /// Parses the tab-separated taxonomy format. Throws FormatError.
  static Taxonomy parse(std::string_view content, const TaxonomyShape& shape = {});

  std::size_t size() const { return nodes_.size(); }
  const std::vector<ConceptNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& roots() const { return roots_; }

  bool contains(std::string_view id) const;
  /// Position of `id` in file order. Throws ArgumentError for unknown ids.
  std::size_t index_of(std::string_view id) const;
  const ConceptNode& node(std::string_view id) const;
  const ConceptNode& node_at(std::size_t index) const { return nodes_[index]; }

  /// Direct children in file order.
  std::vector<std::string> children_of(std::string_view id) const;
  std::span<const std::size_t> child_indices(std::size_t index) const;
  /// Strict ancestors, nearest first.
  std::vector<std::string> ancestors_of(std::string_view id) const;
  /// Parent index, or npos for level-1 concepts.
  std::size_t parent_index(std::size_t index) const { return parent_[index]; }
  std::span<const std::size_t> root_indices() const { return root_indices_; }

  /// Deduplicates and sorts labels into file order. Throws ArgumentError
  /// naming every unknown label.
  std::vector<std::string> validate_label_set(std::span<const std::string> labels) const;

  /// Serializes back into the file format (header included).
  std::string serialize() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<ConceptNode> nodes_;
  std::vector<std::string> roots_;
  std::vector<std::size_t> root_indices_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads and validates a taxonomy file.
Taxonomy load_taxonomy(const std::filesystem::path& path, const TaxonomyShape& shape = {});

/// Path of the taxonomy file shipped with the library.
std::filesystem::path default_taxonomy_path();
std::filesystem::path default_keyword_path();

}  // namespace ppkit
