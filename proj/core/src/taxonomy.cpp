// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open taxonomy file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line_ref(std::size_t line_no) {
  return "line " + std::to_string(line_no);
}

}  // namespace

Taxonomy Taxonomy::parse(std::string_view content, const TaxonomyShape& shape) {
  Taxonomy t;
  std::optional<std::size_t> declared;
  std::size_t line_no = 0;

  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kCount = "#count=";
      if (line.starts_with(kCount)) {
        std::size_t n = 0;
        auto digits = line.substr(kCount.size());
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
          throw FormatError("malformed count header at " + line_ref(line_no));
        }
        declared = n;
      }
      continue;
    }

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("malformed line at " + line_ref(line_no) + ": expected LEVEL<TAB>ID");
    }
    int level = 0;
    auto level_text = line.substr(0, tab);
    auto [ptr, ec] = std::from_chars(level_text.data(), level_text.data() + level_text.size(), level);
    if (ec != std::errc{} || ptr != level_text.data() + level_text.size()) {
      throw FormatError("malformed level at " + line_ref(line_no));
    }
    std::string id(text::trim(line.substr(tab + 1)));
    if (id.empty()) throw FormatError("empty concept id at " + line_ref(line_no));
    if (id != text::to_upper(id)) {
      throw FormatError("concept id must be uppercase at " + line_ref(line_no) + ": " + id);
    }
    const auto segments = text::split(id, '.');
    if (std::any_of(segments.begin(), segments.end(),
                    [](const std::string& s) { return s.empty(); })) {
      throw FormatError("malformed concept id at " + line_ref(line_no) + ": " + id);
    }
    if (static_cast<int>(segments.size()) != level) {
      throw FormatError("level " + std::to_string(level) + " does not match id depth at " +
                        line_ref(line_no) + ": " + id);
    }
    if (level < 1 || level > shape.max_depth) {
      throw FormatError("level out of range at " + line_ref(line_no) + ": " + id);
    }
    if (t.index_.contains(id)) throw FormatError("duplicate id: " + id);

    ConceptNode node;
    node.id = id;
    node.name = segments.back();
    node.level = level;
    if (level > 1) node.parent = id.substr(0, id.rfind('.'));
    t.index_.emplace(id, t.nodes_.size());
    t.nodes_.push_back(std::move(node));
  }

  t.parent_.assign(t.nodes_.size(), npos);
  t.children_.assign(t.nodes_.size(), {});
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const auto& n = t.nodes_[i];
    if (!n.parent) {
      t.roots_.push_back(n.id);
      t.root_indices_.push_back(i);
      continue;
    }
    auto it = t.index_.find(*n.parent);
    if (it == t.index_.end()) {
      throw FormatError("orphan parent: " + n.id + " has no parent " + *n.parent);
    }
    t.parent_[i] = it->second;
    t.children_[it->second].push_back(i);
  }
  if (declared && *declared != t.nodes_.size()) {
    throw FormatError("node-count mismatch: header declares " + std::to_string(*declared) +
                      ", file has " + std::to_string(t.nodes_.size()));
  }
  if (t.nodes_.size() != shape.node_count) {
    throw FormatError("node-count mismatch (expected " + std::to_string(shape.node_count) +
                      ", found " + std::to_string(t.nodes_.size()) + ")");
  }

  if (t.roots_.size() != shape.root_count) {
    throw FormatError("root-count mismatch (expected " + std::to_string(shape.root_count) +
                      ", found " + std::to_string(t.roots_.size()) + ")");
  }
  return t;
}

bool Taxonomy::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::size_t Taxonomy::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw ArgumentError("unknown concept id: " + std::string(id));
  return it->second;
}

const ConceptNode& Taxonomy::node(std::string_view id) const {
  return nodes_[index_of(id)];
}

std::vector<std::string> Taxonomy::children_of(std::string_view id) const {
  std::vector<std::string> out;
  for (auto c : children_[index_of(id)]) out.push_back(nodes_[c].id);
  return out;
}

std::span<const std::size_t> Taxonomy::child_indices(std::size_t index) const {
  return children_.at(index);
}

std::vector<std::string> Taxonomy::ancestors_of(std::string_view id) const {
  std::vector<std::string> out;
  for (auto p = parent_[index_of(id)]; p != npos; p = parent_[p]) out.push_back(nodes_[p].id);
  return out;
}

std::vector<std::string> Taxonomy::validate_label_set(std::span<const std::string> labels) const {
  std::vector<std::size_t> indices;
  std::vector<std::string> unknown;
  for (const auto& l : labels) {
    auto it = index_.find(l);
    if (it == index_.end()) {
      if (std::find(unknown.begin(), unknown.end(), l) == unknown.end()) unknown.push_back(l);
    } else {
      indices.push_back(it->second);
    }
  }
  if (!unknown.empty()) {
    throw ArgumentError("unknown concept label(s): " + text::join(unknown, ", "));
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(nodes_[i].id);
  return out;
}

std::string Taxonomy::serialize() const {
  std::string out = "#count=" + std::to_string(nodes_.size()) + "\n";
  for (const auto& n : nodes_) {
    out += std::to_string(n.level);
    out += '\t';
    out += n.id;
    out += '\n';
  }
  return out;
}

Taxonomy load_taxonomy(const std::filesystem::path& path, const TaxonomyShape& shape) {
  return Taxonomy::parse(read_file(path), shape);
}

std::filesystem::path default_taxonomy_path() {
  return std::filesystem::path(PPKIT_DATA_DIR) / "taxonomy.tsv";
}

std::filesystem::path default_keyword_path() {
  return std::filesystem::path(PPKIT_DATA_DIR) / "keywords.csv";
}

}  // namespace ppkit
