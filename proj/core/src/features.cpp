// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ppkit/text.hpp"

namespace ppkit {

// ---------------------------------------------------------------- Vocabulary

Vocabulary Vocabulary::fit(std::span<const std::string> texts, std::size_t dim, Diagnostics* diag) {
  if (dim == 0) throw ArgumentError("vocabulary dimension must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& t : texts) {
    auto toks = text::tfidf_tokens(t);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& tok : toks) ++df[std::move(tok)];
  }
  if (df.empty()) throw ArgumentError("empty corpus vocabulary");
  std::vector<Term> all;
  all.reserve(df.size());
  for (auto& [term, count] : df) all.push_back({term, count});
  std::sort(all.begin(), all.end(), [](const Term& a, const Term& b) {
    return a.df != b.df ? a.df > b.df : a.term < b.term;
  });
  if (all.size() < dim) {
    if (diag) {
      diag->warn("vocabulary shrunk from " + std::to_string(dim) + " to " + std::to_string(all.size()) +
                 " terms");
    }
  } else {
    all.resize(dim);
  }
  Vocabulary v;
  v.terms_ = std::move(all);
  v.doc_count_ = texts.size();
  for (std::size_t i = 0; i < v.terms_.size(); ++i) v.index_.emplace(v.terms_[i].term, i);
  return v;
}

std::size_t Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? npos : it->second;
}

std::vector<double> Vocabulary::transform(std::string_view text) const {
  std::vector<double> out(terms_.size(), 0.0);
  transform_into(text, out);
  return out;
}

void Vocabulary::transform_into(std::string_view text, std::span<double> out) const {
  if (out.size() != terms_.size()) throw ArgumentError("tf-idf output span has the wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& tok : text::tfidf_tokens(text)) {
    auto it = index_.find(tok);
    if (it != index_.end()) out[it->second] += 1.0;
  }
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == 0.0) continue;
    out[i] *= std::log(static_cast<double>(doc_count_) / static_cast<double>(terms_[i].df));
    norm_sq += out[i] * out[i];
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : out) x *= inv;
  }
}

void Vocabulary::write(std::ostream& out) const {
  out << "#vocabulary documents=" << doc_count_ << " terms=" << terms_.size() << "\n";
  for (const auto& t : terms_) out << t.term << '\t' << t.df << "\n";
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#vocabulary ", 0) != 0) throw FormatError("missing vocabulary header");
  Vocabulary v;
  std::size_t n = 0;
  if (std::sscanf(line.c_str(), "#vocabulary documents=%zu terms=%zu", &v.doc_count_, &n) != 2) {
    throw FormatError("malformed vocabulary header");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated vocabulary");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("malformed vocabulary line");
    Term t{line.substr(0, tab), std::stoull(line.substr(tab + 1))};
    if (t.df == 0 || t.df > v.doc_count_) throw FormatError("vocabulary df out of range for " + t.term);
    v.index_.emplace(t.term, v.terms_.size());
    v.terms_.push_back(std::move(t));
  }
  return v;
}

// -------------------------------------------------------------- KeywordTable


KeywordTable KeywordTable::parse(std::string_view csv, const Taxonomy& t) {
  KeywordTable kt;
  kt.keywords_.resize(t.size());
  kt.raw_.resize(t.size());
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto& raw : text::split(csv, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    auto fields = text::csv_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 2 && fields[0] == "concept_id" && fields[1] == "keyword") continue;
    }
    const std::string where = "keyword table line " + std::to_string(line_no);
    if (fields.size() != 2) throw FormatError(where + ": expected 2 fields");
    const std::string id(text::trim(fields[0]));
    if (!t.contains(id)) throw FormatError(where + ": unknown concept " + id);
    const std::string kw = text::to_lower(text::trim(fields[1]));
    auto toks = text::word_tokens(kw);
    if (toks.empty()) throw FormatError(where + ": empty keyword");
    const std::size_t idx = t.index_of(id);
    if (std::find(kt.raw_[idx].begin(), kt.raw_[idx].end(), kw) != kt.raw_[idx].end()) continue;
    kt.raw_[idx].push_back(kw);
    kt.keywords_[idx].push_back(std::move(toks));
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (kt.raw_[i].empty()) missing.push_back(t.node_at(i).id);
  }
  if (!missing.empty()) throw FormatError("keyword table has no keywords for: " + text::join(missing, ", "));
  return kt;
}

KeywordTable KeywordTable::load(const std::filesystem::path& path, const Taxonomy& t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read keyword table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), t);
}

std::vector<double> KeywordTable::vector_for(std::string_view text) const {
  std::vector<double> out(keywords_.size(), 0.0);
  vector_into(text, out);
  return out;
}

void KeywordTable::vector_into(std::string_view text, std::span<double> out) const {
  if (out.size() != keywords_.size()) throw ArgumentError("keyword output span has the wrong size");
  const auto toks = text::word_tokens(text);
  const std::unordered_set<std::string> single(toks.begin(), toks.end());
  for (std::size_t c = 0; c < keywords_.size(); ++c) {
    double hit = 0.0;
    for (const auto& kw : keywords_[c]) {
      if (kw.size() == 1) {
        if (single.count(kw[0])) hit = 1.0;
      } else if (single.count(kw[0])) {
        auto it = std::search(toks.begin(), toks.end(), kw.begin(), kw.end());
        if (it != toks.end()) hit = 1.0;
      }
      if (hit != 0.0) break;
    }
    out[c] = hit;
  }
}

std::string KeywordTable::to_csv(const Taxonomy& t) const {
  std::string out = "concept_id,keyword\n";
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    for (const auto& kw : raw_[i]) out += text::csv_escape(t.node_at(i).id) + "," + text::csv_escape(kw) + "\n";
  }
  return out;
}

// ------------------------------------------------------------ EmbeddingStore

EmbeddingStore EmbeddingStore::parse(std::string_view content) {
  EmbeddingStore s;
  const auto lines = text::split(content, '\n');
  std::size_t line_no = 0;
  bool have_dim = false;
  for (const auto& raw : lines) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!have_dim) {
      if (line.rfind("#dim=", 0) != 0) throw FormatError("embedding store must start with #dim=<D>");
      const auto v = line.substr(5);
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s.dim_);
      if (ec != std::errc() || p != v.data() + v.size() || s.dim_ == 0) {
        throw FormatError("bad embedding dimension header: " + std::string(line));
      }
      have_dim = true;
      continue;
    }
    if (line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("embedding record on line " + std::to_string(line_no) + " lacks a tab");
    }
    std::string key(line.substr(0, tab));
    if (key.find('/') == std::string::npos) {
      throw FormatError("embedding key must be <doc-id>/<node-id>: " + key);
    }
    std::vector<double> values;
    values.reserve(s.dim_);
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double x = 0;
      auto [q, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) {
        throw FormatError("embedding record " + key + " has a malformed value on line " + std::to_string(line_no));
      }
      values.push_back(x);
      p = q;
    }
    if (values.size() != s.dim_) {
      throw FormatError("embedding record " + key + " has " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(s.dim_));
    }
    if (!s.vectors_.emplace(key, std::move(values)).second) {
      throw FormatError("duplicate embedding key " + key);
    }
  }
  if (!have_dim) throw FormatError("embedding store must start with #dim=<D>");
  return s;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read embedding store " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void EmbeddingStore::lookup_into(std::string_view key, std::span<double> out) const {
  if (out.size() != dim_) throw ArgumentError("embedding output span has the wrong size");
  auto it = vectors_.find(std::string(key));
  if (it == vectors_.end()) {
    std::fill(out.begin(), out.end(), 0.0);
    ++missing_;
    return;
  }
  std::copy(it->second.begin(), it->second.end(), out.begin());
}

std::vector<double> EmbeddingStore::lookup(std::string_view key) const {
  std::vector<double> out(dim_, 0.0);
  lookup_into(key, out);
  return out;
}

void EmbeddingStore::insert(std::string key, std::vector<double> v) {
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) throw ArgumentError("embedding dimension mismatch for " + key);
  if (!vectors_.emplace(key, std::move(v)).second) throw ArgumentError("duplicate embedding key " + key);
}

std::string EmbeddingStore::serialize() const {
  std::map<std::string, const std::vector<double>*> sorted;
  for (const auto& [k, v] : vectors_) sorted.emplace(k, &v);
  std::string out = "#dim=" + std::to_string(dim_) + "\n";
  for (const auto& [k, v] : sorted) {
    out += k;
    out += '\t';
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (i) out += ' ';
      out += text::format_double((*v)[i]);
    }
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------- FeatureConfig

std::string to_string(Architecture a) { return a == Architecture::kLcn ? "lcn" : "lcpn"; }

Architecture parse_architecture(std::string_view s) {
  if (s == "lcn") return Architecture::kLcn;
  if (s == "lcpn") return Architecture::kLcpn;
  throw ArgumentError("unknown architecture: " + std::string(s));
}

bool FeatureConfig::needs_embeddings(int type_id) {
  return type_id == 5 || type_id == 6 || type_id == 11 || type_id == 12;
}

FeatureConfig FeatureConfig::for_type(int type_id, std::size_t embedding_dim) {
  if (type_id < 1 || type_id > 12) throw ArgumentError("type id must be in 1..12, got " + std::to_string(type_id));
  FeatureConfig c;
  c.type_id = type_id;
  c.architecture = type_id <= 6 ? Architecture::kLcn : Architecture::kLcpn;
  const int row = type_id <= 6 ? type_id : type_id - 6;  // 1..6 pattern repeats
  if (row >= 5) {
    if (embedding_dim == 0) throw ArgumentError("embedding store required for type " + std::to_string(type_id));
    c.source = FeatureSource::kEmbedding;
    c.use_context = row == 6;
    c.current_dim = embedding_dim;
    c.parent_dim = c.use_context ? embedding_dim : 0;
    c.sibling_dim = c.use_context ? embedding_dim : 0;
    return c;
  }
  c.source = FeatureSource::kTfidf;
  c.use_context = row == 2 || row == 4;
  c.use_keywords = row == 3 || row == 4;
  c.current_dim = kCurrentTfidfDim;
  c.parent_dim = c.use_context ? kParentTfidfDim : 0;
  c.sibling_dim = c.use_context ? kCurrentTfidfDim : 0;
  c.keyword_dim = c.use_keywords ? kKeywordDim : 0;
  return c;
}

std::string FeatureConfig::describe() const {
  std::string s = source == FeatureSource::kTfidf ? "tfidf" : "embedding";
  s += " current=" + std::to_string(current_dim);
  if (use_context) s += " parent=" + std::to_string(parent_dim) + " sibling=" + std::to_string(sibling_dim);
  if (use_keywords) s += " keywords=" + std::to_string(keyword_dim);
  s += " model=" + to_string(architecture);
  return s;
}

// ----------------------------------------------------------------- assembly

FeatureResources fit_feature_resources(const FeatureConfig& cfg, const Corpus& corpus,
                                       std::span<const std::size_t> train_nodes,
                                       std::shared_ptr<const KeywordTable> keywords,
                                       std::shared_ptr<const EmbeddingStore> embeddings, Diagnostics* diag) {
  if (train_nodes.empty()) throw ArgumentError("empty training set");
  FeatureResources r;
  r.keywords = cfg.use_keywords ? std::move(keywords) : nullptr;
  r.embeddings = cfg.source == FeatureSource::kEmbedding ? std::move(embeddings) : nullptr;
  if (cfg.source != FeatureSource::kTfidf) return r;
  std::vector<std::string> texts, titles;
  for (std::size_t i : train_nodes) {
    const auto& n = corpus.nodes()[i];
    texts.push_back(n.text);
    if (n.is_title) titles.push_back(n.text);
  }
  r.current = std::make_shared<Vocabulary>(Vocabulary::fit(texts, FeatureConfig::kCurrentTfidfDim, diag));
  if (cfg.use_context) {
    if (titles.empty()) {
      if (diag) diag->warn("no training titles; parent vocabulary fitted on all training texts");
      titles = texts;
    }
    r.parent = std::make_shared<Vocabulary>(Vocabulary::fit(titles, FeatureConfig::kParentTfidfDim, diag));
  }
  return r;
}

void check_resources(const FeatureConfig& cfg, const FeatureResources& r) {
  if (cfg.source == FeatureSource::kEmbedding) {
    if (!r.embeddings) throw ArgumentError("embedding store required for type " + std::to_string(cfg.type_id));
    if (r.embeddings->dimension() != cfg.current_dim) {
      throw ArgumentError("embedding store dimension " + std::to_string(r.embeddings->dimension()) +
                          " does not match the model's " + std::to_string(cfg.current_dim));
    }
  } else {
    if (!r.current) throw ArgumentError("tf-idf vocabulary required for type " + std::to_string(cfg.type_id));
    if (cfg.use_context && !r.parent) {
      throw ArgumentError("parent vocabulary required for type " + std::to_string(cfg.type_id));
    }
  }
  if (cfg.use_keywords) {
    if (!r.keywords) throw ArgumentError("keyword table required for type " + std::to_string(cfg.type_id));
    if (r.keywords->size() != cfg.keyword_dim) {
      throw ArgumentError("keyword table covers " + std::to_string(r.keywords->size()) + " concepts, expected " +
                          std::to_string(cfg.keyword_dim));
    }
  }
}

namespace {

// The TF-IDF vocabularies may be smaller than the nominal dimension on tiny
// corpora; blocks are zero-padded so the layout stays fixed.
void assemble_into(const FeatureConfig& cfg, const AnnotatedNode& node, const FeatureResources& r,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::size_t off = 0;
  auto tfidf_block = [&](const Vocabulary& v, std::string_view text, std::size_t width) {
    v.transform_into(text, out.subspan(off, v.dimension()));
    off += width;
  };
  auto embedding_block = [&](const std::optional<std::string>& node_id, std::size_t width) {
    if (node_id) r.embeddings->lookup_into(make_node_key(node.doc_id, *node_id), out.subspan(off, width));
    off += width;
  };
  if (cfg.source == FeatureSource::kTfidf) {
    tfidf_block(*r.current, node.text, cfg.current_dim);
    if (cfg.use_context) {
      if (node.parent_title_id) tfidf_block(*r.parent, node.parent_title_text, cfg.parent_dim);
      else off += cfg.parent_dim;
      if (node.preceding_sibling_id) tfidf_block(*r.current, node.preceding_sibling_text, cfg.sibling_dim);
      else off += cfg.sibling_dim;
    }
  } else {
    embedding_block(node.node_id, cfg.current_dim);
    if (cfg.use_context) {
      embedding_block(node.parent_title_id, cfg.parent_dim);
      embedding_block(node.preceding_sibling_id, cfg.sibling_dim);
    }
  }
  if (cfg.use_keywords) {
    r.keywords->vector_into(node.text, out.subspan(off, cfg.keyword_dim));
    off += cfg.keyword_dim;
  }
}

}  // namespace

std::vector<double> assemble_features(const FeatureConfig& cfg, const AnnotatedNode& node,
                                      const FeatureResources& r) {
  check_resources(cfg, r);
  std::vector<double> out(cfg.dimension(), 0.0);
  assemble_into(cfg, node, r, out);
  return out;
}

Matrix assemble_matrix(const FeatureConfig& cfg, const Corpus& corpus, std::span<const std::size_t> nodes,
                       const FeatureResources& r) {
  check_resources(cfg, r);
  Matrix m(nodes.size(), cfg.dimension());
  for (std::size_t i = 0; i < nodes.size(); ++i) assemble_into(cfg, corpus.nodes()[nodes[i]], r, m.row(i));
  return m;
}

}  // namespace ppkit
