// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "ppkit/error.hpp"
#include "ppkit/parallel.hpp"
#include "ppkit/random.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

std::string make_node_key(std::string_view doc_id, std::string_view node_id) {
  std::string k(doc_id);
  k += '/';
  k += node_id;
  return k;
}

namespace {

void append_list_text(const ListNode& l, std::string& out) {
  for (const auto& item : l.items) {
    if (!item.text.empty()) {
      if (!out.empty()) out += ' ';
      out += item.text;
    }
    for (const auto& sub : item.lists) append_list_text(sub, out);
  }
}

}  // namespace

std::string element_text(const TextElement& e) {
  std::string out = e.text;
  for (const auto& l : e.lists) append_list_text(l, out);
  return out;
}

Corpus Corpus::from_documents(std::vector<CorpusDocument> docs, const Taxonomy& taxonomy) {
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  Corpus c;
  std::vector<std::string> problems;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].id.empty() || docs[d].id.find('/') != std::string::npos) {
      problems.push_back("invalid document id '" + docs[d].id + "'");
    }
    if (d > 0 && docs[d].id == docs[d - 1].id) problems.push_back("duplicate document id " + docs[d].id);
  }
  if (!problems.empty()) throw FormatError(text::join(problems, "; "));
  c.docs_ = std::move(docs);
  c.doc_nodes_.resize(c.docs_.size());
  for (std::size_t d = 0; d < c.docs_.size(); ++d) {
    auto& cd = c.docs_[d];
    c.doc_index_.emplace(cd.id, d);
    try {
      for_each_text_mut(cd.document, [&](TextElement& e, bool) {
        e.labels = taxonomy.validate_label_set(e.labels);
      });
    } catch (const ArgumentError& e) {
      throw FormatError(cd.id + ": " + e.what());
    }
    for_each_text(cd.document, [&](const TextVisit& v) {
      AnnotatedNode n;
      n.doc_id = cd.id;
      n.node_id = v.element->id;
      n.is_title = v.is_title;
      n.text = element_text(*v.element);
      n.labels = v.element->labels;
      if (v.parent_title) {
        n.parent_title_id = v.parent_title->id;
        n.parent_title_text = element_text(*v.parent_title);
      }
      if (v.preceding_sibling) {
        n.preceding_sibling_id = v.preceding_sibling->id;
        n.preceding_sibling_text = element_text(*v.preceding_sibling);
      }
      const std::size_t idx = c.nodes_.size();
      c.node_index_.emplace(n.key(), idx);
      c.doc_nodes_[d].push_back(idx);
      c.nodes_.push_back(std::move(n));
    });
  }
  return c;
}

std::size_t Corpus::node_index(std::string_view key) const {
  auto it = node_index_.find(std::string(key));
  if (it == node_index_.end()) throw ArgumentError("unknown node key: " + std::string(key));
  return it->second;
}

bool Corpus::contains_node(std::string_view key) const { return node_index_.count(std::string(key)) > 0; }

std::size_t Corpus::document_index(std::string_view doc_id) const {
  auto it = doc_index_.find(std::string(doc_id));
  if (it == doc_index_.end()) throw ArgumentError("unknown document id: " + std::string(doc_id));
  return it->second;
}

CorpusSummary Corpus::summary() const {
  CorpusSummary s;
  s.documents = docs_.size();
  for (const auto& n : nodes_) {
    (n.is_title ? s.titles : s.paragraphs)++;
    if (!n.labels.empty()) ++s.labeled_nodes;
  }
  return s;
}

Corpus load_corpus(const std::filesystem::path& dir, const Taxonomy& taxonomy, std::size_t jobs) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppxml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw FormatError("no documents in " + dir.string());

  std::vector<CorpusDocument> docs(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    const auto& f = files[i];
    try {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw Error("cannot read file");
      std::stringstream ss;
      ss << in.rdbuf();
      docs[i].id = f.stem().string();
      docs[i].document = parse_ppxml(ss.str());
      for_each_text_mut(docs[i].document, [&](TextElement& e, bool) {
        e.labels = taxonomy.validate_label_set(e.labels);
      });
    } catch (const std::exception& e) {
      errors[i] = f.filename().string() + ": " + e.what();
    }
  });
  std::vector<std::string> failed;
  for (auto& e : errors) {
    if (!e.empty()) failed.push_back(std::move(e));
  }
  if (!failed.empty()) throw FormatError(text::join(failed, "\n"));
  return Corpus::from_documents(std::move(docs), taxonomy);
}

std::string to_string(SplitMode m) { return m == SplitMode::kSegment ? "segment" : "document"; }

SplitMode parse_split_mode(std::string_view s) {
  if (s == "segment") return SplitMode::kSegment;
  if (s == "document") return SplitMode::kDocument;
  throw ArgumentError("unknown split mode: " + std::string(s));
}

SplitSpec split_document_level(const Corpus& c, std::size_t n_test, std::uint64_t seed) {
  const std::size_t n = c.documents().size();
  if (n_test == 0 || n_test >= n) {
    throw ArgumentError("n_test must be in [1, " + std::to_string(n == 0 ? 0 : n - 1) + "], got " +
                        std::to_string(n_test));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
  SplitSpec s;
  s.mode = SplitMode::kDocument;
  s.seed = seed;
  for (std::size_t d = 0; d < n; ++d) (is_test[d] ? s.test_ids : s.train_ids).push_back(c.documents()[d].id);
  return s;
}

SplitSpec split_segment_level(const Corpus& c, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ArgumentError("test_fraction must be in (0, 1), got " + text::format_double(test_fraction));
  }
  const std::size_t n = c.nodes().size();
  if (n < 2) throw ArgumentError("segment split needs at least 2 nodes");
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
  SplitSpec s;
  s.mode = SplitMode::kSegment;
  s.seed = seed;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? s.test_ids : s.train_ids).push_back(c.nodes()[i].key());
  return s;
}

ResolvedSplit resolve_split(const Corpus& c, const SplitSpec& s) {
  const std::size_t n = c.nodes().size();
  std::vector<int> side(n, -1);  // 0 train, 1 test
  auto mark = [&](std::size_t node, int v) {
    if (side[node] != -1 && side[node] != v) {
      throw ArgumentError("node " + c.nodes()[node].key() + " is on both sides of the split");
    }
    side[node] = v;
  };
  auto mark_ids = [&](const std::vector<std::string>& ids, int v) {
    for (const auto& id : ids) {
      if (s.mode == SplitMode::kDocument) {
        for (std::size_t i : c.document_nodes(c.document_index(id))) mark(i, v);
      } else {
        mark(c.node_index(id), v);
      }
    }
  };
  mark_ids(s.train_ids, 0);
  mark_ids(s.test_ids, 1);
  ResolvedSplit r;
  for (std::size_t i = 0; i < n; ++i) {
    if (side[i] == 0) r.train.push_back(i);
    if (side[i] == 1) r.test.push_back(i);
  }
  return r;
}

std::string serialize_split(const SplitSpec& s) {
  std::string out = "#mode=" + to_string(s.mode) + "\n#seed=" + std::to_string(s.seed) + "\n";
  for (const auto& id : s.train_ids) out += "train\t" + id + "\n";
  for (const auto& id : s.test_ids) out += "test\t" + id + "\n";
  return out;
}

SplitSpec parse_split(std::string_view content) {
  SplitSpec s;
  bool have_mode = false;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.rfind("#mode=", 0) == 0) {
      s.mode = parse_split_mode(line.substr(6));
      have_mode = true;
    } else if (line.rfind("#seed=", 0) == 0) {
      try {
        s.seed = std::stoull(std::string(line.substr(6)));
      } catch (const std::exception&) {
        throw FormatError("split file line " + std::to_string(line_no) + ": bad seed");
      }
    } else if (line[0] == '#') {
      continue;
    } else {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) throw FormatError("split file line " + std::to_string(line_no) + ": missing tab");
      const auto side = line.substr(0, tab);
      std::string id(line.substr(tab + 1));
      if (id.empty()) throw FormatError("split file line " + std::to_string(line_no) + ": empty id");
      if (side == "train") s.train_ids.push_back(std::move(id));
      else if (side == "test") s.test_ids.push_back(std::move(id));
      else throw FormatError("split file line " + std::to_string(line_no) + ": unknown side " + std::string(side));
    }
  }
  if (!have_mode) throw FormatError("split file lacks #mode header");
  return s;
}

double cohens_kappa(std::span<const bool> a, std::span<const bool> b) {
  if (a.size() != b.size()) throw ArgumentError("kappa inputs differ in length");
  if (a.empty()) throw ArgumentError("kappa needs at least one judgment");
  double both = 0, only_a = 0, only_b = 0, none = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++both;
    else if (a[i]) ++only_a;
    else if (b[i]) ++only_b;
    else ++none;
  }
  const double n = static_cast<double>(a.size());
  const double po = (both + none) / n;
  const double pa = (both + only_a) / n, pb = (both + only_b) / n;
  const double pe = pa * pb + (1 - pa) * (1 - pb);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

AgreementReport annotation_agreement(const Corpus& a, const Corpus& b) {
  AgreementReport r;
  std::vector<double> doc_means;
  for (std::size_t d = 0; d < a.documents().size(); ++d) {
    const std::string& id = a.documents()[d].id;
    const std::size_t db = b.document_index(id);
    const auto na = a.document_nodes(d);
    const auto nb = b.document_nodes(db);
    if (na.size() != nb.size()) {
      throw ArgumentError("document " + id + " has different node counts in the two annotations");
    }
    std::set<std::string> used;
    for (std::size_t i : na) used.insert(a.nodes()[i].labels.begin(), a.nodes()[i].labels.end());
    for (std::size_t i : nb) used.insert(b.nodes()[i].labels.begin(), b.nodes()[i].labels.end());
    if (used.empty() || na.empty()) continue;
    std::vector<double> kappas;
    for (const auto& concept_id : used) {
      auto ja = std::make_unique<bool[]>(na.size());
      auto jb = std::make_unique<bool[]>(na.size());
      for (std::size_t k = 0; k < na.size(); ++k) {
        const auto& la = a.nodes()[na[k]].labels;
        const auto& lb = b.nodes()[nb[k]].labels;
        ja[k] = std::find(la.begin(), la.end(), concept_id) != la.end();
        jb[k] = std::find(lb.begin(), lb.end(), concept_id) != lb.end();
      }
      kappas.push_back(cohens_kappa({ja.get(), na.size()}, {jb.get(), na.size()}));
    }
    const double m = std::accumulate(kappas.begin(), kappas.end(), 0.0) / static_cast<double>(kappas.size());
    r.per_document.emplace_back(id, m);
    doc_means.push_back(m);
  }
  if (!doc_means.empty()) {
    r.mean = std::accumulate(doc_means.begin(), doc_means.end(), 0.0) / static_cast<double>(doc_means.size());
  }
  return r;
}

std::vector<CoverageRow> corpus_statistics(const Corpus& c, const Taxonomy& t, bool include_descendants) {
  std::vector<CoverageRow> rows(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rows[i].concept_id = t.node_at(i).id;
  for (std::size_t d = 0; d < c.documents().size(); ++d) {
    std::vector<bool> covered(t.size(), false);
    for (std::size_t ni : c.document_nodes(d)) {
      for (const auto& label : c.nodes()[ni].labels) {
        std::size_t idx = t.index_of(label);
        covered[idx] = true;
        if (!include_descendants) continue;
        for (std::size_t p = t.parent_index(idx); p != Taxonomy::npos; p = t.parent_index(p)) covered[p] = true;
      }
    }
    for (std::size_t i = 0; i < t.size(); ++i) rows[i].docs_covered += covered[i] ? 1 : 0;
  }
  const double n = static_cast<double>(c.documents().size());
  for (auto& r : rows) r.coverage_fraction = n > 0 ? static_cast<double>(r.docs_covered) / n : 0.0;
  return rows;
}

std::string coverage_csv(std::span<const CoverageRow> rows) {
  std::string out = "concept_id,docs_covered,coverage_fraction\n";
  for (const auto& r : rows) {
    out += r.concept_id + "," + std::to_string(r.docs_covered) + "," + text::format_fixed(r.coverage_fraction, 6) + "\n";
  }
  return out;
}

}  // namespace ppkit
