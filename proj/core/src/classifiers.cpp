// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ppkit/error.hpp"
#include "ppkit/parallel.hpp"
#include "ppkit/random.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

std::vector<std::size_t> upsample_positives(std::span<const std::size_t> rows, std::span<const int> labels,
                                            double ratio_target, std::uint64_t seed) {
  if (!(ratio_target > 0.0)) throw ArgumentError("ratio_target must be > 0");
  std::vector<std::size_t> pos;
  std::size_t neg = 0;
  for (std::size_t r : rows) {
    if (r >= labels.size()) throw ArgumentError("row index out of range");
    if (labels[r] != 0) pos.push_back(r);
    else ++neg;
  }
  if (pos.empty()) throw ArgumentError("cannot upsample empty class");
  std::vector<std::size_t> out(rows.begin(), rows.end());
  // Tolerance keeps e.g. (1/3) * 90 from rounding up to 31.
  const double wanted = std::ceil(ratio_target * static_cast<double>(neg) - 1e-9);
  if (wanted <= static_cast<double>(pos.size())) return out;
  const auto extra = static_cast<std::size_t>(wanted) - pos.size();
  Rng rng(seed);
  for (std::size_t i = 0; i < extra; ++i) out.push_back(pos[rng.uniform_index(pos.size())]);
  return out;
}

bool node_has_concept(const AnnotatedNode& n, std::size_t concept_index, const Taxonomy& t) {
  for (const auto& label : n.labels) {
    for (std::size_t i = t.index_of(label); i != Taxonomy::npos; i = t.parent_index(i)) {
      if (i == concept_index) return true;
    }
  }
  return false;
}

std::vector<std::size_t> label_closure(std::span<const std::string> labels, const Taxonomy& t) {
  std::vector<bool> on(t.size(), false);
  for (const auto& label : labels) {
    for (std::size_t i = t.index_of(label); i != Taxonomy::npos; i = t.parent_index(i)) on[i] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (on[i]) out.push_back(i);
  }
  return out;
}

namespace {

// Per-node membership matrix: closure[n][c] for the listed nodes.
std::vector<std::vector<char>> closure_table(const Corpus& corpus, std::span<const std::size_t> nodes,
                                             const Taxonomy& t) {
  std::vector<std::vector<char>> out(nodes.size(), std::vector<char>(t.size(), 0));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t c : label_closure(corpus.nodes()[nodes[i]].labels, t)) out[i][c] = 1;
  }
  return out;
}

using ScoreFn = std::function<const std::vector<double>&(std::size_t model_index)>;

std::vector<std::size_t> cascade(const HierarchyClassifier& h, const Taxonomy& t, const ScoreFn& scores) {
  std::vector<std::size_t> model_of(t.size(), Taxonomy::npos);
  for (std::size_t m = 1; m < h.parent_models.size(); ++m) model_of[h.parent_models[m].parent] = m;
  std::vector<std::size_t> out;
  std::function<void(std::size_t)> expand = [&](std::size_t m) {
    if (m == Taxonomy::npos || m >= h.parent_models.size()) return;
    const auto& pm = h.parent_models[m];
    auto emit = [&](std::size_t child) {
      out.push_back(child);
      expand(model_of[child]);
    };
    if (pm.network) {
      const auto& s = scores(m);
      for (std::size_t k = 0; k < pm.outputs.size(); ++k) {
        if (s[k] >= h.lcpn.threshold) emit(pm.outputs[k]);
      }
    } else if (pm.inherited_child) {
      emit(*pm.inherited_child);
    }
  };
  if (!h.parent_models.empty()) expand(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::size_t> lcpn_cascade(const HierarchyClassifier& h, const std::vector<std::vector<double>>& scores,
                                      const Taxonomy& t) {
  return cascade(h, t, [&](std::size_t m) -> const std::vector<double>& { return scores.at(m); });
}

std::vector<std::size_t> HierarchyClassifier::predict_row(std::span<const double> features, const Taxonomy& t) const {
  if (architecture == Architecture::kLcn) {
    std::vector<std::string> hits;
    for (std::size_t c = 0; c < concept_models.size(); ++c) {
      if (!concept_models[c]) continue;
      if (concept_models[c]->predict_proba(features)[1] >= lcn.threshold) hits.push_back(t.node_at(c).id);
    }
    return label_closure(hits, t);
  }
  std::map<std::size_t, std::vector<double>> cache;
  return cascade(*this, t, [&](std::size_t m) -> const std::vector<double>& {
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, parent_models[m].network->predict(features)).first;
    return it->second;
  });
}

std::size_t HierarchyClassifier::trained_model_count() const {
  std::size_t n = 0;
  for (const auto& m : concept_models) n += m ? 1 : 0;
  for (const auto& p : parent_models) n += p.network ? 1 : 0;
  return n;
}

HierarchyClassifier train_lcn(const Corpus& corpus, std::span<const std::size_t> train_nodes,
                              const FeatureConfig& cfg, const FeatureResources& resources, const Taxonomy& t,
                              const LcnParams& params, std::uint64_t seed, std::size_t jobs) {
  if (train_nodes.empty()) throw ArgumentError("empty training set");
  if (cfg.architecture != Architecture::kLcn) throw ArgumentError("type " + std::to_string(cfg.type_id) + " is not an LCN type");
  HierarchyClassifier h;
  h.architecture = Architecture::kLcn;
  h.config = cfg;
  h.resources = resources;
  h.seed = seed;
  h.lcn = params;
  h.concept_models.resize(t.size());
  const Matrix x = assemble_matrix(cfg, corpus, train_nodes, resources);
  const auto closure = closure_table(corpus, train_nodes, t);

  std::vector<std::string> skip_reason(t.size());
  parallel_for(t.size(), jobs, [&](std::size_t c) {
    std::vector<int> y(train_nodes.size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = closure[i][c];
      pos += static_cast<std::size_t>(y[i]);
    }
    if (pos < params.min_pos) {
      skip_reason[c] = std::to_string(pos) + " positive training nodes < min_pos " + std::to_string(params.min_pos);
      return;
    }
    if (pos == y.size()) {
      skip_reason[c] = "no negative training nodes";
      return;
    }
    const std::uint64_t concept_seed = derive_seed(seed, c);
    std::vector<std::size_t> rows(y.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    if (params.upsample_ratio > 0.0) rows = upsample_positives(rows, y, params.upsample_ratio, derive_seed(concept_seed, 1));
    h.concept_models[c] = DecisionForest::train(x, y, 2, params.forest, derive_seed(concept_seed, 2), rows);
  });
  for (std::size_t c = 0; c < t.size(); ++c) {
    if (!skip_reason[c].empty()) h.skipped.push_back({t.node_at(c).id, skip_reason[c]});
  }
  return h;
}

HierarchyClassifier train_lcpn(const Corpus& corpus, std::span<const std::size_t> train_nodes,
                               const FeatureConfig& cfg, const FeatureResources& resources, const Taxonomy& t,
                               const LcpnParams& params, std::uint64_t seed, std::size_t jobs) {
  if (train_nodes.empty()) throw ArgumentError("empty training set");
  if (cfg.architecture != Architecture::kLcpn) throw ArgumentError("type " + std::to_string(cfg.type_id) + " is not an LCPN type");
  HierarchyClassifier h;
  h.architecture = Architecture::kLcpn;
  h.config = cfg;
  h.resources = resources;
  h.seed = seed;
  h.lcpn = params;

  ParentModel root;
  root.parent = Taxonomy::npos;
  root.outputs.assign(t.root_indices().begin(), t.root_indices().end());
  h.parent_models.push_back(std::move(root));
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (t.child_indices(p).empty()) continue;
    ParentModel pm;
    pm.parent = p;
    pm.outputs.assign(t.child_indices(p).begin(), t.child_indices(p).end());
    h.parent_models.push_back(std::move(pm));
  }

  const Matrix x = assemble_matrix(cfg, corpus, train_nodes, resources);
  const auto closure = closure_table(corpus, train_nodes, t);
  std::vector<std::string> notes(h.parent_models.size());
  parallel_for(h.parent_models.size(), jobs, [&](std::size_t m) {
    auto& pm = h.parent_models[m];
    std::vector<std::size_t> population;
    for (std::size_t i = 0; i < train_nodes.size(); ++i) {
      if (pm.parent == Taxonomy::npos || closure[i][pm.parent]) population.push_back(i);
    }
    std::vector<std::size_t> eligible;
    for (std::size_t child : pm.outputs) {
      std::size_t pos = 0;
      for (std::size_t i : population) pos += static_cast<std::size_t>(closure[i][child]);
      if (pos >= params.min_pos && pos > 0) eligible.push_back(child);
    }
    const std::string name = pm.parent == Taxonomy::npos ? std::string("ROOT") : t.node_at(pm.parent).id;
    if (eligible.size() == 1) {
      pm.inherited_child = eligible[0];
      notes[m] = "single eligible child " + t.node_at(eligible[0]).id + " inherits the parent prediction";
      return;
    }
    if (eligible.empty()) {
      notes[m] = "no eligible children";
      return;
    }
    Matrix targets(x.rows(), pm.outputs.size());
    for (std::size_t i : population) {
      for (std::size_t k = 0; k < pm.outputs.size(); ++k) targets(i, k) = closure[i][pm.outputs[k]];
    }
    pm.network = Mlp::train(x, targets, population, params.network, derive_seed(seed, m));
  });
  for (std::size_t m = 0; m < h.parent_models.size(); ++m) {
    if (notes[m].empty()) continue;
    const auto& pm = h.parent_models[m];
    h.skipped.push_back({pm.parent == Taxonomy::npos ? std::string("ROOT") : t.node_at(pm.parent).id, notes[m]});
  }
  return h;
}

Predictions predict_nodes(const HierarchyClassifier& h, const Corpus& corpus, std::span<const std::size_t> nodes,
                          const Taxonomy& t, std::size_t jobs) {
  check_resources(h.config, h.resources);
  const Matrix x = assemble_matrix(h.config, corpus, nodes, h.resources);
  std::vector<std::vector<std::size_t>> labels(nodes.size());
  parallel_for(nodes.size(), jobs, [&](std::size_t i) { labels[i] = h.predict_row(x.row(i), t); });
  Predictions out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<std::string> ids;
    for (std::size_t c : labels[i]) ids.push_back(t.node_at(c).id);
    out.emplace(corpus.nodes()[nodes[i]].key(), std::move(ids));
  }
  return out;
}

namespace {

std::map<std::string, std::vector<std::string>> predict_document(const HierarchyClassifier& h, const std::string& doc_id,
                                                                 const PolicyDocument& doc, const Taxonomy& t) {
  std::vector<CorpusDocument> one{{doc_id, doc}};
  const Corpus c = Corpus::from_documents(std::move(one), t);
  std::vector<std::size_t> all(c.nodes().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::map<std::string, std::vector<std::string>> out;
  for (auto& [key, labels] : predict_nodes(h, c, all, t)) out.emplace(key.substr(doc_id.size() + 1), std::move(labels));
  return out;
}

}  // namespace

std::map<std::string, std::vector<std::string>> predict_document_lcn(const HierarchyClassifier& h,
                                                                     const std::string& doc_id,
                                                                     const PolicyDocument& doc, const Taxonomy& t) {
  if (h.architecture != Architecture::kLcn) throw ArgumentError("classifier is not an LCN classifier");
  return predict_document(h, doc_id, doc, t);
}

std::map<std::string, std::vector<std::string>> predict_document_lcpn(const HierarchyClassifier& h,
                                                                      const std::string& doc_id,
                                                                      const PolicyDocument& doc, const Taxonomy& t) {
  if (h.architecture != Architecture::kLcpn) throw ArgumentError("classifier is not an LCPN classifier");
  return predict_document(h, doc_id, doc, t);
}

// ------------------------------------------------------------------ bundles

namespace {

std::string index_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string expect_line(std::istream& in, const std::string& prefix, const std::string& what) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0) throw FormatError(what + ": expected " + prefix);
  return line.substr(prefix.size());
}

}  // namespace

void HierarchyClassifier::save(const std::filesystem::path& dir, const Taxonomy& t) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ostringstream m;
  m << "architecture=" << to_string(architecture) << "\n";
  m << "type_id=" << config.type_id << "\n";
  m << "features=" << config.describe() << "\n";
  m << "dimension=" << config.dimension() << "\n";
  m << "embedding_dim=" << (config.source == FeatureSource::kEmbedding ? config.current_dim : 0) << "\n";
  m << "seed=" << seed << "\n";
  if (architecture == Architecture::kLcn) {
    m << "min_pos=" << lcn.min_pos << "\n";
    m << "upsample_ratio=" << text::format_double(lcn.upsample_ratio) << "\n";
    m << "threshold=" << text::format_double(lcn.threshold) << "\n";
    m << "forest_trees=" << lcn.forest.tree_count << "\n";
    m << "forest_strategy=" << to_string(lcn.forest.strategy) << "\n";
    m << "forest_bootstrap=" << (lcn.forest.bootstrap ? 1 : 0) << "\n";
    m << "forest_max_features=" << lcn.forest.max_features << "\n";
    m << "forest_max_depth=" << lcn.forest.max_depth << "\n";
  } else {
    m << "min_pos=" << lcpn.min_pos << "\n";
    m << "threshold=" << text::format_double(lcpn.threshold) << "\n";
    m << "hidden=" << lcpn.network.hidden << "\n";
    m << "learning_rate=" << text::format_double(lcpn.network.learning_rate) << "\n";
    m << "batch_size=" << lcpn.network.batch_size << "\n";
    m << "max_epochs=" << lcpn.network.max_epochs << "\n";
    m << "patience=" << lcpn.network.patience << "\n";
    m << "validation_fraction=" << text::format_double(lcpn.network.validation_fraction) << "\n";
  }
  if (resources.current) {
    std::ostringstream v;
    resources.current->write(v);
    write_file(dir / "vocabulary_current.txt", v.str());
    m << "vocabulary_current=vocabulary_current.txt\n";
  }
  if (resources.parent) {
    std::ostringstream v;
    resources.parent->write(v);
    write_file(dir / "vocabulary_parent.txt", v.str());
    m << "vocabulary_parent=vocabulary_parent.txt\n";
  }
  if (resources.keywords) {
    write_file(dir / "keywords.csv", resources.keywords->to_csv(t));
    m << "keywords=keywords.csv\n";
  }
  if (architecture == Architecture::kLcn) {
    for (std::size_t c = 0; c < concept_models.size(); ++c) {
      if (!concept_models[c]) continue;
      const std::string file = "concept_" + index_name(c) + ".lcnf";
      std::ostringstream f;
      f << kLcnModelMagic << "\nconcept=" << t.node_at(c).id << "\n";
      concept_models[c]->write(f);
      write_file(dir / file, f.str());
      m << "model\t" << t.node_at(c).id << "\t" << file << "\n";
    }
  } else {
    for (std::size_t p = 0; p < parent_models.size(); ++p) {
      const auto& pm = parent_models[p];
      const std::string parent = pm.parent == Taxonomy::npos ? std::string("ROOT") : t.node_at(pm.parent).id;
      const std::string file = "parent_" + index_name(p) + ".lcpn";
      std::vector<std::string> outs;
      for (std::size_t o : pm.outputs) outs.push_back(t.node_at(o).id);
      std::ostringstream f;
      f << kLcpnModelMagic << "\nparent=" << parent << "\noutputs=" << text::join(outs, ";") << "\n";
      f << "inherit=" << (pm.inherited_child ? t.node_at(*pm.inherited_child).id : std::string()) << "\n";
      f << "network=" << (pm.network ? 1 : 0) << "\n";
      if (pm.network) pm.network->write(f);
      write_file(dir / file, f.str());
      m << "model\t" << parent << "\t" << file << "\n";
    }
  }
  for (const auto& s : skipped) m << "skip\t" << s.concept_id << "\t" << s.reason << "\n";
  write_file(dir / "manifest", m.str());
}

HierarchyClassifier HierarchyClassifier::load(const std::filesystem::path& dir, const Taxonomy& t,
                                              std::shared_ptr<const EmbeddingStore> embeddings) {
  std::map<std::string, std::string> kv;
  std::vector<std::pair<std::string, std::string>> models;
  HierarchyClassifier h;
  for (const auto& line : text::split(read_file(dir / "manifest"), '\n')) {
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields[0] == "model" && fields.size() == 3) {
      models.emplace_back(fields[1], fields[2]);
    } else if (fields[0] == "skip" && fields.size() == 3) {
      h.skipped.push_back({fields[1], fields[2]});
    } else {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("malformed manifest line: " + line);
      kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError("manifest lacks " + k);
    return it->second;
  };
  auto get_size = [&](const std::string& k) { return static_cast<std::size_t>(std::stoull(get(k))); };
  h.architecture = parse_architecture(get("architecture"));
  h.seed = std::stoull(get("seed"));
  const std::size_t emb_dim = get_size("embedding_dim");
  h.config = FeatureConfig::for_type(std::stoi(get("type_id")), emb_dim);
  if (h.config.dimension() != get_size("dimension")) throw FormatError("manifest dimension does not match its type");
  if (kv.count("vocabulary_current")) {
    std::istringstream in(read_file(dir / get("vocabulary_current")));
    h.resources.current = std::make_shared<Vocabulary>(Vocabulary::read(in));
  }
  if (kv.count("vocabulary_parent")) {
    std::istringstream in(read_file(dir / get("vocabulary_parent")));
    h.resources.parent = std::make_shared<Vocabulary>(Vocabulary::read(in));
  }
  if (kv.count("keywords")) {
    h.resources.keywords = std::make_shared<KeywordTable>(KeywordTable::parse(read_file(dir / get("keywords")), t));
  }
  if (h.config.source == FeatureSource::kEmbedding) h.resources.embeddings = std::move(embeddings);

  if (h.architecture == Architecture::kLcn) {
    h.lcn.min_pos = get_size("min_pos");
    h.lcn.upsample_ratio = text::parse_double(get("upsample_ratio"));
    h.lcn.threshold = text::parse_double(get("threshold"));
    h.concept_models.resize(t.size());
    for (const auto& [id, file] : models) {
      std::istringstream in(read_file(dir / file));
      if (expect_line(in, "", file) != kLcnModelMagic) throw FormatError(file + ": missing LCNF1 header");
      if (expect_line(in, "concept=", file) != id) throw FormatError(file + ": concept does not match manifest");
      auto forest = DecisionForest::read(in);
      if (forest.dimension() != h.config.dimension()) throw FormatError(file + ": feature dimension mismatch");
      h.lcn.forest = forest.params();
      h.concept_models[t.index_of(id)] = std::move(forest);
    }
  } else {
    h.lcpn.min_pos = get_size("min_pos");
    h.lcpn.threshold = text::parse_double(get("threshold"));
    h.lcpn.network.hidden = get_size("hidden");
    h.lcpn.network.learning_rate = text::parse_double(get("learning_rate"));
    h.lcpn.network.batch_size = get_size("batch_size");
    h.lcpn.network.max_epochs = get_size("max_epochs");
    h.lcpn.network.patience = get_size("patience");
    h.lcpn.network.validation_fraction = text::parse_double(get("validation_fraction"));
    for (const auto& [id, file] : models) {
      std::istringstream in(read_file(dir / file));
      if (expect_line(in, "", file) != kLcpnModelMagic) throw FormatError(file + ": missing LCPN1 header");
      ParentModel pm;
      const std::string parent = expect_line(in, "parent=", file);
      if (parent != id) throw FormatError(file + ": parent does not match manifest");
      pm.parent = parent == "ROOT" ? Taxonomy::npos : t.index_of(parent);
      for (const auto& o : text::split(expect_line(in, "outputs=", file), ';')) {
        if (!o.empty()) pm.outputs.push_back(t.index_of(o));
      }
      const std::string inherit = expect_line(in, "inherit=", file);
      if (!inherit.empty()) pm.inherited_child = t.index_of(inherit);
      if (expect_line(in, "network=", file) == "1") {
        pm.network = Mlp::read(in);
        if (pm.network->input_dimension() != h.config.dimension() || pm.network->output_count() != pm.outputs.size()) {
          throw FormatError(file + ": network shape mismatch");
        }
      }
      h.parent_models.push_back(std::move(pm));
    }
    if (h.parent_models.empty() || h.parent_models[0].parent != Taxonomy::npos) {
      throw FormatError("LCPN bundle lacks the root model");
    }
  }
  return h;
}

}  // namespace ppkit
