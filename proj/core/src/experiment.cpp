// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/experiment.hpp"

#include <fstream>
#include <sstream>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

namespace {

std::size_t parse_size(std::string_view key, std::string_view v) {
  try {
    std::size_t pos = 0;
    const std::string s(text::trim(v));
    if (s.empty() || s[0] == '-') throw std::invalid_argument("negative");
    const auto out = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(out);
  } catch (const std::exception&) {
    throw ArgumentError("bad value for " + std::string(key) + ": " + std::string(v));
  }
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return text::parse_double(text::trim(v));
  } catch (const FormatError&) {
    throw ArgumentError("bad value for " + std::string(key) + ": " + std::string(v));
  }
}

template <typename T, typename Fn>
std::vector<T> parse_list(std::string_view v, Fn&& fn) {
  std::vector<T> out;
  for (const auto& part : text::split(v, ',')) {
    const auto p = text::trim(part);
    if (!p.empty()) out.push_back(fn(p));
  }
  if (out.empty()) throw ArgumentError("empty list: " + std::string(v));
  return out;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  const std::string v(text::trim(value));
  if (key == "corpus_dir") corpus_dir = v;
  else if (key == "taxonomy") taxonomy_path = v;
  else if (key == "keywords") keyword_path = v;
  else if (key == "embeddings") embedding_path = v;
  else if (key == "model_dir") model_dir = v;
  else if (key == "report_dir") report_dir = v;
  else if (key == "split_file") split_file = v;
  else if (key == "r_h") ratio_threshold = parse_real(key, v);
  else if (key == "modes" || key == "mode") modes = parse_list<SplitMode>(v, [](std::string_view s) { return parse_split_mode(s); });
  else if (key == "seeds" || key == "seed") {
    seeds = parse_list<std::uint64_t>(v, [&](std::string_view s) { return static_cast<std::uint64_t>(parse_size(key, s)); });
  } else if (key == "n_test") n_test = parse_size(key, v);
  else if (key == "test_fraction") test_fraction = parse_real(key, v);
  else if (key == "types" || key == "type") {
    type_ids = parse_list<int>(v, [&](std::string_view s) { return static_cast<int>(parse_size(key, s)); });
  } else if (key == "min_pos") min_pos = parse_size(key, v);
  else if (key == "min_support") min_support = parse_size(key, v);
  else if (key == "upsample_ratio") upsample_ratio = parse_real(key, v);
  else if (key == "forest_trees") forest_trees = parse_size(key, v);
  else if (key == "hidden") hidden = parse_size(key, v);
  else if (key == "batch_size") batch_size = parse_size(key, v);
  else if (key == "max_epochs") max_epochs = parse_size(key, v);
  else if (key == "patience") patience = parse_size(key, v);
  else if (key == "learning_rate") learning_rate = parse_real(key, v);
  else if (key == "jobs") jobs = parse_size(key, v);
  else throw ArgumentError("unknown config key: " + std::string(key));
}

void PipelineConfig::apply(std::string_view content) {
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set(text::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  PipelineConfig c;
  c.apply(ss.str());
  return c;
}

std::string PipelineConfig::serialize() const {
  std::vector<std::string> m, s, t;
  for (auto x : modes) m.push_back(to_string(x));
  for (auto x : seeds) s.push_back(std::to_string(x));
  for (auto x : type_ids) t.push_back(std::to_string(x));
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
  kv("corpus_dir", corpus_dir.string());
  kv("taxonomy", resolved_taxonomy_path().string());
  kv("keywords", resolved_keyword_path().string());
  kv("embeddings", embedding_path.string());
  kv("model_dir", model_dir.string());
  kv("report_dir", report_dir.string());
  kv("split_file", split_file.string());
  kv("r_h", text::format_double(ratio_threshold));
  kv("modes", text::join(m, ","));
  kv("seeds", text::join(s, ","));
  kv("n_test", std::to_string(n_test));
  kv("test_fraction", text::format_double(test_fraction));
  kv("types", text::join(t, ","));
  kv("min_pos", std::to_string(min_pos));
  kv("min_support", std::to_string(min_support));
  kv("upsample_ratio", text::format_double(upsample_ratio));
  kv("forest_trees", std::to_string(forest_trees));
  kv("hidden", std::to_string(hidden));
  kv("batch_size", std::to_string(batch_size));
  kv("max_epochs", std::to_string(max_epochs));
  kv("patience", std::to_string(patience));
  kv("learning_rate", text::format_double(learning_rate));
  return out;
}

void PipelineConfig::validate() const {
  ExtractionConfig{ratio_threshold}.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ArgumentError("test_fraction must be in (0, 1)");
  if (!(upsample_ratio >= 0.0)) throw ArgumentError("upsample_ratio must be >= 0");
  if (forest_trees == 0) throw ArgumentError("forest_trees must be >= 1");
  if (hidden == 0 || batch_size == 0) throw ArgumentError("hidden and batch_size must be >= 1");
  for (int t : type_ids) {
    if (t < 1 || t > 12) throw ArgumentError("type id must be in 1..12, got " + std::to_string(t));
  }
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p)) throw ArgumentError(std::string(what) + " not found: " + p.string());
  };
  must_exist(corpus_dir, "corpus directory");
  must_exist(taxonomy_path, "taxonomy file");
  must_exist(keyword_path, "keyword file");
  must_exist(embedding_path, "embedding store");
  must_exist(split_file, "split file");
}

LcnParams PipelineConfig::lcn_params() const {
  LcnParams p;
  p.forest = ForestParams::random_forest(forest_trees);
  p.min_pos = min_pos;
  p.upsample_ratio = upsample_ratio;
  return p;
}

LcpnParams PipelineConfig::lcpn_params() const {
  LcpnParams p;
  p.network.hidden = hidden;
  p.network.batch_size = batch_size;
  p.network.max_epochs = max_epochs;
  p.network.patience = patience;
  p.network.learning_rate = learning_rate;
  return p;
}

std::filesystem::path PipelineConfig::resolved_taxonomy_path() const {
  return taxonomy_path.empty() ? default_taxonomy_path() : taxonomy_path;
}

std::filesystem::path PipelineConfig::resolved_keyword_path() const {
  return keyword_path.empty() ? default_keyword_path() : keyword_path;
}

SplitSpec make_split(const Corpus& corpus, SplitMode mode, std::uint64_t seed, const PipelineConfig& cfg) {
  return mode == SplitMode::kDocument ? split_document_level(corpus, cfg.n_test, seed)
                                      : split_segment_level(corpus, cfg.test_fraction, seed);
}

RunArtifacts run_experiment(const ExperimentInputs& in, int type_id, const SplitSpec& split,
                            const PipelineConfig& cfg) {
  if (!in.corpus || !in.taxonomy) throw ArgumentError("experiment needs a corpus and a taxonomy");
  const std::size_t emb_dim = FeatureConfig::needs_embeddings(type_id) && in.embeddings ? in.embeddings->dimension() : 0;
  const FeatureConfig fc = FeatureConfig::for_type(type_id, emb_dim);
  if (fc.use_keywords && !in.keywords) throw ArgumentError("keyword table required for type " + std::to_string(type_id));

  RunArtifacts out;
  out.split = split;
  const ResolvedSplit rs = resolve_split(*in.corpus, split);
  if (rs.train.empty()) throw ArgumentError("empty training set");
  if (rs.test.empty()) throw ArgumentError("empty test set");
  const auto resources =
      fit_feature_resources(fc, *in.corpus, rs.train, in.keywords, in.embeddings, &out.diagnostics);
  if (fc.architecture == Architecture::kLcn) {
    out.model = train_lcn(*in.corpus, rs.train, fc, resources, *in.taxonomy, cfg.lcn_params(), split.seed, cfg.jobs);
  } else {
    out.model = train_lcpn(*in.corpus, rs.train, fc, resources, *in.taxonomy, cfg.lcpn_params(), split.seed, cfg.jobs);
  }
  const auto predictions = predict_nodes(out.model, *in.corpus, rs.test, *in.taxonomy, cfg.jobs);
  EvaluationOptions eo;
  eo.min_support = cfg.min_support;
  out.report = evaluate_run(predictions, *in.corpus, rs.test, *in.taxonomy, eo);
  out.report.type_id = type_id;
  out.report.mode = split.mode;
  out.report.seed = split.seed;
  if (in.embeddings && in.embeddings->missing_lookups() > 0) {
    out.diagnostics.warn(std::to_string(in.embeddings->missing_lookups()) + " embedding lookups missed the store");
  }
  return out;
}

std::vector<MetricsReport> compare_frameworks(const ExperimentInputs& in, const PipelineConfig& cfg,
                                              Diagnostics* diag) {
  if (cfg.type_ids.empty() || cfg.modes.empty() || cfg.seeds.empty()) {
    throw ArgumentError("comparison needs at least one type, mode and seed");
  }
  std::vector<MetricsReport> reports;
  for (int type_id : cfg.type_ids) {
    if (FeatureConfig::needs_embeddings(type_id) && !in.embeddings) {
      if (diag) diag->warn("type " + std::to_string(type_id) + " skipped: embedding store required");
      continue;
    }
    for (SplitMode mode : cfg.modes) {
      for (std::uint64_t seed : cfg.seeds) {
        reports.push_back(run_experiment(in, type_id, make_split(*in.corpus, mode, seed, cfg), cfg).report);
      }
    }
  }
  return reports;
}

}  // namespace ppkit
