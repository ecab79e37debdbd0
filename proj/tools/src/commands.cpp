// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "ppkit/block_classifier.hpp"
#include "ppkit/corpus.hpp"
#include "ppkit/evaluation.hpp"
#include "ppkit/experiment.hpp"
#include "ppkit/parallel.hpp"
#include "ppkit/ppxml.hpp"
#include "ppkit/structure_builder.hpp"
#include "ppkit/text.hpp"

namespace fs = std::filesystem;

namespace ppkit::cli {

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
  if (!out) throw Error("write failed: " + p.string());
}

// Flags that override one PipelineConfig key each.
struct ConfigFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr ConfigFlag kConfigFlags[] = {
    {"--corpus", "corpus_dir", "Directory of annotated .ppxml files"},
    {"--taxonomy", "taxonomy", "Taxonomy TSV (default: bundled)"},
    {"--keywords", "keywords", "Keyword CSV (default: bundled)"},
    {"--embeddings", "embeddings", "Embedding store for types 5, 6, 11, 12"},
    {"--model-dir", "model_dir", "Where model bundles live"},
    {"--report-dir", "report_dir", "Where reports are written"},
    {"--split-file", "split_file", "Use this split instead of drawing one"},
    {"--r-h", "r_h", "Extraction ratio threshold"},
    {"--modes", "modes", "Split modes: segment,document"},
    {"--seeds", "seeds", "Comma-separated seeds"},
    {"--n-test", "n_test", "Test documents in document mode"},
    {"--test-fraction", "test_fraction", "Test share of nodes in segment mode"},
    {"--types", "types", "Comma-separated feature types 1..12"},
    {"--min-pos", "min_pos", "Positive nodes a concept needs for a model"},
    {"--min-support", "min_support", "Test support a concept needs to be scored"},
    {"--upsample-ratio", "upsample_ratio", "Positive/negative ratio after upsampling"},
    {"--trees", "forest_trees", "Trees per concept forest"},
    {"--hidden", "hidden", "Hidden units of the parent networks"},
    {"--batch-size", "batch_size", "Network mini-batch size"},
    {"--max-epochs", "max_epochs", "Network epoch cap"},
    {"--patience", "patience", "Early-stopping patience"},
    {"--learning-rate", "learning_rate", "Network learning rate"},
};

// Options shared by every subcommand that reads a PipelineConfig.
struct ConfigOptions {
  std::map<std::string, std::string> values;  // key -> flag value
  std::vector<std::string> sets;              // --set key=value
  std::vector<std::pair<const char*, CLI::Option*>> options;

  void attach(CLI::App* sub) {
    for (const auto& f : kConfigFlags) options.emplace_back(f.key, sub->add_option(f.flag, values[f.key], f.help));
    sub->add_option("--set", sets, "Override any config key (key=value)");
  }

  void apply(PipelineConfig& cfg) const {
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got " + s);
      cfg.set(text::trim(std::string_view(s).substr(0, eq)), std::string_view(s).substr(eq + 1));
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg.set(key, values.at(key));
    }
  }
};

struct GlobalOptions {
  std::string config_path;
  std::size_t jobs = 0;  // 0: keep the config value
};

PipelineConfig resolve_config(const GlobalOptions& g, const ConfigOptions* flags) {
  PipelineConfig cfg;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  }
  if (!path.empty()) cfg = PipelineConfig::load(path);
  if (flags) flags->apply(cfg);
  if (g.jobs > 0) cfg.jobs = g.jobs;
  cfg.validate();
  return cfg;
}

std::string run_name(int type_id, SplitMode mode, std::uint64_t seed) {
  return "type" + std::to_string(type_id) + "_" + to_string(mode) + "_seed" + std::to_string(seed);
}

struct Resources {
  Taxonomy taxonomy;
  std::shared_ptr<const KeywordTable> keywords;
  std::shared_ptr<const EmbeddingStore> embeddings;
};

Resources load_resources(const PipelineConfig& cfg) {
  Resources r{load_taxonomy(cfg.resolved_taxonomy_path()), nullptr, nullptr};
  r.keywords = std::make_shared<const KeywordTable>(KeywordTable::load(cfg.resolved_keyword_path(), r.taxonomy));
  if (!cfg.embedding_path.empty()) {
    r.embeddings = std::make_shared<const EmbeddingStore>(EmbeddingStore::load(cfg.embedding_path));
  }
  return r;
}

Corpus require_corpus(const PipelineConfig& cfg, const Taxonomy& t) {
  if (cfg.corpus_dir.empty()) throw ArgumentError("no corpus directory configured (--corpus)");
  return load_corpus(cfg.corpus_dir, t, cfg.jobs);
}

fs::path require_dir(const fs::path& p, const char* flag) {
  if (p.empty()) throw ArgumentError(std::string("no output directory configured (") + flag + ")");
  return p;
}

// The splits a train/compare run iterates over: the split file alone, or
// one drawn split per (mode, seed).
std::vector<SplitSpec> planned_splits(const Corpus& corpus, const PipelineConfig& cfg) {
  if (!cfg.split_file.empty()) return {parse_split(read_file(cfg.split_file))};
  std::vector<SplitSpec> out;
  for (SplitMode m : cfg.modes) {
    for (std::uint64_t s : cfg.seeds) out.push_back(make_split(corpus, m, s, cfg));
  }
  return out;
}

void print_warnings(const Diagnostics& d, std::ostream& err) {
  for (const auto& w : d.warnings) err << "warning: " << w << "\n";
}

void write_reports(const fs::path& dir, const std::vector<MetricsReport>& reports, std::ostream& out) {
  for (const auto& r : reports) {
    const auto name = run_name(r.type_id, r.mode, r.seed);
    write_file(dir / (name + ".csv"), report_csv(std::span<const MetricsReport>(&r, 1)));
    write_file(dir / (name + ".txt"), report_text(r));
    out << name << ": macro F1 level-1 " << text::format_fixed(r.macro_f1_level1, 3) << " ("
        << r.evaluated_level1().size() << " concepts), all " << text::format_fixed(r.macro_f1_all, 3) << " ("
        << r.evaluated_all().size() << " concepts)\n";
  }
  write_file(dir / "runs.csv", report_csv(reports));
  const auto rows = build_comparison(reports);
  write_file(dir / "comparison.csv", comparison_csv(rows));
  write_file(dir / "comparison.txt", comparison_table(rows));
}

// ------------------------------------------------------------------ extract

struct ExtractOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string block_model;
  double r_h = -1;
};

int cmd_extract(const ExtractOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = resolve_config(g, nullptr);
  ExtractionConfig ec{o.r_h > 0 ? o.r_h : cfg.ratio_threshold};
  ec.validate();
  std::optional<BlockClassifierModel> model;
  if (!o.block_model.empty()) model = BlockClassifierModel::load(o.block_model);

  std::set<std::string> stems;
  for (const auto& in : o.inputs) {
    if (!stems.insert(fs::path(in).stem().string()).second) {
      throw ArgumentError("two inputs share the output name " + fs::path(in).stem().string());
    }
  }
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);

  struct Outcome {
    bool ok = false;
    std::string message;
  };
  std::vector<Outcome> results(o.inputs.size());
  parallel_for(o.inputs.size(), cfg.jobs, [&](std::size_t i) {
    const fs::path in(o.inputs[i]);
    const std::string stem = in.stem().string();
    try {
      auto conv = convert_html(read_file(in), in.filename().string(), ec, model ? &*model : nullptr);
      write_file(fs::path(in).replace_extension(".clean.html"), conv.cleaned_html);
      write_file(dir / (stem + ".ppxml"), serialize_ppxml(conv.document));
      write_file(dir / (stem + ".validation.txt"), conv.report.to_text());
      results[i].ok = true;
      results[i].message = std::to_string(count_text_nodes(conv.document)) + " nodes, " +
                           std::to_string(conv.report.errors.size()) + " errors, " +
                           std::to_string(conv.report.warnings.size()) + " warnings";
    } catch (const std::exception& e) {
      results[i].message = e.what();
    }
  });

  std::size_t failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].ok) {
      out << "ok   " << o.inputs[i] << ": " << results[i].message << "\n";
    } else {
      ++failures;
      err << "FAIL " << o.inputs[i] << ": " << results[i].message << "\n";
    }
  }
  out << (results.size() - failures) << "/" << results.size() << " files extracted\n";
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- structure

int cmd_structure_validate(const std::vector<std::string>& inputs, const std::string& out_dir, std::ostream& out,
                           std::ostream& err) {
  std::size_t failures = 0;
  for (const auto& in : inputs) {
    try {
      const auto doc = parse_ppxml(read_file(in));
      const auto report = validate_structure(doc);
      if (!out_dir.empty()) write_file(fs::path(out_dir) / (fs::path(in).stem().string() + ".validation.txt"), report.to_text());
      if (!report.ok()) ++failures;
      (report.ok() ? out : err) << (report.ok() ? "ok   " : "FAIL ") << in << ": " << report.errors.size()
                                << " errors, " << report.warnings.size() << " warnings\n";
    } catch (const std::exception& e) {
      ++failures;
      err << "FAIL " << in << ": " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_structure_blocks(const std::vector<std::string>& inputs, const std::string& out_file, double r_h,
                         std::ostream& out, std::ostream& err) {
  ExtractionConfig ec{r_h};
  ec.validate();
  std::vector<BlockSample> samples;
  std::vector<std::string> texts;
  std::size_t failures = 0;
  for (const auto& in : inputs) {
    try {
      const auto conv = convert_html(read_file(in), fs::path(in).filename().string(), ec, nullptr);
      for (std::size_t b = 0; b < conv.blocks.size(); ++b) {
        samples.push_back({conv.blocks[b].features, conv.classes[b]});
        texts.push_back(conv.blocks[b].text);
      }
    } catch (const std::exception& e) {
      ++failures;
      err << "FAIL " << in << ": " << e.what() << "\n";
    }
  }
  write_file(out_file, block_samples_csv(samples, texts));
  out << samples.size() << " blocks written to " << out_file << " with heuristic labels\n";
  return failures == 0 ? 0 : 1;
}

int cmd_structure_train(const std::string& csv, const std::string& out_file, std::size_t folds, std::uint64_t seed,
                        std::size_t trees, std::ostream& out) {
  const auto samples = parse_block_samples_csv(read_file(csv));
  const auto params = ForestParams::extra_trees(trees);
  if (folds >= 2) {
    const auto cv = cross_validate_blocks(samples, folds, seed, params);
    out << folds << "-fold macro F1 " << text::format_fixed(cv.mean_f1, 4) << "\n";
  }
  train_block_classifier(samples, seed, params).save(out_file);
  out << "model trained on " << samples.size() << " blocks written to " << out_file << "\n";
  return 0;
}

// -------------------------------------------------------------- train/eval

int cmd_train(const ConfigOptions& flags, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(g, &flags);
  const fs::path model_dir = require_dir(cfg.model_dir, "--model-dir");
  const Resources res = load_resources(cfg);
  const Corpus corpus = require_corpus(cfg, res.taxonomy);
  const ExperimentInputs in{&corpus, &res.taxonomy, res.keywords, res.embeddings};
  for (const auto& split : planned_splits(corpus, cfg)) {
    for (int type_id : cfg.type_ids) {
      auto run = run_experiment(in, type_id, split, cfg);
      const fs::path dir = model_dir / run_name(type_id, split.mode, split.seed);
      run.model.save(dir, res.taxonomy);
      write_file(dir / "config.txt", cfg.serialize());
      write_file(dir / "split.txt", serialize_split(split));
      print_warnings(run.diagnostics, err);
      out << dir.string() << ": " << run.model.trained_model_count() << " models, " << run.model.skipped.size()
          << " concepts skipped\n";
    }
  }
  return 0;
}

int cmd_eval(const ConfigOptions& flags, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(g, &flags);
  const fs::path model_dir = require_dir(cfg.model_dir, "--model-dir");
  const fs::path report_dir = require_dir(cfg.report_dir, "--report-dir");
  const Resources res = load_resources(cfg);
  const Corpus corpus = require_corpus(cfg, res.taxonomy);

  std::vector<std::pair<int, SplitSpec>> runs;
  if (!cfg.split_file.empty()) {
    const auto s = parse_split(read_file(cfg.split_file));
    for (int t : cfg.type_ids) runs.emplace_back(t, s);
  } else {
    for (int t : cfg.type_ids) {
      for (SplitMode m : cfg.modes) {
        for (std::uint64_t seed : cfg.seeds) runs.emplace_back(t, SplitSpec{m, seed, {}, {}});
      }
    }
  }
  std::vector<MetricsReport> reports;
  for (const auto& [type_id, planned] : runs) {
    const fs::path dir = model_dir / run_name(type_id, planned.mode, planned.seed);
    if (!fs::exists(dir / "manifest")) throw ArgumentError("no model bundle at " + dir.string() + " (run train first)");
    const auto model = HierarchyClassifier::load(dir, res.taxonomy, res.embeddings);
    if (model.config.type_id != type_id) throw FormatError(dir.string() + " holds a type " + std::to_string(model.config.type_id) + " model");
    const auto split = parse_split(read_file(dir / "split.txt"));
    const auto rs = resolve_split(corpus, split);
    EvaluationOptions eo;
    eo.min_support = cfg.min_support;
    auto report = evaluate_run(predict_nodes(model, corpus, rs.test, res.taxonomy, cfg.jobs), corpus, rs.test,
                               res.taxonomy, eo);
    report.type_id = type_id;
    report.mode = split.mode;
    report.seed = split.seed;
    reports.push_back(std::move(report));
  }
  if (res.embeddings && res.embeddings->missing_lookups() > 0) {
    err << "warning: " << res.embeddings->missing_lookups() << " embedding lookups missed the store\n";
  }
  write_reports(report_dir, reports, out);
  return 0;
}

int cmd_compare(const ConfigOptions& flags, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(g, &flags);
  const fs::path report_dir = require_dir(cfg.report_dir, "--report-dir");
  const Resources res = load_resources(cfg);
  const Corpus corpus = require_corpus(cfg, res.taxonomy);
  const ExperimentInputs in{&corpus, &res.taxonomy, res.keywords, res.embeddings};

  std::vector<MetricsReport> reports;
  if (!cfg.split_file.empty()) {
    const auto split = parse_split(read_file(cfg.split_file));
    for (int t : cfg.type_ids) {
      if (FeatureConfig::needs_embeddings(t) && !res.embeddings) {
        err << "warning: type " << t << " skipped: embedding store required\n";
        continue;
      }
      reports.push_back(run_experiment(in, t, split, cfg).report);
    }
  } else {
    Diagnostics diag;
    reports = compare_frameworks(in, cfg, &diag);
    print_warnings(diag, err);
  }
  write_reports(report_dir, reports, out);
  write_file(report_dir / "config.txt", cfg.serialize());
  out << reports.size() << " runs compared\n" << comparison_table(build_comparison(reports));
  return 0;
}

// ------------------------------------------------------------ stats, kappa

int cmd_stats(const ConfigOptions& flags, const GlobalOptions& g, const std::string& out_file, bool direct_only,
              std::ostream& out) {
  const PipelineConfig cfg = resolve_config(g, &flags);
  const Taxonomy t = load_taxonomy(cfg.resolved_taxonomy_path());
  const Corpus corpus = require_corpus(cfg, t);
  fs::path target = out_file;
  if (target.empty()) target = require_dir(cfg.report_dir, "--report-dir or --out") / "coverage.csv";
  const auto rows = corpus_statistics(corpus, t, !direct_only);
  write_file(target, coverage_csv(rows));
  const auto s = corpus.summary();
  out << s.documents << " documents, " << s.titles << " titles, " << s.paragraphs << " paragraphs, "
      << s.labeled_nodes << " labeled nodes; coverage written to " << target.string() << "\n";
  return 0;
}

int cmd_kappa(const std::string& a, const std::string& b, const std::string& out_file, const GlobalOptions& g,
              std::ostream& out) {
  const PipelineConfig cfg = resolve_config(g, nullptr);
  const Taxonomy t = load_taxonomy(cfg.resolved_taxonomy_path());
  const auto report = annotation_agreement(load_corpus(a, t, cfg.jobs), load_corpus(b, t, cfg.jobs));
  std::string csv = "doc_id,kappa\n";
  for (const auto& [doc, k] : report.per_document) csv += doc + "," + text::format_fixed(k, 6) + "\n";
  if (!out_file.empty()) write_file(out_file, csv);
  out << "mean kappa " << text::format_fixed(report.mean, 4) << " over " << report.per_document.size()
      << " documents (" << report.unit << ")\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy-policy structuring and concept classification"};
  app.name("ppkit");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, std::string("Config file of key=value lines (default: $") + kConfigEnv + ")");
  app.add_option("--jobs,-j", g.jobs, "Worker threads (outputs do not depend on it)");

  ExtractOptions ex;
  auto* extract = app.add_subcommand("extract", "Convert saved HTML pages to PP-XML skeletons");
  extract->add_option("inputs", ex.inputs, "HTML files")->required()->check(CLI::ExistingFile);
  extract->add_option("--out,-o", ex.out_dir, "Output directory")->required();
  extract->add_option("--block-model", ex.block_model, "Trained block classifier (default: heuristic)");
  extract->add_option("--r-h", ex.r_h, "Extraction ratio threshold");

  auto* structure = app.add_subcommand("structure", "Validate PP-XML or build the block classifier");
  structure->require_subcommand(1);
  std::vector<std::string> s_inputs;
  std::string s_out;
  auto* s_validate = structure->add_subcommand("validate", "Validate PP-XML files");
  s_validate->add_option("inputs", s_inputs, "PP-XML files")->required();
  s_validate->add_option("--out,-o", s_out, "Directory for validation reports");
  double s_rh = 0.55;
  auto* s_blocks = structure->add_subcommand("blocks", "Write heuristically labeled block features for review");
  s_blocks->add_option("inputs", s_inputs, "HTML files")->required()->check(CLI::ExistingFile);
  s_blocks->add_option("--out,-o", s_out, "Block CSV")->required();
  s_blocks->add_option("--r-h", s_rh, "Extraction ratio threshold");
  std::string s_csv;
  std::size_t s_folds = 5, s_trees = 200;
  std::uint64_t s_seed = 1;
  auto* s_train = structure->add_subcommand("train", "Train the block classifier from a labeled block CSV");
  s_train->add_option("samples", s_csv, "Labeled block CSV")->required()->check(CLI::ExistingFile);
  s_train->add_option("--out,-o", s_out, "Model file")->required();
  s_train->add_option("--folds", s_folds, "Cross-validation folds (0 or 1 to skip)");
  s_train->add_option("--seed", s_seed, "Random seed");
  s_train->add_option("--trees", s_trees, "Trees in the ensemble");

  ConfigOptions train_flags, eval_flags, compare_flags, stats_flags;
  auto* train = app.add_subcommand("train", "Train model bundles for every type, mode and seed");
  train_flags.attach(train);
  auto* eval = app.add_subcommand("eval", "Evaluate trained bundles on their test sides");
  eval_flags.attach(eval);
  auto* compare = app.add_subcommand("compare", "Train and evaluate every run, then tabulate");
  compare_flags.attach(compare);
  std::string stats_out;
  bool direct_only = false;
  auto* stats = app.add_subcommand("stats", "Per-concept document coverage");
  stats_flags.attach(stats);
  stats->add_option("--out,-o", stats_out, "Coverage CSV (default: <report_dir>/coverage.csv)");
  stats->add_flag("--direct-only", direct_only, "Count only nodes labeled with the concept itself");

  std::string ka, kb, k_out;
  auto* kappa = app.add_subcommand("kappa", "Inter-annotator agreement between two annotated corpora");
  kappa->add_option("first", ka, "First annotator's corpus")->required()->check(CLI::ExistingDirectory);
  kappa->add_option("second", kb, "Second annotator's corpus")->required()->check(CLI::ExistingDirectory);
  kappa->add_option("--out,-o", k_out, "Per-document CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed()) return cmd_extract(ex, g, out, err);
    if (s_validate->parsed()) return cmd_structure_validate(s_inputs, s_out, out, err);
    if (s_blocks->parsed()) return cmd_structure_blocks(s_inputs, s_out, s_rh, out, err);
    if (s_train->parsed()) return cmd_structure_train(s_csv, s_out, s_folds, s_seed, s_trees, out);
    if (train->parsed()) return cmd_train(train_flags, g, out, err);
    if (eval->parsed()) return cmd_eval(eval_flags, g, out, err);
    if (compare->parsed()) return cmd_compare(compare_flags, g, out, err);
    if (stats->parsed()) return cmd_stats(stats_flags, g, stats_out, direct_only, out);
    if (kappa->parsed()) return cmd_kappa(ka, kb, k_out, g, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ppkit::cli
