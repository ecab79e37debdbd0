// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "ppkit/classifiers.hpp"
#include "ppkit/error.hpp"
#include "ppkit/synthetic.hpp"
#include "test_support.hpp"

using namespace ppkit;
using namespace ppkit::testing;

namespace {

struct Fixture {
  Corpus corpus;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Fixture leakage_fixture() {
  const auto& t = shipped_taxonomy();
  LeakageCorpusParams p;
  p.documents = 16;
  Fixture f{Corpus::from_documents(make_leakage_corpus(t, p, 3), t), {}, {}};
  const auto split = resolve_split(f.corpus, split_document_level(f.corpus, 4, 1));
  f.train = split.train;
  f.test = split.test;
  return f;
}

LcnParams small_lcn() {
  LcnParams p;
  p.forest = ForestParams::random_forest(10);
  return p;
}

LcpnParams small_lcpn() {
  LcpnParams p;
  p.network.hidden = 8;
  p.network.max_epochs = 5;
  return p;
}

std::size_t idx(const std::string& id) { return shipped_taxonomy().index_of(id); }

bool closed_under_ancestors(const std::vector<std::string>& labels) {
  const auto& t = shipped_taxonomy();
  for (const auto& l : labels) {
    for (const auto& a : t.ancestors_of(l)) {
      if (std::find(labels.begin(), labels.end(), a) == labels.end()) return false;
    }
  }
  return true;
}

// Network of the right shape whose weights are irrelevant: lcpn_cascade
// takes scores from the caller.
Mlp dummy_network(std::size_t outputs) {
  Matrix x(2, 1), y(2, outputs);
  y(1, 0) = 1;
  MlpParams p;
  p.hidden = 2;
  p.max_epochs = 1;
  return Mlp::train(x, y, std::vector<std::size_t>{0, 1}, p, 1);
}

std::string dir_contents(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += f.filename().string() + "\n" + read_text(f);
  return out;
}

}  // namespace

TEST_SUITE("classifiers") {
  TEST_CASE("upsampling") {
    std::vector<int> labels(100, 0);
    std::fill(labels.begin(), labels.begin() + 10, 1);
    std::vector<std::size_t> rows(100);
    std::iota(rows.begin(), rows.end(), 0);
    const auto out = upsample_positives(rows, labels, 1.0 / 3.0, 5);
    std::size_t pos = 0;
    for (std::size_t r : out) pos += labels[r];
    CHECK(pos == 30);
    CHECK(out.size() - pos == 90);
    CHECK(std::equal(rows.begin(), rows.end(), out.begin()));
    CHECK(upsample_positives(rows, labels, 1.0 / 3.0, 5) == out);

    std::vector<int> balanced(100, 0);
    std::fill(balanced.begin(), balanced.begin() + 50, 1);
    CHECK(upsample_positives(rows, balanced, 1.0 / 3.0, 5) == rows);
    CHECK_THROWS_WITH_AS(upsample_positives(rows, std::vector<int>(100, 0), 1.0 / 3.0, 5),
                         "cannot upsample empty class", ArgumentError);
    CHECK_THROWS_AS(upsample_positives(rows, labels, 0.0, 5), ArgumentError);
  }

  TEST_CASE("label closure") {
    const auto& t = shipped_taxonomy();
    const std::vector<std::string> labels{"DATA SHARING.CONDITION"};
    CHECK(label_closure(labels, t) == std::vector<std::size_t>{idx("DATA SHARING"), idx("DATA SHARING.CONDITION")});
    AnnotatedNode n;
    n.labels = labels;
    CHECK(node_has_concept(n, idx("DATA SHARING"), t));
    CHECK(!node_has_concept(n, idx("DATA SHARING.RECIPIENT"), t));
  }

  TEST_CASE("lcn training, skip list and prediction") {
    const auto& t = shipped_taxonomy();
    const auto f = leakage_fixture();
    const auto cfg = FeatureConfig::for_type(1);
    const auto r = fit_feature_resources(cfg, f.corpus, f.train, nullptr, nullptr);
    const auto h = train_lcn(f.corpus, f.train, cfg, r, t, small_lcn(), 4);
    CHECK(h.concept_models.size() == 96);
    CHECK(h.trained_model_count() + h.skipped.size() == 96);
    CHECK(h.concept_models[idx("CONTROLLER")].has_value());
    const auto skipped = std::find_if(h.skipped.begin(), h.skipped.end(),
                                      [](const SkipEntry& s) { return s.concept_id == "DATA SHARING.CONDITION"; });
    CHECK(skipped != h.skipped.end());

    const auto preds = predict_nodes(h, f.corpus, f.test, t);
    CHECK(preds.size() == f.test.size());
    for (const auto& [key, labels] : preds) {
      CHECK(closed_under_ancestors(labels));
      for (const auto& l : labels) CHECK(h.concept_models[t.index_of(l)].has_value());
    }
    const auto& doc = f.corpus.documents()[0];
    const auto per_doc = predict_document_lcn(h, doc.id, doc.document, t);
    CHECK(per_doc.size() == count_text_nodes(doc.document));
    CHECK_THROWS_AS(predict_document_lcpn(h, doc.id, doc.document, t), ArgumentError);

    CHECK_THROWS_AS(train_lcn(f.corpus, std::vector<std::size_t>{}, cfg, r, t, small_lcn(), 4), ArgumentError);
    CHECK_THROWS_AS(train_lcn(f.corpus, f.train, FeatureConfig::for_type(7), r, t, small_lcn(), 4), ArgumentError);
  }

  TEST_CASE("lcn predictions close under ancestors") {
    const auto& t = shipped_taxonomy();
    Matrix x(4, 2);
    const std::vector<int> all_positive(4, 1);
    HierarchyClassifier h;
    h.concept_models.resize(t.size());
    h.concept_models[idx("DATA SHARING.CONDITION")] =
        DecisionForest::train(x, all_positive, 2, ForestParams::random_forest(1), 1);
    const std::vector<double> features{0.0, 0.0};
    CHECK(h.predict_row(features, t) == std::vector<std::size_t>{idx("DATA SHARING"), idx("DATA SHARING.CONDITION")});
    HierarchyClassifier none;
    none.concept_models.resize(t.size());
    CHECK(none.predict_row(features, t).empty());
  }

  TEST_CASE("lcpn cascade") {
    const auto& t = shipped_taxonomy();
    HierarchyClassifier h;
    h.architecture = Architecture::kLcpn;
    ParentModel root;
    root.parent = Taxonomy::npos;
    root.outputs.assign(t.root_indices().begin(), t.root_indices().end());
    root.network = dummy_network(root.outputs.size());
    h.parent_models.push_back(root);
    ParentModel sharing;
    sharing.parent = idx("DATA SHARING");
    sharing.outputs.assign(t.child_indices(sharing.parent).begin(), t.child_indices(sharing.parent).end());
    sharing.inherited_child = idx("DATA SHARING.CONDITION");
    h.parent_models.push_back(sharing);
    ParentModel lawful;
    lawful.parent = idx("LAWFUL BASIS");
    lawful.outputs.assign(t.child_indices(lawful.parent).begin(), t.child_indices(lawful.parent).end());
    lawful.network = dummy_network(lawful.outputs.size());
    h.parent_models.push_back(lawful);

    auto root_scores = [&](const std::vector<std::string>& on) {
      std::vector<double> s(root.outputs.size(), 0.0);
      for (std::size_t k = 0; k < s.size(); ++k) {
        for (const auto& id : on) s[k] = std::max(s[k], root.outputs[k] == idx(id) ? 1.0 : 0.0);
      }
      return s;
    };
    const std::vector<double> lawful_all(lawful.outputs.size(), 1.0);

    // Gate: a negative root output suppresses the whole subtree.
    CHECK(lcpn_cascade(h, {root_scores({}), {}, lawful_all}, t).empty());
    // Single eligible child inherits the parent's prediction.
    CHECK(lcpn_cascade(h, {root_scores({"DATA SHARING"}), {}, lawful_all}, t) ==
          std::vector<std::size_t>{idx("DATA SHARING"), idx("DATA SHARING.CONDITION")});
    // Root positive without a child model emits only the level-1 label.
    CHECK(lcpn_cascade(h, {root_scores({"CONTROLLER"}), {}, lawful_all}, t) == std::vector<std::size_t>{idx("CONTROLLER")});
    const auto lb = lcpn_cascade(h, {root_scores({"LAWFUL BASIS"}), {}, lawful_all}, t);
    CHECK(lb.size() == 1 + lawful.outputs.size());
  }

  TEST_CASE("lcpn training") {
    const auto& t = shipped_taxonomy();
    const auto f = leakage_fixture();
    const auto cfg = FeatureConfig::for_type(7);
    const auto r = fit_feature_resources(cfg, f.corpus, f.train, nullptr, nullptr);
    const auto h = train_lcpn(f.corpus, f.train, cfg, r, t, small_lcpn(), 2);
    REQUIRE(!h.parent_models.empty());
    CHECK(h.parent_models[0].outputs.size() == 19);
    CHECK(h.parent_models[0].network.has_value());
    CHECK(h.parent_models[0].network->output_count() == 19);
    const auto preds = predict_nodes(h, f.corpus, f.test, t);
    for (const auto& [key, labels] : preds) CHECK(closed_under_ancestors(labels));
    const auto again = train_lcpn(f.corpus, f.train, cfg, r, t, small_lcpn(), 2);
    CHECK(predict_nodes(again, f.corpus, f.test, t) == preds);
    CHECK_THROWS_AS(train_lcpn(f.corpus, f.train, FeatureConfig::for_type(1), r, t, small_lcpn(), 2), ArgumentError);
  }

  TEST_CASE("model bundles") {
    const auto& t = shipped_taxonomy();
    const auto f = leakage_fixture();
    TempDir dir;
    for (int type : {3, 9}) {
      CAPTURE(type);
      const auto cfg = FeatureConfig::for_type(type);
      const auto kt = std::make_shared<const KeywordTable>(KeywordTable::load(default_keyword_path(), t));
      const auto r = fit_feature_resources(cfg, f.corpus, f.train, kt, nullptr);
      const auto h = cfg.architecture == Architecture::kLcn ? train_lcn(f.corpus, f.train, cfg, r, t, small_lcn(), 6)
                                                            : train_lcpn(f.corpus, f.train, cfg, r, t, small_lcpn(), 6);
      const auto a = dir / ("a" + std::to_string(type));
      const auto b = dir / ("b" + std::to_string(type));
      h.save(a, t);
      CHECK(std::filesystem::exists(a / "manifest"));
      const auto loaded = HierarchyClassifier::load(a, t);
      CHECK(loaded.architecture == h.architecture);
      CHECK(loaded.config.type_id == type);
      CHECK(loaded.skipped.size() == h.skipped.size());
      CHECK(predict_nodes(loaded, f.corpus, f.test, t) == predict_nodes(h, f.corpus, f.test, t));
      loaded.save(b, t);
      CHECK(dir_contents(a) == dir_contents(b));
      const std::string magic = type <= 6 ? kLcnModelMagic : kLcpnModelMagic;
      CHECK(dir_contents(a).find(magic) != std::string::npos);
      // Same seed, same files.
      const auto h2 = cfg.architecture == Architecture::kLcn ? train_lcn(f.corpus, f.train, cfg, r, t, small_lcn(), 6)
                                                             : train_lcpn(f.corpus, f.train, cfg, r, t, small_lcpn(), 6);
      const auto c = dir / ("c" + std::to_string(type));
      h2.save(c, t);
      CHECK(dir_contents(a) == dir_contents(c));
    }
    CHECK_THROWS_AS(HierarchyClassifier::load(dir / "missing", t), Error);
  }
}
