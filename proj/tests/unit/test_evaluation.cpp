// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "ppkit/error.hpp"
#include "ppkit/evaluation.hpp"
#include "ppkit/metrics.hpp"
#include "ppkit/random.hpp"
#include "test_support.hpp"

using namespace ppkit;
using namespace ppkit::testing;

namespace {

std::vector<std::size_t> all_nodes(const Corpus& c) {
  std::vector<std::size_t> v(c.nodes().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

Predictions gold_predictions(const Corpus& c) {
  Predictions p;
  for (const auto& n : c.nodes()) p[n.key()] = n.labels;
  return p;
}

MetricsReport fake_report(int type, SplitMode mode, std::vector<std::pair<std::string, double>> f1) {
  MetricsReport r;
  r.type_id = type;
  r.mode = mode;
  for (const auto& [id, score] : f1) {
    ConceptResult c;
    c.concept_id = id;
    c.level = static_cast<int>(std::count(id.begin(), id.end(), '.')) + 1;
    c.scores.f1 = score;
    c.support = 10;
    c.evaluated = true;
    r.concepts.push_back(c);
  }
  return r;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("precision, recall and F1") {
    const auto s = precision_recall_f1({51, 19, 7, 0});
    CHECK(s.precision == doctest::Approx(51.0 / 70.0));
    CHECK(s.recall == doctest::Approx(51.0 / 58.0));
    CHECK(s.f1 == doctest::Approx(0.797).epsilon(0.001));
    const auto perfect = precision_recall_f1({12, 0, 0, 3});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    const auto zero = precision_recall_f1({0, 3, 4, 0});
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);
    CHECK(precision_recall_f1({}).f1 == 0.0);
    CHECK(macro_average(std::vector<double>{}) == 0.0);
    CHECK(macro_average(std::vector<double>{0.2, 0.4}) == doctest::Approx(0.3));
  }

  TEST_CASE("perfect and empty predictors") {
    const auto& t = shipped_taxonomy();
    Rng rng(21);
    const auto c = random_corpus(rng, 12, t);
    const auto nodes = all_nodes(c);
    EvaluationOptions opts;
    opts.min_support = 1;
    const auto perfect = evaluate_run(gold_predictions(c), c, nodes, t, opts);
    REQUIRE(!perfect.evaluated_all().empty());
    for (const auto& r : perfect.concepts) {
      CHECK(r.counts.total() == nodes.size());
      if (r.evaluated) CHECK(r.scores.f1 == 1.0);
    }
    CHECK(perfect.macro_f1_all == 1.0);

    Predictions empty;
    for (const auto& n : c.nodes()) empty[n.key()] = {};
    const auto none = evaluate_run(empty, c, nodes, t, opts);
    for (const auto& r : none.concepts) CHECK(r.scores.f1 == 0.0);
    CHECK(none.macro_f1_all == 0.0);
  }

  TEST_CASE("support matches an independent count") {
    const auto& t = shipped_taxonomy();
    Rng rng(22);
    const auto c = random_corpus(rng, 15, t);
    const auto nodes = all_nodes(c);
    const auto r = evaluate_run(gold_predictions(c), c, nodes, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const std::string& id = t.node_at(k).id;
      std::size_t support = 0;
      for (const auto& n : c.nodes()) {
        bool hit = false;
        for (const auto& l : n.labels) hit = hit || l == id || l.rfind(id + ".", 0) == 0;
        support += hit;
      }
      CAPTURE(id);
      CHECK(r.concepts[k].support == support);
      CHECK(r.concepts[k].evaluated == (support >= 5));
    }
  }

  TEST_CASE("key mismatch") {
    const auto& t = shipped_taxonomy();
    Rng rng(23);
    const auto c = random_corpus(rng, 3, t);
    const auto nodes = all_nodes(c);
    auto p = gold_predictions(c);
    p.erase(p.begin());
    CHECK_THROWS_WITH_AS(evaluate_run(p, c, nodes, t), doctest::Contains("prediction/gold key mismatch"), ArgumentError);
    auto extra = gold_predictions(c);
    extra["zz/n0001"] = {};
    CHECK_THROWS_AS(evaluate_run(extra, c, nodes, t), ArgumentError);
  }

  TEST_CASE("report formats") {
    const auto& t = shipped_taxonomy();
    Rng rng(24);
    const auto c = random_corpus(rng, 5, t);
    auto r = evaluate_run(gold_predictions(c), c, all_nodes(c), t);
    r.type_id = 3;
    const auto csv = report_csv(std::vector<MetricsReport>{r});
    CHECK(csv.rfind("type_id,mode,concept_id,level,tp,fp,fn,tn,precision,recall,f1,support\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 97);
    CHECK(report_text(r).find("type 3, document-level split") != std::string::npos);
  }

  TEST_CASE("comparison tables") {
    using M = SplitMode;
    const std::vector<MetricsReport> reports{
        fake_report(1, M::kDocument, {{"CONTROLLER", 0.5}, {"DATA SHARING", 0.7}, {"DATA SHARING.CONDITION", 0.2}}),
        fake_report(2, M::kDocument, {{"CONTROLLER", 0.5}, {"DATA SHARING", 0.6}, {"DATA SHARING.CONDITION", 0.4}}),
    };
    const auto rows = build_comparison(reports);
    REQUIRE(rows.size() == 2);
    // Ties count for every tied type.
    CHECK(rows[0].best_level1 == 2);
    CHECK(rows[1].best_level1 == 1);
    CHECK(rows[0].total_level1 == 2);
    CHECK(rows[0].best_all == 2);
    CHECK(rows[1].best_all == 2);
    CHECK(rows[0].total_all == 3);

    const std::vector<MetricsReport> single{fake_report(4, M::kSegment, {{"CONTROLLER", 0.9}})};
    const auto one = build_comparison(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].best_level1 == 1);
    CHECK(comparison_csv(one).find("\n4,segment,0,") != std::string::npos);
    const auto table = comparison_table(one);
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);
    CHECK(comparison_table(build_comparison(reports)) == comparison_table(rows));
  }
}
