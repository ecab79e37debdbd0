// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ppkit/corpus.hpp"
#include "ppkit/error.hpp"
#include "ppkit/features.hpp"
#include "test_support.hpp"

using namespace ppkit;
using namespace ppkit::testing;

namespace {

std::shared_ptr<const KeywordTable> shipped_keywords() {
  static const auto kt = std::make_shared<const KeywordTable>(KeywordTable::load(default_keyword_path(), shipped_taxonomy()));
  return kt;
}

// Two documents: a leading paragraph, then a titled segment with two
// paragraphs.
Corpus context_corpus() {
  std::vector<CorpusDocument> docs;
  for (const std::string id : {"alpha", "beta"}) {
    CorpusDocument d;
    d.id = id;
    TextElement lead, title, p1, p2;
    lead.text = "welcome to the " + id + " privacy notice";
    title.text = id == std::string("alpha") ? "Sharing with partners" : "Sharing with vendors";
    p1.text = "we share data with partners when required";
    p2.text = "partners process data for marketing purposes";
    d.document.children.push_back(ContentNode::paragraph(lead));
    d.document.children.push_back(
        ContentNode::segment(1, title, {ContentNode::paragraph(p1), ContentNode::paragraph(p2)}));
    assign_node_ids(d.document);
    docs.push_back(std::move(d));
  }
  return Corpus::from_documents(std::move(docs), shipped_taxonomy());
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<std::size_t> all_nodes(const Corpus& c) {
  std::vector<std::size_t> v(c.nodes().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

EmbeddingStore store_for(const Corpus& c, std::size_t dim) {
  EmbeddingStore s;
  for (std::size_t i = 0; i < c.nodes().size(); ++i) s.insert(c.nodes()[i].key(), std::vector<double>(dim, 1.0 + static_cast<double>(i)));
  return s;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("tf-idf vocabulary") {
    const std::vector<std::string> texts{"data privacy", "data use"};
    const auto v = fit_tfidf(texts, 2);
    REQUIRE(v.dimension() == 2);
    CHECK(v.terms()[0] == Vocabulary::Term{"data", 2});
    CHECK(v.terms()[1] == Vocabulary::Term{"privacy", 1});
    CHECK(v.document_count() == 2);
    CHECK(v.index_of("use") == Vocabulary::npos);

    CHECK_THROWS_WITH_AS(fit_tfidf(std::vector<std::string>{""}, 5), "empty corpus vocabulary", ArgumentError);
    CHECK_THROWS_AS(fit_tfidf(texts, 0), ArgumentError);
    Diagnostics diag;
    const auto small = fit_tfidf(texts, 10, &diag);
    CHECK(small.dimension() == 3);
    CHECK(diag.warnings.size() == 1);
    // Single-character tokens are dropped.
    CHECK(fit_tfidf(std::vector<std::string>{"a b cc"}, 5).dimension() == 1);
  }

  TEST_CASE("tf-idf transform") {
    const std::vector<std::string> texts{"data privacy", "data use"};
    const auto v = fit_tfidf(texts, 2);
    const auto x = transform_tfidf(v, "privacy privacy");
    // Raw weights: privacy 2*ln(2/1), data 0 * ln(2/2); normalized oracle.
    const double raw_privacy = 2 * std::log(2.0);
    CHECK(x[v.index_of("privacy")] == doctest::Approx(raw_privacy / std::sqrt(raw_privacy * raw_privacy)));
    CHECK(x[v.index_of("data")] == 0.0);
    CHECK(norm(transform_tfidf(v, "")) == 0.0);
    CHECK(norm(transform_tfidf(v, "unknown words only")) == 0.0);
    CHECK(norm(transform_tfidf(v, "Data, PRIVACY!")) == doctest::Approx(1.0));

    std::stringstream ss;
    v.write(ss);
    CHECK(Vocabulary::read(ss) == v);
  }

  TEST_CASE("keyword vectors") {
    const auto& t = shipped_taxonomy();
    const auto kt = shipped_keywords();
    CHECK(kt->size() == 96);
    const auto v = keyword_vector(*kt, "When Google shares your information");
    CHECK(v.size() == 96);
    CHECK(v[t.index_of("DATA SHARING.CONDITION")] == 1.0);
    CHECK(keyword_vector(*kt, "SHARE") == keyword_vector(*kt, "share"));
    CHECK(keyword_vector(*kt, "(share).") == keyword_vector(*kt, "share"));
    for (double x : keyword_vector(*kt, "")) CHECK(x == 0.0);
    // Whole tokens only.
    CHECK(keyword_vector(*kt, "sharer")[t.index_of("DATA SHARING")] == 0.0);
    CHECK(keyword_vector(*kt, "shared with service providers")[t.index_of("DATA SHARING.RECIPIENT")] == 1.0);

    CHECK_THROWS_AS(KeywordTable::parse("NOT A CONCEPT,x\n", t), FormatError);
    CHECK_THROWS_WITH_AS(KeywordTable::parse("CONTROLLER,controller\n", t), doctest::Contains("no keywords for"),
                         FormatError);
    const auto again = KeywordTable::parse(kt->to_csv(t), t);
    CHECK(again.vector_for("When Google shares your information") == v);
  }

  TEST_CASE("embedding store format") {
    std::string content = "#dim=768\n";
    for (const char* key : {"d1/n0001", "d1/n0002", "d2/n0001"}) {
      content += key;
      content += '\t';
      for (int i = 0; i < 768; ++i) content += (i ? " " : "") + std::to_string(i * 0.001);
      content += '\n';
    }
    const auto s = EmbeddingStore::parse(content);
    CHECK(s.size() == 3);
    CHECK(s.dimension() == 768);
    CHECK(s.lookup("d1/n0002")[2] == doctest::Approx(0.002));
    CHECK(s.lookup("d9/n0001") == std::vector<double>(768, 0.0));
    CHECK(s.missing_lookups() == 1);
    CHECK(EmbeddingStore::parse(s.serialize()).lookup("d2/n0001") == s.lookup("d2/n0001"));

    std::string short_record = "#dim=768\nd1/n0001\t";
    for (int i = 0; i < 767; ++i) short_record += (i ? " " : "") + std::string("0.5");
    CHECK_THROWS_WITH_AS(EmbeddingStore::parse(short_record), doctest::Contains("d1/n0001 has 767 values, expected 768"),
                         FormatError);
    CHECK_THROWS_WITH_AS(EmbeddingStore::parse("#dim=1\nd/n1\t1\nd/n1\t2\n"), doctest::Contains("duplicate embedding key"),
                         FormatError);
    CHECK_THROWS_AS(EmbeddingStore::parse("d/n1\t1\n"), FormatError);
    CHECK_THROWS_AS(EmbeddingStore::parse("#dim=1\nnoslash\t1\n"), FormatError);
    CHECK_THROWS_AS(EmbeddingStore::parse("#dim=1\nd/n1\tabc\n"), FormatError);
  }

  TEST_CASE("feature configurations") {
    const std::size_t expected_tfidf[] = {300, 700, 396, 796};
    for (int type = 1; type <= 12; ++type) {
      CAPTURE(type);
      const int row = type <= 6 ? type : type - 6;
      CHECK(FeatureConfig::needs_embeddings(type) == (row >= 5));
      const auto cfg = FeatureConfig::for_type(type, 768);
      CHECK(cfg.architecture == (type <= 6 ? Architecture::kLcn : Architecture::kLcpn));
      if (row <= 4) {
        CHECK(cfg.dimension() == expected_tfidf[row - 1]);
        CHECK(FeatureConfig::for_type(type).dimension() == cfg.dimension());
      } else {
        CHECK(cfg.dimension() == (row == 5 ? 768u : 3 * 768u));
        CHECK_THROWS_WITH_AS(FeatureConfig::for_type(type), ("embedding store required for type " + std::to_string(type)).c_str(),
                             ArgumentError);
      }
    }
    CHECK_THROWS_AS(FeatureConfig::for_type(0), ArgumentError);
    CHECK_THROWS_AS(FeatureConfig::for_type(13), ArgumentError);
  }

  TEST_CASE("assembled vectors") {
    const auto c = context_corpus();
    const auto train = all_nodes(c);
    for (int type : {1, 2, 3, 4}) {
      CAPTURE(type);
      const auto cfg = FeatureConfig::for_type(type);
      const auto r = fit_feature_resources(cfg, c, train, shipped_keywords(), nullptr);
      for (const auto& n : c.nodes()) CHECK(assemble_features(cfg, n, r).size() == cfg.dimension());
      const auto m = assemble_matrix(cfg, c, train, r);
      CHECK(m.rows() == c.nodes().size());
      CHECK(m.cols() == cfg.dimension());
    }
    // Document-leading paragraph: parent and sibling blocks are zero.
    const auto cfg2 = FeatureConfig::for_type(2);
    const auto r2 = fit_feature_resources(cfg2, c, train, nullptr, nullptr);
    const auto lead = assemble_features(cfg2, c.nodes()[0], r2);
    REQUIRE(lead.size() == 700);
    for (std::size_t i = 300; i < 700; ++i) CHECK(lead[i] == 0.0);
    // Second paragraph of the segment sees its title and sibling.
    const auto inner = assemble_features(cfg2, c.nodes()[3], r2);
    double parent = 0, sibling = 0;
    for (std::size_t i = 300; i < 400; ++i) parent += inner[i] * inner[i];
    for (std::size_t i = 400; i < 700; ++i) sibling += inner[i] * inner[i];
    CHECK(parent == doctest::Approx(1.0));
    CHECK(sibling == doctest::Approx(1.0));
  }

  TEST_CASE("embedding features") {
    const auto c = context_corpus();
    const auto train = all_nodes(c);
    const auto store = std::make_shared<const EmbeddingStore>(store_for(c, 4));
    const auto cfg6 = FeatureConfig::for_type(6, 4);
    const auto r = fit_feature_resources(cfg6, c, train, nullptr, store);
    const auto v = assemble_features(cfg6, c.nodes()[3], r);
    REQUIRE(v.size() == 12);
    CHECK(v[0] == 4.0);  // node 3
    CHECK(v[4] == 2.0);  // parent title, node 1
    CHECK(v[8] == 3.0);  // preceding sibling, node 2
    const auto lead = assemble_features(cfg6, c.nodes()[0], r);
    for (std::size_t i = 4; i < 12; ++i) CHECK(lead[i] == 0.0);

    FeatureResources none;
    CHECK_THROWS_WITH_AS(assemble_features(FeatureConfig::for_type(5, 4), c.nodes()[0], none),
                         "embedding store required for type 5", ArgumentError);
    CHECK_THROWS_AS(assemble_features(FeatureConfig::for_type(5, 8), c.nodes()[0], r), ArgumentError);
    CHECK_THROWS_AS(assemble_features(FeatureConfig::for_type(3), c.nodes()[0], FeatureResources{}), ArgumentError);
  }
}
