// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ppkit/corpus.hpp"
#include "ppkit/error.hpp"
#include "test_support.hpp"

using namespace ppkit;
using namespace ppkit::testing;

namespace {

CorpusDocument doc(std::string id, std::vector<std::vector<std::string>> labels_per_paragraph) {
  CorpusDocument d;
  d.id = std::move(id);
  for (auto& labels : labels_per_paragraph) {
    TextElement e;
    e.text = "text of " + d.id;
    e.labels = std::move(labels);
    d.document.children.push_back(ContentNode::paragraph(std::move(e)));
  }
  assign_node_ids(d.document);
  return d;
}

Corpus flat_corpus(std::size_t docs, std::size_t nodes_per_doc) {
  std::vector<CorpusDocument> v;
  for (std::size_t i = 0; i < docs; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "p%03zu", i);
    v.push_back(doc(id, std::vector<std::vector<std::string>>(nodes_per_doc)));
  }
  return Corpus::from_documents(std::move(v), shipped_taxonomy());
}

std::vector<bool> judgments(std::size_t yy, std::size_t yn, std::size_t ny, std::size_t nn, bool first) {
  std::vector<bool> v;
  for (std::size_t i = 0; i < yy; ++i) v.push_back(true);
  for (std::size_t i = 0; i < yn; ++i) v.push_back(first);
  for (std::size_t i = 0; i < ny; ++i) v.push_back(!first);
  for (std::size_t i = 0; i < nn; ++i) v.push_back(false);
  return v;
}

double kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  auto x = std::make_unique<bool[]>(a.size());
  auto y = std::make_unique<bool[]>(b.size());
  std::copy(a.begin(), a.end(), x.get());
  std::copy(b.begin(), b.end(), y.get());
  return cohens_kappa({x.get(), a.size()}, {y.get(), b.size()});
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("flattened nodes carry context") {
    const auto& t = shipped_taxonomy();
    CorpusDocument d;
    d.id = "a";
    TextElement title, p1, p2;
    title.text = "Sharing";
    p1.text = "first";
    p1.lists = {ListNode{{ItemNode{"item one", {}}}}};
    p2.text = "second";
    p2.labels = {"DATA SHARING", "CONTROLLER", "DATA SHARING"};
    d.document.children.push_back(ContentNode::paragraph(p1));
    d.document.children.push_back(
        ContentNode::segment(1, title, {ContentNode::paragraph(p1), ContentNode::paragraph(p2)}));
    assign_node_ids(d.document);
    const auto c = Corpus::from_documents({d}, t);
    REQUIRE(c.nodes().size() == 4);
    const auto& lead = c.nodes()[0];
    CHECK(lead.key() == "a/n0001");
    CHECK(lead.text == "first item one");
    CHECK(!lead.parent_title_id);
    CHECK(!lead.preceding_sibling_id);
    CHECK(c.nodes()[1].is_title);
    const auto& last = c.nodes()[3];
    CHECK(last.parent_title_id == "n0002");
    CHECK(last.parent_title_text == "Sharing");
    CHECK(last.preceding_sibling_id == "n0003");
    CHECK(last.labels == std::vector<std::string>{"CONTROLLER", "DATA SHARING"});
    CHECK(c.node_index("a/n0004") == 3);
    CHECK_THROWS_AS(c.node_index("a/n9999"), ArgumentError);
    const auto s = c.summary();
    CHECK(s.documents == 1);
    CHECK(s.titles == 1);
    CHECK(s.paragraphs == 3);
    CHECK(s.labeled_nodes == 1);
  }

  TEST_CASE("corpus validation") {
    const auto& t = shipped_taxonomy();
    CHECK_THROWS_AS(Corpus::from_documents({doc("a", {{}}), doc("a", {{}})}, t), FormatError);
    CHECK_THROWS_AS(Corpus::from_documents({doc("a/b", {{}})}, t), FormatError);
    CHECK_THROWS_AS(Corpus::from_documents({doc("", {{}})}, t), FormatError);
    try {
      Corpus::from_documents({doc("bad", {{"NOT A CONCEPT"}})}, t);
      FAIL("expected an error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("bad") != std::string::npos);
      CHECK(std::string(e.what()).find("NOT A CONCEPT") != std::string::npos);
    }
  }

  TEST_CASE("load_corpus") {
    const auto& t = shipped_taxonomy();
    TempDir dir;
    CHECK_THROWS_WITH_AS(load_corpus(dir.path(), t), doctest::Contains("no documents"), FormatError);
    CHECK_THROWS_AS(load_corpus(dir / "missing", t), Error);

    Rng rng(5);
    const auto c = random_corpus(rng, 6, t);
    write_corpus(c, dir.path());
    write_text(dir / "notes.txt", "ignored");
    const auto back = load_corpus(dir.path(), t, 3);
    REQUIRE(back.documents().size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(back.documents()[i].document == c.documents()[i].document);

    write_text(dir / "zz.ppxml",
               "<policy><paragraph id=\"n0001\" labels=\"MADE UP\">x</paragraph></policy>");
    try {
      load_corpus(dir.path(), t);
      FAIL("expected an error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("zz.ppxml") != std::string::npos);
      CHECK(std::string(e.what()).find("MADE UP") != std::string::npos);
    }
  }

  TEST_CASE("document split") {
    const auto c = flat_corpus(150, 2);
    const auto s = split_document_level(c, 30, 1);
    CHECK(s.mode == SplitMode::kDocument);
    CHECK(s.train_ids.size() == 120);
    CHECK(s.test_ids.size() == 30);
    const auto again = split_document_level(c, 30, 1);
    CHECK(again.train_ids == s.train_ids);
    CHECK(again.test_ids == s.test_ids);
    CHECK(split_document_level(c, 30, 2).test_ids != s.test_ids);
    CHECK_THROWS_AS(split_document_level(c, 150, 1), ArgumentError);
    CHECK_THROWS_AS(split_document_level(c, 0, 1), ArgumentError);
    const auto r = resolve_split(c, s);
    CHECK(r.train.size() == 240);
    CHECK(r.test.size() == 60);
  }

  TEST_CASE("segment split") {
    const auto c = flat_corpus(20, 5);
    const auto s = split_segment_level(c, 0.2, 3);
    CHECK(s.mode == SplitMode::kSegment);
    CHECK(s.test_ids.size() == 20);
    CHECK(s.train_ids.size() == 80);
    CHECK_THROWS_AS(split_segment_level(c, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(split_segment_level(c, 1.0, 1), ArgumentError);

    // A two-node document ends up straddling the split for some seed.
    const auto tiny = flat_corpus(1, 2);
    bool straddled = false;
    for (std::uint64_t seed = 0; seed < 64 && !straddled; ++seed) {
      const auto ts = split_segment_level(tiny, 0.5, seed);
      straddled = ts.train_ids.size() == 1 && ts.test_ids.size() == 1;
    }
    CHECK(straddled);
  }

  TEST_CASE("split files") {
    const auto c = flat_corpus(10, 3);
    for (const auto& s : {split_document_level(c, 3, 9), split_segment_level(c, 0.3, 9)}) {
      const auto text = serialize_split(s);
      CHECK(text.rfind("#mode=", 0) == 0);
      const auto back = parse_split(text);
      CHECK(back.mode == s.mode);
      CHECK(back.seed == s.seed);
      CHECK(back.train_ids == s.train_ids);
      CHECK(back.test_ids == s.test_ids);
    }
    CHECK_THROWS_AS(parse_split("train\tp000\n"), FormatError);
    CHECK_THROWS_AS(parse_split("#mode=document\nvalidate\tp000\n"), FormatError);
    CHECK_THROWS_AS(parse_split("#mode=sideways\n"), Error);
    SplitSpec both{SplitMode::kDocument, 1, {"p000"}, {"p000"}};
    CHECK_THROWS_AS(resolve_split(c, both), ArgumentError);
  }

  TEST_CASE("cohens kappa") {
    const std::vector<bool> same{true, false, true, true};
    CHECK(kappa(same, same) == 1.0);
    CHECK(kappa(judgments(20, 5, 10, 15, true), judgments(20, 5, 10, 15, false)) == doctest::Approx(0.4));
    CHECK(kappa({true, true}, {true, true}) == 1.0);
    Rng rng(1);
    std::vector<bool> random(1000), constant(1000, true);
    for (std::size_t i = 0; i < random.size(); ++i) random[i] = rng.bernoulli(0.5);
    CHECK(std::abs(kappa(random, constant)) < 0.1);
    CHECK_THROWS_AS(kappa({true}, {true, false}), ArgumentError);
    CHECK_THROWS_AS(kappa({}, {}), ArgumentError);
  }

  TEST_CASE("annotation agreement") {
    const auto& t = shipped_taxonomy();
    const auto a = Corpus::from_documents({doc("x", {{"CONTROLLER"}, {}, {"DATA SHARING"}, {}})}, t);
    const auto b = Corpus::from_documents({doc("x", {{"CONTROLLER"}, {}, {}, {"DATA SHARING"}})}, t);
    const auto r = annotation_agreement(a, b);
    REQUIRE(r.per_document.size() == 1);
    // CONTROLLER agrees perfectly (1); DATA SHARING: po = 0.5, pe = 0.625.
    const double ds = (0.5 - 0.625) / (1 - 0.625);
    CHECK(r.mean == doctest::Approx((1.0 + ds) / 2));
    CHECK(!r.unit.empty());
    CHECK(annotation_agreement(a, a).mean == 1.0);
  }

  TEST_CASE("corpus statistics") {
    const auto& t = shipped_taxonomy();
    const auto empty = Corpus::from_documents({}, t);
    for (const auto& row : corpus_statistics(empty, t)) CHECK(row.coverage_fraction == 0.0);

    const auto two = Corpus::from_documents({doc("a", {{"DATA SHARING.CONDITION"}}), doc("b", {{}})}, t);
    const auto rows = corpus_statistics(two, t);
    CHECK(rows[t.index_of("DATA SHARING.CONDITION")].coverage_fraction == 0.5);
    CHECK(rows[t.index_of("DATA SHARING")].coverage_fraction == 0.5);
    CHECK(corpus_statistics(two, t, false)[t.index_of("DATA SHARING")].coverage_fraction == 0.0);
    const auto csv = coverage_csv(rows);
    CHECK(csv.rfind("concept_id,docs_covered,coverage_fraction\n", 0) == 0);
    CHECK(csv.find("DATA SHARING.CONDITION,1,0.500000") != std::string::npos);
  }
}
