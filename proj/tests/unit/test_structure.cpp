// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ppkit/block_classifier.hpp"
#include "ppkit/block_features.hpp"
#include "ppkit/css_style.hpp"
#include "ppkit/dom.hpp"
#include "ppkit/leading_label.hpp"
#include "ppkit/ppxml.hpp"
#include "ppkit/structure_builder.hpp"
#include "ppkit/synthetic.hpp"
#include "ppkit/text.hpp"
#include "test_support.hpp"

using namespace ppkit;

namespace {

using Lol = std::array<int, 12>;

Lol lol(std::string_view s) { return parse_leading_ordinal_label(s).values; }

// Element chain from the document root to the first element with tag
// `target`; `policy_id` marks the policy element.
struct Located {
  DomNode doc;
  std::vector<const DomNode*> path;
  std::size_t policy_index = 0;
};

Located locate(const std::string& html, const std::string& target) {
  Located l{parse_html(html), {}, 0};
  std::vector<const DomNode*> stack;
  std::function<bool(const DomNode&)> dfs = [&](const DomNode& n) {
    stack.push_back(&n);
    if (n.tag == target) return true;
    for (const auto& c : n.children) {
      if (c.is_element() && dfs(c)) return true;
    }
    stack.pop_back();
    return false;
  };
  REQUIRE(dfs(l.doc));
  l.path = stack;
  for (std::size_t i = 0; i < l.path.size(); ++i) {
    if (l.path[i]->attr("id") == "pp") l.policy_index = i;
  }
  return l;
}

BlockFeatures features_of(const std::string& html, const std::string& target) {
  auto l = locate(html, target);
  const auto sheet = StyleSheet::from_document(l.doc);
  BlockContext ctx{l.path, l.policy_index, &sheet, false};
  return extract_block_features(ctx);
}

ClassifiedBlock cb(std::string text, BlockClass c) { return {std::move(text), c, {}}; }

}  // namespace

TEST_SUITE("structure") {
  TEST_CASE("leading ordinal labels") {
    CHECK(lol("3.a.i Something") == Lol{1, 3, 1, 2, 1, 1, 4, 1, 0, 0, 0, 0});
    CHECK(lol("3. Data we collect") == Lol{1, 3, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(lol("Plain heading") == Lol{});
    CHECK(lol("ii) Your rights") == Lol{4, 2, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    // Lowercase letters are format 2 and take their alphabet position.
    CHECK(lol("b) Sharing") == Lol{2, 2, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(lol("C: Contact") == Lol{3, 3, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    // Roman wins the tie for a bare i/v/x.
    CHECK(lol("v. Retention")[0] == static_cast<int>(LabelFormat::kRoman));
    CHECK(lol("A company") == Lol{});
    CHECK(lol("") == Lol{});
  }

  TEST_CASE("descriptor invariants") {
    for (const char* s : {"1.2.3.4 deep", "iv) x", "(b) y", "12: z", "1.1 a", "x", "2.b"}) {
      CAPTURE(s);
      const auto d = parse_leading_ordinal_label(s);
      bool trailing_zero = false;
      for (std::size_t l = 0; l < 4; ++l) {
        CHECK(d.label_format(l) >= 0);
        CHECK(d.label_format(l) <= 5);
        CHECK((d.label_value(l) == 0) == (d.label_format(l) == 0));
        if (d.label_format(l) == 0) trailing_zero = true;
        if (trailing_zero) CHECK(d.separator_format(l) == 0);
      }
    }
  }

  TEST_CASE("block features") {
    const auto h2 = features_of(
        "<html><body><div id=\"pp\"><div><div><h2>2. Data we collect</h2></div></div></div></body></html>", "h2");
    CHECK(h2.tag_code == TagCode::kH2);
    CHECK(h2.lol.values == Lol{1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(h2.text_length == 18);
    CHECK(h2.dom_depth == 3);
    CHECK(h2.font_weight == 700);
    CHECK(h2.font_size > 16.0);

    const auto p = features_of("<html><body><div id=\"pp\"><p></p></div></body></html>", "p");
    CHECK(p.text_length == 0);
    CHECK(p.lol.empty());
    CHECK(p.tag_code == TagCode::kP);

    const auto bold =
        features_of("<html><body><div id=\"pp\"><section style=\"font-weight:bold\">B</section></div></body></html>", "section");
    CHECK(bold.font_weight == 700);

    const auto styled = features_of(
        "<html><head><style>.t { font-size: 24px; font-style: italic }</style></head>"
        "<body><div id=\"pp\"><p class=\"t\">x</p></div></body></html>",
        "p");
    CHECK(styled.font_size == 24.0);
    CHECK(styled.is_italic == 1);
    CHECK(BlockFeatures::kDimension == 20);
    CHECK(BlockFeatures::from_vector(styled.to_vector()) == styled);
  }

  TEST_CASE("block classifier errors and edge cases") {
    std::vector<BlockSample> one_class(10);
    CHECK_THROWS_WITH_AS(train_block_classifier(one_class, 1), "single class", ArgumentError);
    CHECK_THROWS_WITH_AS(train_block_classifier(std::vector<BlockSample>{}, 1), "empty sample list", ArgumentError);
    const auto samples = make_separable_blocks(40, 3);
    const auto model = train_block_classifier(samples, 7, ForestParams::extra_trees(50));
    CHECK(classify_blocks(model, std::vector<BlockFeatures>{}).empty());
    CHECK_THROWS_AS(model.classify(std::vector<double>(19, 0.0)), ArgumentError);
  }

  TEST_CASE("block classifier on separable data") {
    const auto samples = make_separable_blocks(60, 11);
    CHECK(holdout_block_f1(samples, 0.2, 5) >= 0.95);
    const auto model = train_block_classifier(samples, 5);
    // Memorization of a training exemplar.
    for (std::size_t i = 0; i < samples.size(); i += 37) CHECK(model.classify(samples[i].features) == samples[i].label);
    BlockFeatures f;
    f.text_length = 20;
    f.font_size = 28;
    f.font_weight = 700;
    f.tag_code = TagCode::kH1;
    f.dom_depth = 2;
    f.lol.values = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    CHECK(model.classify(f) == BlockClass::kTitleL1);
    // Pure function of (model, features).
    std::vector<BlockFeatures> all;
    for (const auto& s : samples) all.push_back(s.features);
    CHECK(classify_blocks(model, all) == classify_blocks(model, all));

    std::stringstream ss;
    model.write(ss);
    CHECK(ss.str().rfind("PPSB1\n", 0) == 0);
    const auto back = BlockClassifierModel::read(ss);
    CHECK(back.forest() == model.forest());
    std::stringstream bad("PPSB2\n");
    CHECK_THROWS_AS(BlockClassifierModel::read(bad), FormatError);
  }

  TEST_CASE("block sample csv") {
    const auto samples = make_separable_blocks(3, 1);
    const std::vector<std::string> texts(samples.size(), "a, \"quoted\" block");
    const auto back = parse_block_samples_csv(block_samples_csv(samples, texts));
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].label == samples[i].label);
      CHECK(back[i].features == samples[i].features);
    }
    CHECK_THROWS_AS(parse_block_samples_csv("class,f0\ntitle1,1\n"), FormatError);
    CHECK_THROWS_AS(parse_block_samples_csv("heading" + std::string(20, ',') + "\n"), Error);
  }

  TEST_CASE("build_segment_tree") {
    using C = BlockClass;
    const std::vector<ClassifiedBlock> blocks{cb("T1", C::kTitleL1), cb("P1", C::kParagraph), cb("t2", C::kTitleL2),
                                              cb("P2", C::kParagraph), cb("T1b", C::kTitleL1), cb("P3", C::kParagraph)};
    const auto doc = build_segment_tree(blocks);
    REQUIRE(doc.children.size() == 2);
    const auto& s1 = doc.children[0];
    CHECK(s1.is_segment());
    CHECK(s1.level == 1);
    CHECK(s1.element.text == "T1");
    REQUIRE(s1.children.size() == 2);
    CHECK(s1.children[0].element.text == "P1");
    CHECK(s1.children[1].level == 2);
    CHECK(s1.children[1].element.text == "t2");
    REQUIRE(s1.children[1].children.size() == 1);
    CHECK(s1.children[1].children[0].element.text == "P2");
    CHECK(doc.children[1].element.text == "T1b");
    CHECK(doc.children[1].children.size() == 1);

    const auto flat = build_segment_tree(std::vector<ClassifiedBlock>{cb("a", C::kParagraph), cb("b", C::kParagraph)});
    CHECK(flat.children.size() == 2);
    CHECK(!flat.children[0].is_segment());
    CHECK(build_segment_tree(std::vector<ClassifiedBlock>{}).children.empty());

    const auto deep = build_segment_tree(std::vector<ClassifiedBlock>{cb("t", C::kTitleL2), cb("p", C::kParagraph)});
    REQUIRE(deep.children.size() == 1);
    CHECK(deep.children[0].level == 2);

    const auto skip = build_segment_tree(std::vector<ClassifiedBlock>{cb("a", C::kTitleL1), cb("c", C::kTitleL3)});
    REQUIRE(skip.children.size() == 1);
    REQUIRE(skip.children[0].children.size() == 1);
    CHECK(skip.children[0].children[0].level == 3);
    CHECK(skip.children[0].children[0].element.id == "n0002");
  }

  TEST_CASE("block order is preserved") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ClassifiedBlock> blocks;
      const std::size_t n = rng.uniform_index(30);
      for (std::size_t i = 0; i < n; ++i) {
        blocks.push_back(cb("b" + std::to_string(i), static_cast<BlockClass>(rng.uniform_index(kBlockClassCount))));
      }
      const auto doc = build_segment_tree(blocks);
      CHECK_NOTHROW(check_schema(doc));
      std::vector<std::string> seen;
      for_each_text(doc, [&](const TextVisit& v) { seen.push_back(v.element->text); });
      REQUIRE(seen.size() == n);
      for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == blocks[i].text);
    }
  }

  TEST_CASE("ppxml") {
    PolicyDocument d;
    d.source = "https://example.com/p";
    ListNode inner{{{"deep", {}}}};
    ItemNode item{"outer", {inner}};
    TextElement para;
    para.text = "We share <data> & more";
    para.labels = {"DATA SHARING"};
    para.lists = {ListNode{{item}}};
    TextElement title;
    title.text = "1. Sharing";
    d.children.push_back(ContentNode::segment(1, title, {ContentNode::paragraph(para)}));
    assign_node_ids(d);
    const auto xml = serialize_ppxml(d);
    CHECK(xml.find("id=\"n0001\"") != std::string::npos);
    CHECK(xml.find("labels=\"DATA SHARING\"") != std::string::npos);
    const auto back = parse_ppxml(xml);
    CHECK(back == d);
    CHECK(back.children[0].children[0].element.lists[0].items[0].lists[0].items[0].text == "deep");

    CHECK_THROWS_AS(parse_ppxml("<policy><segment level=\"1\"><paragraph id=\"n0001\">x</paragraph></segment></policy>"),
                    FormatError);
    try {
      parse_ppxml("<policy><segment level=\"1\"><paragraph id=\"n0042\">x</paragraph></segment></policy>");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("segment without title") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ppxml("<policy><paragraph id=\"n0001\">x</policy>"), FormatError);
    CHECK_THROWS_AS(parse_ppxml("<doc/>"), FormatError);
    CHECK_THROWS_AS(parse_ppxml("<policy><paragraph id=\"n0001\"><list></list></paragraph></policy>"), FormatError);
    CHECK_THROWS_AS(parse_ppxml("<policy><segment level=\"5\"><title id=\"n0001\">x</title></segment></policy>"),
                    FormatError);
  }

  TEST_CASE("validation report") {
    using C = BlockClass;
    std::vector<ClassifiedBlock> many;
    for (int i = 0; i < 60; ++i) many.push_back(cb("T", C::kTitleL1));
    const auto r = validate_structure(build_segment_tree(many));
    CHECK(r.ok());
    CHECK(r.to_text().find("60 sibling segments") != std::string::npos);
    CHECK(r.to_text().find("segment without content") != std::string::npos);
    const auto jump = validate_structure(build_segment_tree(std::vector<ClassifiedBlock>{
        cb("a", C::kTitleL1), cb("c", C::kTitleL3), cb("p", C::kParagraph)}));
    CHECK(jump.to_text().find("level jump") != std::string::npos);
    CHECK(validate_structure(PolicyDocument{}).warnings.size() == 1);
  }

  TEST_CASE("convert_html end to end") {
    const std::string html = R"(<html><head><style>.lead { font-weight: bold }</style></head><body>
      <nav><a href="/">Home</a></nav>
      <div class="brand">Acme</div>
      <div id="main">
        <h1>Privacy Policy</h1>
        <p>This policy explains how we handle your personal data when you use the service.</p>
        <h2>1. Data we collect</h2>
        <p>We collect your name, email address and usage data to provide the service to you.</p>
        <ul><li>Account data</li><li>Usage data<ul><li>Logs</li></ul></li></ul>
        <h2>2. Sharing</h2>
        <p>We share data with service providers under contract, and when required by law.</p>
        <p><b>Your rights</b></p>
        <p>You may request access, correction or deletion of your personal data at any time.</p>
      </div>
      <div class="contact">Contact us</div>
      <footer>Copyright</footer><img src="x.png">
    </body></html>)";
    const auto r = convert_html(html, "test.html", {}, nullptr);
    CHECK(r.cleaned_html.find("<footer") == std::string::npos);
    CHECK(r.cleaned_html.find("<img") == std::string::npos);
    CHECK(r.report.ok());
    CHECK(r.document.source == "test.html");
    std::vector<std::string> titles;
    for_each_text(r.document, [&](const TextVisit& v) {
      if (v.is_title) titles.push_back(v.element->text);
    });
    INFO(text::join(titles, " / "));
    CHECK(titles == std::vector<std::string>{"Privacy Policy", "1. Data we collect", "2. Sharing", "Your rights"});
    CHECK(r.blocks.size() == r.classes.size());
    const auto again = convert_html(html, "test.html", {}, nullptr);
    CHECK(serialize_ppxml(again.document) == serialize_ppxml(r.document));

    try {
      convert_html("<html><body><nav><a href=\"/privacy\">Privacy Policy</a></nav><img></body></html>", "x", {}, nullptr);
      FAIL("expected NoPolicyElementError");
    } catch (const NoPolicyElementError& e) {
      REQUIRE(e.candidate_links().size() == 1);
      CHECK(e.candidate_links()[0].href == "/privacy");
      CHECK(std::string(e.what()).find("/privacy") != std::string::npos);
    }
  }
}
