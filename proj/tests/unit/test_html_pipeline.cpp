// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "doctest.h"
#include "ppkit/dom.hpp"
#include "ppkit/error.hpp"
#include "ppkit/html_pipeline.hpp"

using namespace ppkit;

namespace {

DomNode body_of(const std::string& html) { return find_body(parse_html(html)); }

DomNode div_with_lengths(std::initializer_list<std::size_t> lengths) {
  std::string html = "<body><div>";
  for (std::size_t l : lengths) html += "<p>" + std::string(l, 'x') + "</p>";
  return find_body(parse_html(html + "</div></body>")).children.at(0);
}

}  // namespace

TEST_SUITE("html_pipeline") {
  TEST_CASE("parser basics") {
    const auto doc = parse_html("<html><body><p>a &amp; b<br>c<p>d</body></html>");
    const auto& body = find_body(doc);
    CHECK(body.tag == "body");
    REQUIRE(body.element_child_count() == 2);
    CHECK(visible_text(body.children[0]) == "a & b c");
    CHECK(visible_text(body.children[1]) == "d");
    CHECK(decode_entities("&lt;&#65;&#x42;&nbsp;") == "<AB ");
  }

  TEST_CASE("strip_irrelevant_elements") {
    CHECK(serialize_html(strip_irrelevant_elements(body_of("<body><img/><p>t</p></body>"))) ==
          serialize_html(body_of("<body><p>t</p></body>")));
    const auto plain = body_of("<body><p>t</p></body>");
    CHECK(strip_irrelevant_elements(plain) == plain);
    const auto nav = strip_irrelevant_elements(body_of("<body><nav><p>x</p></nav></body>"));
    CHECK(nav.children.empty());
    for (const char* tag : {"img", "picture", "video", "audio", "canvas", "map", "area", "figure", "figcaption",
                            "source", "track", "svg", "applet", "embed", "object", "param", "script", "noscript",
                            "iframe", "footer", "nav", "form", "input", "select", "textarea", "button"}) {
      CAPTURE(tag);
      CHECK(removal_type(tag) != 0);
    }
    CHECK(removal_type("p") == 0);
    CHECK(removal_type("div") == 0);
  }

  TEST_CASE("find_policy_links") {
    CHECK(find_policy_links(body_of("<body><a href=\"/p\">Privacy Policy</a></body>")) ==
          std::vector<PageLink>{{"Privacy Policy", "/p"}});
    CHECK(find_policy_links(body_of("<body><p>none</p></body>")).empty());
    const auto links = find_policy_links(
        body_of("<body><a href=\"/n\">Privacy Notice</a><a href=\"/x\">Home</a><a href=\"/t\">privacy TERMS</a></body>"));
    CHECK(links == std::vector<PageLink>{{"Privacy Notice", "/n"}, {"privacy TERMS", "/t"}});
    CHECK(find_links(body_of("<body><a href=\"/r\">Sign up</a></body>"), registration_link_keywords()).size() == 1);
  }

  TEST_CASE("text_length") {
    CHECK(text_length(body_of("<body><p>ab  cd</p></body>").children.at(0)) == 5);
    CHECK(text_length(body_of("<body><div></div></body>").children.at(0)) == 0);
    CHECK(text_length(body_of("<body><div><p>a</p><p>b</p></div></body>").children.at(0)) == 3);
    CHECK(text_length(body_of("<body><p>a<b>b</b>c</p></body>").children.at(0)) == 3);
  }

  TEST_CASE("children_similarity_score") {
    CHECK(children_similarity_score(div_with_lengths({100, 100, 100})) == 0.0);
    CHECK(children_similarity_score(div_with_lengths({10, 20})) == doctest::Approx(5.0));
    CHECK(children_similarity_score(div_with_lengths({10})) == 0.0);
    CHECK_THROWS_WITH_AS(children_similarity_score(DomNode::element("div")), "leaf node", ArgumentError);
  }

  TEST_CASE("extract_pp_element hand trace") {
    std::string inner;
    for (int i = 0; i < 10; ++i) inner += "<p>" + std::string(499, 'a') + "</p>";
    const std::string html = "<body><div id=\"a\">" + std::string(50, 'x') + "</div><div id=\"pp\">" + inner +
                             "</div><div id=\"c\">" + std::string(40, 'y') + "</div></body>";
    const auto body = body_of(html);
    const auto& pp = extract_pp_element(body);
    CHECK(pp.attr("id") == "pp");
    CHECK(text_length(pp) == 10 * 499 + 9);
    const auto path = extraction_path(body);
    REQUIRE(path.size() == 2);
    CHECK(path[0] == &body);
  }

  TEST_CASE("extract_pp_element edge cases") {
    const auto empty = body_of("<body></body>");
    CHECK(&extract_pp_element(empty) == &empty);
    // All ancestors uniform: the zero average forces descent down to a leaf.
    const auto chain = body_of("<body><div><div><p>only</p></div></div></body>");
    CHECK(extract_pp_element(chain).tag == "p");
    CHECK_THROWS_AS(ExtractionConfig{0.0}.validate(), ArgumentError);
    CHECK_THROWS_AS(ExtractionConfig{1.0}.validate(), ArgumentError);
    CHECK_NOTHROW(ExtractionConfig{0.55}.validate());
  }
}
