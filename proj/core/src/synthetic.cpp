// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "ppkit/error.hpp"
#include "ppkit/random.hpp"

namespace ppkit {

std::string random_word(Rng& rng, std::size_t length) {
  static constexpr char kConsonants[] = "bcdfghjklmnpqrstvwxz";
  static constexpr char kVowels[] = "aeiouy";
  std::string w;
  for (std::size_t i = 0; i < length; ++i) {
    w += (i % 2 == 0) ? kConsonants[rng.uniform_index(sizeof(kConsonants) - 1)]
                      : kVowels[rng.uniform_index(sizeof(kVowels) - 1)];
  }
  return w;
}

namespace {

// Draws words that do not collide with anything drawn before.
class WordPool {
 public:
  explicit WordPool(Rng& rng) : rng_(rng) {}
  std::string fresh(std::size_t length) {
    while (true) {
      std::string w = random_word(rng_, length);
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<CorpusDocument> make_leakage_corpus(const Taxonomy& t, const LeakageCorpusParams& p, std::uint64_t seed) {
  if (p.concepts_per_document == 0 || p.concepts_per_document > p.concepts.size()) {
    throw ArgumentError("concepts_per_document must be in [1, number of concepts]");
  }
  for (const auto& c : p.concepts) {
    if (!t.contains(c)) throw ArgumentError("unknown concept " + c);
  }
  Rng rng(seed);
  WordPool pool(rng);
  std::vector<std::string> filler(p.filler_vocabulary);
  for (auto& w : filler) w = pool.fresh(5);
  std::vector<std::string> signal(p.concepts.size());
  for (auto& w : signal) w = pool.fresh(6);

  auto filler_words = [&](std::size_t n) {
    std::vector<std::string> words(n);
    for (auto& w : words) w = filler[rng.uniform_index(filler.size())];
    return words;
  };
  auto sentence = [](std::vector<std::string> words) {
    std::string s;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) s += ' ';
      s += words[i];
    }
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s + ".";
  };
  auto insert_at_random = [&](std::vector<std::string>& words, const std::string& w) {
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(words.size() + 1)), w);
  };

  std::vector<CorpusDocument> docs;
  for (std::size_t d = 0; d < p.documents; ++d) {
    CorpusDocument cd;
    char id[32];
    std::snprintf(id, sizeof(id), "doc%03zu", d);
    cd.id = id;
    cd.document.source = "synthetic:" + cd.id;
    std::vector<std::size_t> order(p.concepts.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    order.resize(p.concepts_per_document);
    std::sort(order.begin(), order.end());

    std::vector<ContentNode> fillers;
    for (std::size_t f = 0; f < p.filler_paragraphs; ++f) {
      TextElement e;
      e.text = sentence(filler_words(p.words_per_paragraph));
      fillers.push_back(ContentNode::paragraph(std::move(e)));
    }
    // First filler paragraph leads the document, the rest go after it.
    if (!fillers.empty()) cd.document.children.push_back(fillers.front());
    for (std::size_t ci : order) {
      const std::string trigger = pool.fresh(7);
      TextElement title;
      title.text = sentence({trigger, filler[rng.uniform_index(filler.size())]});
      title.labels = {p.concepts[ci]};
      std::vector<ContentNode> body;
      for (std::size_t k = 0; k < p.paragraphs_per_concept; ++k) {
        auto words = filler_words(p.words_per_paragraph);
        insert_at_random(words, trigger);
        if (rng.bernoulli(p.shared_signal_rate)) insert_at_random(words, signal[ci]);
        TextElement e;
        e.text = sentence(std::move(words));
        e.labels = {p.concepts[ci]};
        body.push_back(ContentNode::paragraph(std::move(e)));
      }
      cd.document.children.push_back(ContentNode::segment(1, std::move(title), std::move(body)));
    }
    for (std::size_t f = 1; f < fillers.size(); ++f) cd.document.children.push_back(fillers[f]);
    assign_node_ids(cd.document);
    docs.push_back(std::move(cd));
  }
  return docs;
}

std::vector<BlockSample> make_separable_blocks(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BlockSample> out;
  for (int cls = 0; cls < kBlockClassCount; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      BlockSample s;
      s.label = static_cast<BlockClass>(cls);
      auto& f = s.features;
      if (s.label == BlockClass::kParagraph) {
        f.text_length = static_cast<int>(120 + rng.uniform_index(680));
        f.font_size = 14.0 + static_cast<double>(rng.uniform_index(3));
        f.font_weight = 400;
        f.tag_code = rng.bernoulli(0.7) ? TagCode::kP : TagCode::kDiv;
        f.dom_depth = static_cast<int>(1 + rng.uniform_index(4));
      } else {
        const int level = cls + 1;
        f.text_length = static_cast<int>(5 + rng.uniform_index(55));
        f.font_size = 32.0 - 4.0 * level + static_cast<double>(rng.uniform_index(3));
        f.font_weight = 700;
        f.tag_code = static_cast<TagCode>(level);
        f.dom_depth = static_cast<int>(1 + rng.uniform_index(4));
        for (int l = 0; l < level; ++l) {
          f.lol.values[3 * l] = 1;
          f.lol.values[3 * l + 1] = static_cast<int>(1 + rng.uniform_index(9));
          f.lol.values[3 * l + 2] = 1;
        }
      }
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace ppkit
