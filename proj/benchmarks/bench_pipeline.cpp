// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ppkit/decision_forest.hpp"
#include "ppkit/features.hpp"
#include "ppkit/html_pipeline.hpp"
#include "ppkit/matrix.hpp"
#include "ppkit/random.hpp"
#include "ppkit/synthetic.hpp"

namespace {

std::string sentence(ppkit::Rng& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + ppkit::random_word(rng, 2 + rng.uniform_index(7));
  return s;
}

// Policy page with `sections` heading/paragraph pairs between page chrome.
std::string page(std::size_t sections) {
  ppkit::Rng rng(sections);
  std::string html = "<html><head><style>p{}</style></head><body><nav><a href=\"/\">Home</a></nav>"
                     "<div class=\"brand\">Acme</div><div id=\"main\"><h1>Privacy Policy</h1>";
  for (std::size_t i = 0; i < sections; ++i) {
    html += "<h2>" + std::to_string(i + 1) + ". " + sentence(rng, 3) + "</h2><p>" + sentence(rng, 40) + "</p>";
  }
  return html + "</div><script>var x = 1;</script><footer>Contact</footer></body></html>";
}

void BM_ExtractPolicyElement(benchmark::State& state) {
  const auto html = page(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto cleaned = ppkit::strip_irrelevant_elements(ppkit::parse_html(html));
    benchmark::DoNotOptimize(&ppkit::extract_pp_element(ppkit::find_body(cleaned)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_ExtractPolicyElement)->Arg(10)->Arg(100)->Arg(1000);

void BM_TfidfTransform(benchmark::State& state) {
  ppkit::Rng rng(3);
  std::vector<std::string> texts;
  for (int i = 0; i < 2000; ++i) texts.push_back(sentence(rng, 30));
  const auto vocab = ppkit::fit_tfidf(texts, static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ppkit::transform_tfidf(vocab, texts[i++ % texts.size()]));
}
BENCHMARK(BM_TfidfTransform)->Arg(1000)->Arg(5000);

void BM_ForestTrain(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  ppkit::Rng rng(5);
  ppkit::Matrix x(rows, 50);
  std::vector<int> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < 50; ++c) x(r, c) = rng.uniform_real();
    y[r] = x(r, 0) + x(r, 1) > 1.0 ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ppkit::DecisionForest::train(x, y, 2, ppkit::ForestParams::random_forest(20), 1));
  }
}
BENCHMARK(BM_ForestTrain)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
