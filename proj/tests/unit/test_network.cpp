// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ppkit/error.hpp"
#include "ppkit/neural_net.hpp"
#include "ppkit/random.hpp"

using namespace ppkit;

namespace {

// Output 0 copies x0 > 0.5, output 1 copies x1 > 0.5.
struct Data {
  Matrix x;
  Matrix y;
  std::vector<std::size_t> rows;
};

Data make_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row{rng.uniform_real(), rng.uniform_real(), rng.uniform_real()};
    d.x.append_row(row);
    const std::vector<double> target{row[0] > 0.5 ? 1.0 : 0.0, row[1] > 0.5 ? 1.0 : 0.0};
    d.y.append_row(target);
  }
  d.rows.resize(n);
  std::iota(d.rows.begin(), d.rows.end(), 0);
  return d;
}

MlpParams small() {
  MlpParams p;
  p.hidden = 16;
  p.learning_rate = 0.01;
  p.max_epochs = 60;
  p.patience = 10;
  return p;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("learns independent outputs") {
    const auto d = make_data(600, 1);
    MlpTrainingLog log;
    const auto net = Mlp::train(d.x, d.y, d.rows, small(), 3, &log);
    CHECK(net.input_dimension() == 3);
    CHECK(net.output_count() == 2);
    CHECK(net.hidden() == 16);
    CHECK(net.all_finite());
    CHECK(log.epochs_run >= 1);
    CHECK(log.best_epoch <= log.epochs_run);
    const auto test = make_data(200, 2);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto p = net.predict(test.x.row(i));
      REQUIRE(p.size() == 2);
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(p[k] >= 0.0);
        CHECK(p[k] <= 1.0);
        ok += (p[k] >= 0.5) == (test.y(i, k) == 1.0);
      }
    }
    CHECK(static_cast<double>(ok) / 400.0 >= 0.9);
  }

  TEST_CASE("determinism and persistence") {
    const auto d = make_data(100, 4);
    auto p = small();
    p.max_epochs = 5;
    const auto a = Mlp::train(d.x, d.y, d.rows, p, 8);
    CHECK(a == Mlp::train(d.x, d.y, d.rows, p, 8));
    CHECK(!(a == Mlp::train(d.x, d.y, d.rows, p, 9)));
    std::stringstream ss;
    a.write(ss);
    const auto b = Mlp::read(ss);
    CHECK(b == a);
    CHECK(b.predict(d.x.row(3)) == a.predict(d.x.row(3)));
    std::stringstream bad("garbage\n");
    CHECK_THROWS_AS(Mlp::read(bad), FormatError);
  }

  TEST_CASE("argument errors") {
    const auto d = make_data(20, 5);
    CHECK_THROWS_AS(Mlp::train(d.x, d.y, std::vector<std::size_t>{}, small(), 1), ArgumentError);
    Matrix wrong_rows(3, 2);
    CHECK_THROWS_AS(Mlp::train(d.x, wrong_rows, d.rows, small(), 1), ArgumentError);
    auto zero = small();
    zero.hidden = 0;
    CHECK_THROWS_AS(Mlp::train(d.x, d.y, d.rows, zero, 1), ArgumentError);
    auto p = small();
    p.max_epochs = 1;
    const auto net = Mlp::train(d.x, d.y, d.rows, p, 1);
    CHECK_THROWS_AS(net.predict(std::vector<double>{1.0, 2.0}), ArgumentError);
  }
}
