// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/neural_net.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ppkit/error.hpp"
#include "ppkit/random.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Net {
  Mat w1;
  Vec b1;
  Mat w2;
  Vec b2;
};

struct Adam {
  explicit Adam(const Net& n)
      : m{Mat::Zero(n.w1.rows(), n.w1.cols()), Vec::Zero(n.b1.size()), Mat::Zero(n.w2.rows(), n.w2.cols()),
          Vec::Zero(n.b2.size())},
        v(m) {}
  Net m, v;
  std::size_t t = 0;
};

// Gathers rows of `x` as the columns of a matrix.
Mat gather(const Matrix& x, std::span<const std::size_t> rows) {
  Mat out(x.cols(), rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto r = x.row(rows[j]);
    for (std::size_t i = 0; i < r.size(); ++i) out(i, j) = r[i];
  }
  return out;
}

Mat sigmoid(const Mat& z) {
  return z.unaryExpr([](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); });
}

// Mean binary cross-entropy over all outputs, computed from logits.
double bce_from_logits(const Mat& z, const Mat& y) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double v = z(i, j);
      total += std::max(v, 0.0) - v * y(i, j) + std::log1p(std::exp(-std::abs(v)));
    }
  }
  return total / static_cast<double>(std::max<Eigen::Index>(1, z.size()));
}

Mat logits(const Net& n, const Mat& xb) {
  Mat h = ((n.w1 * xb).colwise() + n.b1).cwiseMax(0.0);
  return (n.w2 * h).colwise() + n.b2;
}

void adam_update(Mat& p, Mat& m, Mat& v, const Mat& g, double lr, double c1, double c2) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  m = b1 * m + (1 - b1) * g;
  v = b2 * v + (1 - b2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

void adam_update(Vec& p, Vec& m, Vec& v, const Vec& g, double lr, double c1, double c2) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  m = b1 * m + (1 - b1) * g;
  v = b2 * v + (1 - b2) * g.cwiseProduct(g);
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

void step(Net& n, Adam& opt, const Mat& xb, const Mat& yb, double lr) {
  const double bs = static_cast<double>(xb.cols());
  Mat pre = (n.w1 * xb).colwise() + n.b1;
  Mat h = pre.cwiseMax(0.0);
  Mat z = (n.w2 * h).colwise() + n.b2;
  Mat dz = (sigmoid(z) - yb) / (bs * static_cast<double>(yb.rows()));
  Mat gw2 = dz * h.transpose();
  Vec gb2 = dz.rowwise().sum();
  Mat dh = n.w2.transpose() * dz;
  dh = dh.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  Mat gw1 = dh * xb.transpose();
  Vec gb1 = dh.rowwise().sum();
  ++opt.t;
  const double c1 = 1 - std::pow(0.9, static_cast<double>(opt.t));
  const double c2 = 1 - std::pow(0.999, static_cast<double>(opt.t));
  adam_update(n.w1, opt.m.w1, opt.v.w1, gw1, lr, c1, c2);
  adam_update(n.b1, opt.m.b1, opt.v.b1, gb1, lr, c1, c2);
  adam_update(n.w2, opt.m.w2, opt.v.w2, gw2, lr, c1, c2);
  adam_update(n.b2, opt.m.b2, opt.v.b2, gb2, lr, c1, c2);
}

}  // namespace

Mlp Mlp::train(const Matrix& x, const Matrix& targets, std::span<const std::size_t> rows, const MlpParams& params,
               std::uint64_t seed, MlpTrainingLog* log) {
  if (rows.empty()) throw ArgumentError("empty training set");
  if (x.rows() != targets.rows()) throw ArgumentError("feature and target row counts differ");
  if (targets.cols() == 0) throw ArgumentError("network needs at least one output");
  if (params.hidden == 0 || params.batch_size == 0) throw ArgumentError("hidden width and batch size must be >= 1");
  const auto d = static_cast<Eigen::Index>(x.cols());
  const auto h = static_cast<Eigen::Index>(params.hidden);
  const auto k = static_cast<Eigen::Index>(targets.cols());

  Rng rng(seed);
  Net net{Mat(h, d), Vec::Zero(h), Mat(k, h), Vec::Zero(k)};
  const double lim1 = std::sqrt(6.0 / static_cast<double>(std::max<Eigen::Index>(1, d)));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(h + k));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < h; ++i) net.w1(i, j) = rng.uniform_real(-lim1, lim1);
  for (Eigen::Index j = 0; j < h; ++j)
    for (Eigen::Index i = 0; i < k; ++i) net.w2(i, j) = rng.uniform_real(-lim2, lim2);

  std::vector<std::size_t> order(rows.begin(), rows.end());
  rng.shuffle(std::span<std::size_t>(order));
  std::size_t n_val = 0;
  if (params.validation_fraction > 0.0 && order.size() >= 10) {
    n_val = static_cast<std::size_t>(std::llround(params.validation_fraction * static_cast<double>(order.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, order.size() - 1);
  }
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  const Mat xv = gather(x, val), yv = gather(targets, val);

  Adam opt(net);
  Net best = net;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0, since_best = 0, epochs = 0;
  for (std::size_t epoch = 1; epoch <= params.max_epochs; ++epoch) {
    epochs = epoch;
    rng.shuffle(std::span<std::size_t>(train));
    for (std::size_t b = 0; b < train.size(); b += params.batch_size) {
      const auto batch = std::span<const std::size_t>(train).subspan(b, std::min(params.batch_size, train.size() - b));
      step(net, opt, gather(x, batch), gather(targets, batch), params.learning_rate);
    }
    if (n_val == 0) {
      best = net;
      best_epoch = epoch;
      continue;
    }
    const double loss = bce_from_logits(logits(net, xv), yv);
    if (loss < best_loss) {
      best_loss = loss;
      best = net;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= params.patience) {
      break;
    }
  }
  if (log) *log = {epochs, best_epoch, n_val == 0 ? 0.0 : best_loss};

  Mlp m;
  m.inputs_ = x.cols();
  m.hidden_ = params.hidden;
  m.outputs_ = targets.cols();
  m.w1_.assign(best.w1.data(), best.w1.data() + best.w1.size());
  m.b1_.assign(best.b1.data(), best.b1.data() + best.b1.size());
  m.w2_.assign(best.w2.data(), best.w2.data() + best.w2.size());
  m.b2_.assign(best.b2.data(), best.b2.data() + best.b2.size());
  return m;
}

std::vector<double> Mlp::predict(std::span<const double> features) const {
  if (features.size() != inputs_) {
    throw ArgumentError("feature dimension mismatch: network expects " + std::to_string(inputs_) + ", got " +
                        std::to_string(features.size()));
  }
  const auto d = static_cast<Eigen::Index>(inputs_), h = static_cast<Eigen::Index>(hidden_),
             k = static_cast<Eigen::Index>(outputs_);
  Eigen::Map<const Mat> w1(w1_.data(), h, d), w2(w2_.data(), k, h);
  Eigen::Map<const Vec> b1(b1_.data(), h), b2(b2_.data(), k), xv(features.data(), d);
  const Vec hidden = (w1 * xv + b1).cwiseMax(0.0);
  const Vec z = w2 * hidden + b2;
  std::vector<double> out(outputs_);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double v = z(i);
    out[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return out;
}

bool Mlp::all_finite() const {
  for (const auto* v : {&w1_, &b1_, &w2_, &b2_}) {
    for (double x : *v) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

void Mlp::write(std::ostream& out) const {
  out << "mlp inputs=" << inputs_ << " hidden=" << hidden_ << " outputs=" << outputs_ << "\n";
  auto dump = [&](const char* name, const std::vector<double>& v) {
    out << name;
    for (double x : v) out << ' ' << text::format_double(x);
    out << "\n";
  };
  dump("w1", w1_);
  dump("b1", b1_);
  dump("w2", w2_);
  dump("b2", b2_);
}

Mlp Mlp::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing network header");
  Mlp m;
  if (std::sscanf(line.c_str(), "mlp inputs=%zu hidden=%zu outputs=%zu", &m.inputs_, &m.hidden_, &m.outputs_) != 3) {
    throw FormatError("malformed network header");
  }
  auto load = [&](const char* name, std::vector<double>& v, std::size_t n) {
    if (!std::getline(in, line)) throw FormatError(std::string("missing network block ") + name);
    std::istringstream ls(line);
    std::string tag, tok;
    ls >> tag;
    if (tag != name) throw FormatError(std::string("expected network block ") + name);
    v.reserve(n);
    while (ls >> tok) v.push_back(text::parse_double(tok));
    if (v.size() != n) throw FormatError(std::string("network block ") + name + " has the wrong size");
  };
  load("w1", m.w1_, m.hidden_ * m.inputs_);
  load("b1", m.b1_, m.hidden_);
  load("w2", m.w2_, m.outputs_ * m.hidden_);
  load("b2", m.b2_, m.outputs_);
  return m;
}

}  // namespace ppkit
