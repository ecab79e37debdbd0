// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppkit/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ppkit/error.hpp"
#include "ppkit/text.hpp"

namespace ppkit {

std::vector<std::string> MetricsReport::evaluated_level1() const {
  std::vector<std::string> out;
  for (const auto& c : concepts) {
    if (c.evaluated && c.level == 1) out.push_back(c.concept_id);
  }
  return out;
}

std::vector<std::string> MetricsReport::evaluated_all() const {
  std::vector<std::string> out;
  for (const auto& c : concepts) {
    if (c.evaluated) out.push_back(c.concept_id);
  }
  return out;
}

namespace {

std::vector<char> membership(std::span<const std::string> labels, const Taxonomy& t, bool closure) {
  std::vector<char> on(t.size(), 0);
  if (closure) {
    for (std::size_t c : label_closure(labels, t)) on[c] = 1;
  } else {
    for (const auto& l : labels) on[t.index_of(l)] = 1;
  }
  return on;
}

}  // namespace

MetricsReport evaluate_run(const Predictions& predictions, const Corpus& corpus,
                           std::span<const std::size_t> test_nodes, const Taxonomy& t,
                           const EvaluationOptions& opts) {
  std::vector<std::string> missing;
  for (std::size_t i : test_nodes) {
    if (!predictions.count(corpus.nodes()[i].key())) missing.push_back(corpus.nodes()[i].key());
  }
  if (!missing.empty() || predictions.size() != test_nodes.size()) {
    std::string msg = "prediction/gold key mismatch";
    if (!missing.empty()) msg += ": no prediction for " + missing.front();
    else msg += ": " + std::to_string(predictions.size()) + " predictions for " + std::to_string(test_nodes.size()) + " test nodes";
    throw ArgumentError(msg);
  }
  MetricsReport r;
  r.min_support = opts.min_support;
  r.test_nodes = test_nodes.size();
  r.concepts.resize(t.size());
  for (std::size_t c = 0; c < t.size(); ++c) {
    r.concepts[c].concept_id = t.node_at(c).id;
    r.concepts[c].level = t.node_at(c).level;
  }
  for (std::size_t i : test_nodes) {
    const auto& node = corpus.nodes()[i];
    const auto gold = membership(node.labels, t, opts.include_descendants);
    const auto pred = membership(predictions.at(node.key()), t, opts.include_descendants);
    for (std::size_t c = 0; c < t.size(); ++c) r.concepts[c].counts.add(pred[c] != 0, gold[c] != 0);
  }
  std::vector<double> f1_l1, f1_all, p_all, r_all;
  for (auto& c : r.concepts) {
    c.support = c.counts.tp + c.counts.fn;
    c.scores = precision_recall_f1(c.counts);
    c.evaluated = c.support >= opts.min_support && c.support > 0;
    if (!c.evaluated) continue;
    f1_all.push_back(c.scores.f1);
    p_all.push_back(c.scores.precision);
    r_all.push_back(c.scores.recall);
    if (c.level == 1) f1_l1.push_back(c.scores.f1);
  }
  r.macro_f1_level1 = macro_average(f1_l1);
  r.macro_f1_all = macro_average(f1_all);
  r.macro_precision_all = macro_average(p_all);
  r.macro_recall_all = macro_average(r_all);
  return r;
}

std::string report_csv(std::span<const MetricsReport> reports) {
  std::string out = "type_id,mode,concept_id,level,tp,fp,fn,tn,precision,recall,f1,support\n";
  for (const auto& r : reports) {
    for (const auto& c : r.concepts) {
      out += std::to_string(r.type_id) + "," + to_string(r.mode) + "," + c.concept_id + "," +
             std::to_string(c.level) + "," + std::to_string(c.counts.tp) + "," + std::to_string(c.counts.fp) + "," +
             std::to_string(c.counts.fn) + "," + std::to_string(c.counts.tn) + "," +
             text::format_fixed(c.scores.precision, 6) + "," + text::format_fixed(c.scores.recall, 6) + "," +
             text::format_fixed(c.scores.f1, 6) + "," + std::to_string(c.support) + "\n";
    }
  }
  return out;
}

std::string report_text(const MetricsReport& r) {
  std::string out;
  out += "type " + std::to_string(r.type_id) + ", " + to_string(r.mode) + "-level split, seed " +
         std::to_string(r.seed) + "\n";
  out += "test nodes: " + std::to_string(r.test_nodes) + ", min support: " + std::to_string(r.min_support) + "\n";
  const auto l1 = r.evaluated_level1();
  const auto all = r.evaluated_all();
  out += "macro F1 (level-1, " + std::to_string(l1.size()) + " concepts): " + text::format_fixed(r.macro_f1_level1, 3) + "\n";
  out += "macro F1 (all, " + std::to_string(all.size()) + " concepts): " + text::format_fixed(r.macro_f1_all, 3) + "\n";
  out += "macro P/R (all): " + text::format_fixed(r.macro_precision_all, 3) + " / " +
         text::format_fixed(r.macro_recall_all, 3) + "\n";
  out += "evaluated concepts:\n";
  for (const auto& c : r.concepts) {
    if (!c.evaluated) continue;
    out += "  " + c.concept_id + "  P=" + text::format_fixed(c.scores.precision, 3) + " R=" +
           text::format_fixed(c.scores.recall, 3) + " F1=" + text::format_fixed(c.scores.f1, 3) +
           " support=" + std::to_string(c.support) + "\n";
  }
  return out;
}

std::vector<ComparisonRow> build_comparison(std::span<const MetricsReport> reports) {
  using Key = std::pair<int, int>;  // mode, type
  std::map<Key, std::vector<const MetricsReport*>> groups;
  for (const auto& r : reports) groups[{static_cast<int>(r.mode), r.type_id}].push_back(&r);

  std::vector<ComparisonRow> rows;
  std::map<Key, std::map<std::string, double>> mean_f1;  // per group, per concept
  std::map<int, std::set<std::string>> qualifying_all, qualifying_l1;
  std::map<int, bool> first_in_mode;
  for (const auto& [key, group] : groups) {
    ComparisonRow row;
    row.mode = static_cast<SplitMode>(key.first);
    row.type_id = key.second;
    std::vector<double> l1, all;
    std::map<std::string, std::pair<double, std::size_t>> sums;
    std::set<std::string> eval_all, eval_l1;
    bool first = true;
    for (const MetricsReport* r : group) {
      row.seeds.push_back(r->seed);
      l1.push_back(r->macro_f1_level1);
      all.push_back(r->macro_f1_all);
      std::set<std::string> these_all, these_l1;
      for (const auto& c : r->concepts) {
        if (!c.evaluated) continue;
        these_all.insert(c.concept_id);
        if (c.level == 1) these_l1.insert(c.concept_id);
        auto& s = sums[c.concept_id];
        s.first += c.scores.f1;
        s.second += 1;
      }
      if (first) {
        eval_all = these_all;
        eval_l1 = these_l1;
        first = false;
      } else {
        std::erase_if(eval_all, [&](const std::string& id) { return !these_all.count(id); });
        std::erase_if(eval_l1, [&](const std::string& id) { return !these_l1.count(id); });
      }
    }
    row.macro_f1_level1 = macro_average(l1);
    row.macro_f1_all = macro_average(all);
    for (const auto& [id, s] : sums) mean_f1[key][id] = s.first / static_cast<double>(s.second);
    const int mode = key.first;
    if (!first_in_mode.count(mode)) {
      first_in_mode[mode] = true;
      qualifying_all[mode] = eval_all;
      qualifying_l1[mode] = eval_l1;
    } else {
      std::erase_if(qualifying_all[mode], [&](const std::string& id) { return !eval_all.count(id); });
      std::erase_if(qualifying_l1[mode], [&](const std::string& id) { return !eval_l1.count(id); });
    }
    rows.push_back(std::move(row));
  }
  auto tally = [&](int mode, const std::set<std::string>& concepts, bool level1) {
    for (const auto& id : concepts) {
      double best = -1.0;
      for (const auto& row : rows) {
        if (static_cast<int>(row.mode) == mode) best = std::max(best, mean_f1[{mode, row.type_id}][id]);
      }
      for (auto& row : rows) {
        if (static_cast<int>(row.mode) != mode) continue;
        if (mean_f1[{mode, row.type_id}][id] == best) (level1 ? row.best_level1 : row.best_all)++;
      }
    }
    for (auto& row : rows) {
      if (static_cast<int>(row.mode) == mode) (level1 ? row.total_level1 : row.total_all) = concepts.size();
    }
  };
  for (const auto& [mode, set] : qualifying_all) tally(mode, set, false);
  for (const auto& [mode, set] : qualifying_l1) tally(mode, set, true);
  return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "type_id,mode,seeds,macro_f1_level1,macro_f1_all,best_level1,total_level1,best_all,total_all\n";
  for (const auto& r : rows) {
    std::vector<std::string> seeds;
    for (auto s : r.seeds) seeds.push_back(std::to_string(s));
    out += std::to_string(r.type_id) + "," + to_string(r.mode) + "," + text::join(seeds, ";") + "," +
           text::format_fixed(r.macro_f1_level1, 6) + "," + text::format_fixed(r.macro_f1_all, 6) + "," +
           std::to_string(r.best_level1) + "," + std::to_string(r.total_level1) + "," + std::to_string(r.best_all) +
           "," + std::to_string(r.total_all) + "\n";
  }
  return out;
}

std::string comparison_table(std::span<const ComparisonRow> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-9s %-5s %10s %10s %12s %12s\n", "mode", "type", "macro-L1", "macro-all",
                "best-L1", "best-all");
  out += buf;
  for (const auto& r : rows) {
    const std::string b1 = std::to_string(r.best_level1) + "/" + std::to_string(r.total_level1);
    const std::string ba = std::to_string(r.best_all) + "/" + std::to_string(r.total_all);
    std::snprintf(buf, sizeof(buf), "%-9s %-5d %10s %10s %12s %12s\n", to_string(r.mode).c_str(), r.type_id,
                  text::format_fixed(r.macro_f1_level1, 3).c_str(), text::format_fixed(r.macro_f1_all, 3).c_str(),
                  b1.c_str(), ba.c_str());
    out += buf;
  }
  return out;
}

}  // namespace ppkit
