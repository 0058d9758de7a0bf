// Copyright 2026 The c2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "c2v/error.hpp"
#include "c2v/evaluate.hpp"
#include "synth.hpp"

using namespace c2v;
using namespace c2v::evaluate;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInput;
}

LabeledDataset blob_dataset(testing::Rng& rng, const std::vector<std::pair<std::string, std::size_t>>& classes,
                            std::size_t dim, double separation, double spread) {
  LabeledDataset ds{{}, dim};
  std::size_t serial = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < classes[c].second; ++i) {
      Vector x(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = (d == c % dim ? separation : 0.0) + testing::gaussian(rng, spread);
      }
      ds.rows.push_back({x, classes[c].first, "id" + std::to_string(serial++), false});
    }
  }
  return ds;
}

double distance_to_segment(const Vector& p, const Vector& a, const Vector& b) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    ab2 += (b[d] - a[d]) * (b[d] - a[d]);
    t += (p[d] - a[d]) * (b[d] - a[d]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double dist = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double q = a[d] + t * (b[d] - a[d]);
    dist += (p[d] - q) * (p[d] - q);
  }
  return std::sqrt(dist);
}

// True when p lies on a segment between two original rows of its class.
bool on_class_segment(const Sample& p, const LabeledDataset& original) {
  for (const auto& a : original.rows) {
    if (a.label != p.label) continue;
    for (const auto& b : original.rows) {
      if (b.label != p.label || &a == &b) continue;
      if (distance_to_segment(p.x, a.x, b.x) < 1e-9) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("labelled dataset drops masked and rare rows") {
  std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  EmbeddingMatrix m(ids, 1);
  for (std::size_t r = 0; r < 4; ++r) m.set_row(r, std::span<const double>(Vector{double(r)}));
  const auto ds = make_labeled_dataset(m, {"X", "X", "Y", std::nullopt, "X"}, 2);
  CHECK(ds.rows.size() == 2);
  CHECK(class_counts(ds) == std::map<std::string, std::size_t>{{"X", 2}});
  CHECK(make_labeled_dataset(m, {"X", "X", "Y", std::nullopt, "X"}, 1).rows.size() == 3);
}

TEST_CASE("stratified split") {
  testing::Rng rng(1);
  const auto ds = blob_dataset(rng, {{"A", 80}, {"B", 20}}, 2, 3.0, 1.0);
  const auto [train, test] = stratified_split(ds, 0.25, 9);
  CHECK(class_counts(test) == std::map<std::string, std::size_t>{{"A", 20}, {"B", 5}});
  CHECK(class_counts(train) == std::map<std::string, std::size_t>{{"A", 60}, {"B", 15}});
  const auto again = stratified_split(ds, 0.25, 9);
  for (std::size_t i = 0; i < test.rows.size(); ++i) CHECK(again.second.rows[i].source_id == test.rows[i].source_id);
  CHECK(code_of([&] { stratified_split(ds, 0.0, 1); }) == ErrorCode::kInput);
  CHECK(code_of([&] { stratified_split(ds, 1.0, 1); }) == ErrorCode::kInput);
  auto lonely = ds;
  lonely.rows.push_back({Vector{0, 0}, "Solo", "solo", false});
  try {
    stratified_split(lonely, 0.2, 1);
    FAIL("expected a split error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSplit);
    CHECK(std::string(e.what()).find("Solo") != std::string::npos);
  }
}

TEST_CASE("SMOTE") {
  testing::Rng rng(2);
  const auto ds = blob_dataset(rng, {{"A", 10}, {"B", 4}}, 3, 4.0, 1.0);
  const auto out = smote_oversample(ds, 5, 3);
  CHECK(class_counts(out) == std::map<std::string, std::size_t>{{"A", 10}, {"B", 10}});
  std::size_t synthetic = 0;
  for (const auto& s : out.rows) {
    if (!s.synthetic) continue;
    ++synthetic;
    CHECK(s.label == "B");
    CHECK(s.source_id.rfind("synthetic:", 0) == 0);
    CHECK(on_class_segment(s, ds));
  }
  CHECK(synthetic == 6);
  CHECK(smote_oversample(out, 5, 3).rows.size() == out.rows.size());

  auto single = ds;
  single.rows.push_back({Vector{0, 0, 0}, "C", "c", false});
  CHECK(code_of([&] { smote_oversample(single, 5, 1); }) == ErrorCode::kResampling);
  CHECK(code_of([&] { smote_oversample(ds, 0, 1); }) == ErrorCode::kInput);
}

TEST_CASE("undersampling") {
  testing::Rng rng(3);
  const auto ds = blob_dataset(rng, {{"A", 100}, {"B", 10}}, 2, 4.0, 1.0);
  const auto out = random_undersample(ds, 10, 4);
  CHECK(class_counts(out) == std::map<std::string, std::size_t>{{"A", 10}, {"B", 10}});
  std::set<std::string> ids;
  for (const auto& s : ds.rows) ids.insert(s.source_id);
  for (const auto& s : out.rows) CHECK(ids.contains(s.source_id));
  CHECK(random_undersample(ds, 100, 4).rows.size() == ds.rows.size());
}

TEST_CASE("balancing on random imbalanced sets") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<std::string, std::size_t>> classes;
    const std::size_t c = 2 + testing::pick(rng, 5);
    for (std::size_t i = 0; i < c; ++i) classes.push_back({std::string(1, char('A' + i)), 4 + testing::pick(rng, 40)});
    const auto ds = blob_dataset(rng, classes, 4, 3.0, 1.0);
    const auto [train, test] = stratified_split(ds, 0.2, trial);
    const auto balanced = balance(train, 5, trial);
    const auto counts = class_counts(balanced);
    for (const auto& [label, n] : counts) CHECK(n == counts.begin()->second);
    for (const auto& s : test.rows) CHECK_FALSE(s.synthetic);
    for (const auto& s : balanced.rows) {
      if (s.synthetic) CHECK(on_class_segment(s, train));
    }
  }
}

TEST_CASE("softmax gradient matches central differences") {
  testing::Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + testing::pick(rng, 20), dim = 1 + testing::pick(rng, 5), classes = 2 + testing::pick(rng, 4);
    std::vector<Vector> x(n, Vector(dim));
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x[i]) v = testing::gaussian(rng);
      y[i] = testing::pick(rng, classes);
    }
    Vector params(classes * (dim + 1));
    for (auto& p : params) p = testing::gaussian(rng);
    const double l2 = testing::uniform(rng, 0.0, 0.1);
    Vector grad;
    softmax_objective(params, x, y, classes, l2, &grad);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto up = params, down = params;
      up[i] += h;
      down[i] -= h;
      const double fd = (softmax_objective(up, x, y, classes, l2, nullptr) -
                         softmax_objective(down, x, y, classes, l2, nullptr)) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[i]));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("separable blobs are classified") {
  testing::Rng rng(7);
  const auto ds = blob_dataset(rng, {{"L", 150}, {"R", 150}}, 2, 8.0, 1.0);
  const auto [train, test] = stratified_split(ds, 0.3, 1);
  for (const auto kind : {ClassifierKind::kLogisticRegression, ClassifierKind::kKnn}) {
    const auto model = fit_classifier(train, kind);
    const auto r = evaluate_model(model, test);
    CHECK(r.top1 >= 0.99);
    CHECK(r.top3 >= r.top1);
    for (const auto& row : test.rows) {
      for (const double s : model.predict_scores(row.x)) CHECK(std::isfinite(s));
    }
  }
  const auto memo = fit_classifier(train, ClassifierKind::kKnn, {.knn_k = 1});
  CHECK(top_n_accuracy(memo, train, 1) == 1.0);
  CHECK(top_n_accuracy(memo, train, 2) == 1.0);
}

TEST_CASE("top-n accuracy on a hand fixture") {
  LabeledDataset train{{}, 1};
  train.rows = {{{0.0}, "A", "a", false}, {{10.0}, "B", "b", false}, {{20.0}, "C", "c", false}};
  const auto model = fit_classifier(train, ClassifierKind::kKnn, {.knn_k = 1});
  LabeledDataset test{{}, 1};
  test.rows = {{{1.0}, "A", "t1", false}, {{9.0}, "B", "t2", false}, {{21.0}, "C", "t3", false},
               {{2.0}, "C", "t4", false}};
  CHECK(top_n_accuracy(model, test, 1) == 0.75);
  // With one neighbour every other class scores 0; ties follow class order,
  // so the C row lands third.
  CHECK(top_n_accuracy(model, test, 2) == 0.75);
  CHECK(top_n_accuracy(model, test, 3) == 1.0);
  const auto r = evaluate_model(model, test);
  CHECK(r.confusion[2][0] == 1);
  CHECK(r.per_class_recall[2] == 0.5);
  CHECK(code_of([&] { top_n_accuracy(model, test, 0); }) == ErrorCode::kInput);
}

TEST_CASE("degenerate training sets") {
  LabeledDataset one{{}, 1};
  one.rows = {{{0.0}, "A", "a", false}, {{1.0}, "A", "b", false}};
  CHECK(code_of([&] { fit_classifier(one, ClassifierKind::kLogisticRegression); }) == ErrorCode::kFit);
  CHECK(parse_classifier("logreg") == ClassifierKind::kLogisticRegression);
  CHECK(parse_classifier("knn") == ClassifierKind::kKnn);
  CHECK(code_of([] { parse_classifier("forest"); }) == ErrorCode::kInput);
}

TEST_CASE("naive baseline") {
  std::vector<std::string> labels;
  for (int i = 0; i < 2948; ++i) labels.push_back("C");
  for (int i = 0; i < 7052; ++i) labels.push_back(i % 3 == 0 ? "G" : i % 3 == 1 ? "M" : "K");
  const auto b = naive_baseline(labels);
  CHECK(b.label == "C");
  CHECK(std::abs(b.probability - 0.2948) < 1e-12);
  const std::vector<std::string> single = {"K", "K"};
  CHECK(naive_baseline(single).probability == 1.0);
  std::vector<std::string> uniform;
  for (int c = 0; c < 19; ++c) uniform.push_back(std::string(1, char('A' + c)));
  CHECK(std::abs(naive_baseline(uniform).probability - 1.0 / 19.0) < 1e-12);
  CHECK(std::abs(1.0 / 19.0 - 0.0526) < 5e-5);
}

TEST_CASE("evaluation grid on the synthetic corpus") {
  const auto corpus = testing::make_corpus(3);
  GridOptions options;
  options.strategies = {embed::EmbeddingStrategy::kText, embed::EmbeddingStrategy::kImage};
  options.classifiers = {ClassifierKind::kLogisticRegression, ClassifierKind::kKnn};
  options.seed = 11;
  const auto report = run_grid(corpus.records, corpus.table, options);
  CHECK(report.cells.size() == 8);
  CHECK(report.class_count == 8);
  CHECK(report.naive.label == "A");
  for (const auto& cell : report.cells) {
    CHECK(cell.result.top3 >= cell.result.top1);
    CHECK(cell.test_rows > 0);
  }
  std::ostringstream table, grid;
  write_grid_table(table, report);
  write_confusion_grid(grid, report);
  CHECK(table.str().find("text") != std::string::npos);
  CHECK_FALSE(grid.str().empty());

  options.level = Level::kLevel2;
  options.strategies = {embed::EmbeddingStrategy::kText};
  options.classifiers = {ClassifierKind::kKnn};
  options.balanced = false;
  const auto level2 = run_grid(corpus.records, corpus.table, options);
  CHECK(level2.class_count == 16);
}
