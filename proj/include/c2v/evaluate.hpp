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

// Supervised industry prediction on company embeddings: stratified split,
// class balancing (SMOTE then random undersampling), softmax regression and
// kNN classifiers, top-n accuracy and confusion matrices.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "c2v/embed.hpp"
#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"
#include "c2v/wordvec.hpp"

namespace c2v::evaluate {

enum class Level { kLevel1, kLevel2 };

struct Sample {
  Vector x;
  std::string label;
  std::string source_id;   // company id, or "synthetic:<n>" for SMOTE rows
  bool synthetic = false;
};

struct LabeledDataset {
  std::vector<Sample> rows;
  std::size_t dim = 0;
};

/// Non-masked, labelled rows of `matrix`; classes with fewer than
/// `min_class_size` members are dropped.
LabeledDataset make_labeled_dataset(const EmbeddingMatrix& matrix,
                                    const std::vector<std::optional<std::string>>& labels,
                                    std::size_t min_class_size = 2);

std::map<std::string, std::size_t> class_counts(const LabeledDataset& ds);

/// Per class (in label order) a seeded shuffle, then round(count * fraction)
/// rows to test, clamped so both sides keep at least one row.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

/// Raises every class below `target` (default: the majority count) to it.
/// Each synthetic row is x + λ(x' − x) for a uniformly chosen class member
/// x, x' one of its k nearest same-class neighbours, λ ~ U[0, 1].
LabeledDataset smote_oversample(const LabeledDataset& train, std::size_t k_neighbors,
                                std::uint64_t seed, std::optional<std::size_t> target = {});

/// Classes above `target_count` are sampled down without replacement.
LabeledDataset random_undersample(const LabeledDataset& train, std::size_t target_count,
                                  std::uint64_t seed);

/// SMOTE to the majority count, then undersampling to that common count.
LabeledDataset balance(const LabeledDataset& train, std::size_t k_neighbors, std::uint64_t seed);

enum class ClassifierKind { kLogisticRegression, kKnn };

const char* to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);

struct Hyperparameters {
  double l2 = 1e-4;
  double learning_rate = 0.5;
  std::size_t epochs = 400;
  std::size_t knn_k = 15;
};

class ClassifierModel {
 public:
  ClassifierKind kind() const { return kind_; }
  const std::vector<std::string>& classes() const { return classes_; }

  /// One finite score per class, in classes() order.
  Vector predict_scores(std::span<const double> x) const;

 private:
  friend ClassifierModel fit_classifier(const LabeledDataset&, ClassifierKind,
                                        const Hyperparameters&);

  ClassifierKind kind_ = ClassifierKind::kLogisticRegression;
  std::vector<std::string> classes_;
  // Softmax regression on standardised features.
  Vector feature_mean_;
  Vector feature_scale_;
  std::vector<Vector> weights_;  // per class
  Vector bias_;
  // kNN.
  std::vector<Vector> train_x_;
  std::vector<std::size_t> train_y_;
  std::size_t knn_k_ = 0;
};

ClassifierModel fit_classifier(const LabeledDataset& train, ClassifierKind kind,
                               const Hyperparameters& hyper = {});

/// Mean cross-entropy of a softmax model plus (l2/2)·‖W‖². Parameters are
/// the flattened [W (classes × dim, row-major), b (classes)]. Fills
/// `gradient` when non-null.
double softmax_objective(std::span<const double> params, const std::vector<Vector>& x,
                         std::span<const std::size_t> y, std::size_t classes, double l2,
                         Vector* gradient);

/// Fraction of rows whose label is among the n best-scoring classes (score
/// ties resolved in class order). Labels unknown to the model count as
/// misses.
double top_n_accuracy(const ClassifierModel& model, const LabeledDataset& test, std::size_t n);

struct EvalResult {
  double top1 = 0.0;
  double top3 = 0.0;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> per_class_recall;
};

EvalResult evaluate_model(const ClassifierModel& model, const LabeledDataset& test);

struct NaiveBaseline {
  std::string label;
  double probability = 0.0;
};

/// Most frequent label (ties: smallest) and its empirical frequency.
NaiveBaseline naive_baseline(std::span<const std::string> labels);

// ---------------------------------------------------------------------------
// Strategy x classifier grid mirroring the published result tables.

struct GridOptions {
  Level level = Level::kLevel1;
  std::vector<embed::EmbeddingStrategy> strategies;
  std::vector<ClassifierKind> classifiers;
  bool unbalanced = true;
  bool balanced = true;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::size_t smote_k = 5;
  Hyperparameters hyper;
};

struct GridCell {
  embed::EmbeddingStrategy strategy;
  ClassifierKind classifier;
  bool balanced = false;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  EvalResult result;
};

struct GridReport {
  std::vector<GridCell> cells;
  NaiveBaseline naive;        // over the whole labelled set
  double a_priori = 0.0;      // 1 / class count
  std::size_t class_count = 0;
};

GridReport run_grid(const std::vector<embed::CompanyRecord>& records,
                    const wordvec::WordVectorTable& table, const GridOptions& options);

/// Tab-separated `strategy classifier data top-1 top-3 train test` rows plus
/// baseline comment lines.
void write_grid_table(std::ostream& out, const GridReport& report);
/// One labelled confusion block per cell.
void write_confusion_grid(std::ostream& out, const GridReport& report);

}  // namespace c2v::evaluate
