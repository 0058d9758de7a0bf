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

#include "c2v/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::evaluate {

LabeledDataset make_labeled_dataset(const EmbeddingMatrix& matrix,
                                    const std::vector<std::optional<std::string>>& labels,
                                    std::size_t min_class_size) {
  if (labels.size() != matrix.rows()) fail(ErrorCode::kInput, "label count does not match rows");
  std::map<std::string, std::size_t> counts;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (!matrix.masked(r) && labels[r]) ++counts[*labels[r]];
  }
  LabeledDataset ds;
  ds.dim = matrix.dim();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (matrix.masked(r) || !labels[r] || counts[*labels[r]] < min_class_size) continue;
    ds.rows.push_back(Sample{matrix.row_vector(r), *labels[r], matrix.id(r), false});
  }
  return ds;
}

std::map<std::string, std::size_t> class_counts(const LabeledDataset& ds) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : ds.rows) ++counts[s.label];
  return counts;
}

namespace {

std::map<std::string, std::vector<std::size_t>> rows_by_class(const LabeledDataset& ds) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) groups[ds.rows[i].label].push_back(i);
  return groups;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::kInput, "test fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> to_test(ds.rows.size(), false);
  for (auto& [label, members] : rows_by_class(ds)) {
    if (members.size() < 2) {
      fail(ErrorCode::kSplit, "class '" + label + "' has a single member and cannot be split");
    }
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    for (std::size_t i = 0; i < n_test; ++i) to_test[members[i]] = true;
  }
  LabeledDataset train{{}, ds.dim};
  LabeledDataset test{{}, ds.dim};
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    (to_test[i] ? test : train).rows.push_back(ds.rows[i]);
  }
  return {std::move(train), std::move(test)};
}

LabeledDataset smote_oversample(const LabeledDataset& train, std::size_t k_neighbors,
                                std::uint64_t seed, std::optional<std::size_t> target) {
  if (k_neighbors < 1) fail(ErrorCode::kInput, "SMOTE: k_neighbors must be >= 1");
  const auto groups = rows_by_class(train);
  std::size_t goal = 0;
  for (const auto& [label, members] : groups) goal = std::max(goal, members.size());
  if (target) goal = *target;

  LabeledDataset out = train;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t serial = 0;
  for (const auto& [label, members] : groups) {
    if (members.size() >= goal) continue;
    if (members.size() < 2) {
      fail(ErrorCode::kResampling, "SMOTE: class '" + label + "' has a single member");
    }
    const std::size_t k = std::min(k_neighbors, members.size() - 1);
    // Brute-force k nearest same-class neighbours (ties by position).
    std::vector<std::vector<std::size_t>> neighbours(members.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
      std::vector<std::pair<double, std::size_t>> dists;
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (a == b) continue;
        dists.emplace_back(squared_distance(std::span<const double>(train.rows[members[a]].x),
                                            std::span<const double>(train.rows[members[b]].x)),
                           b);
      }
      std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k), dists.end());
      for (std::size_t i = 0; i < k; ++i) neighbours[a].push_back(dists[i].second);
    }
    std::uniform_int_distribution<std::size_t> pick_base(0, members.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nb(0, k - 1);
    for (std::size_t s = members.size(); s < goal; ++s) {
      const std::size_t a = pick_base(rng);
      const std::size_t b = neighbours[a][pick_nb(rng)];
      const double lambda = unit(rng);
      const auto& xa = train.rows[members[a]].x;
      const auto& xb = train.rows[members[b]].x;
      Sample synth{Vector(xa.size()), label, "synthetic:" + std::to_string(serial++), true};
      for (std::size_t d = 0; d < xa.size(); ++d) synth.x[d] = xa[d] + lambda * (xb[d] - xa[d]);
      out.rows.push_back(std::move(synth));
    }
  }
  return out;
}

LabeledDataset random_undersample(const LabeledDataset& train, std::size_t target_count,
                                  std::uint64_t seed) {
  if (target_count < 1) fail(ErrorCode::kInput, "undersampling target must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<bool> keep(train.rows.size(), true);
  for (auto& [label, members] : rows_by_class(train)) {
    if (members.size() <= target_count) continue;
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = target_count; i < members.size(); ++i) keep[members[i]] = false;
  }
  LabeledDataset out{{}, train.dim};
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    if (keep[i]) out.rows.push_back(train.rows[i]);
  }
  return out;
}

LabeledDataset balance(const LabeledDataset& train, std::size_t k_neighbors, std::uint64_t seed) {
  auto oversampled = smote_oversample(train, k_neighbors, seed);
  std::size_t common = 0;
  for (const auto& [label, count] : class_counts(oversampled)) common = std::max(common, count);
  return random_undersample(oversampled, std::max<std::size_t>(common, 1), seed + 1);
}

const char* to_string(ClassifierKind kind) {
  return kind == ClassifierKind::kLogisticRegression ? "logreg" : "knn";
}

ClassifierKind parse_classifier(std::string_view name) {
  const auto lower = detail::ascii_lower(name);
  if (lower == "logreg" || lower == "logistic" || lower == "logistic_regression") {
    return ClassifierKind::kLogisticRegression;
  }
  if (lower == "knn") return ClassifierKind::kKnn;
  fail(ErrorCode::kInput, "unknown classifier '" + std::string(name) + "'");
}

double softmax_objective(std::span<const double> params, const std::vector<Vector>& x,
                         std::span<const std::size_t> y, std::size_t classes, double l2,
                         Vector* gradient) {
  const std::size_t dim = x.empty() ? 0 : x.front().size();
  if (params.size() != classes * (dim + 1)) fail(ErrorCode::kInput, "softmax: parameter size");
  const double* w = params.data();
  const double* b = params.data() + classes * dim;
  if (gradient) gradient->assign(params.size(), 0.0);
  double loss = 0.0;
  Vector logits(classes);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
      logits[c] = b[c] + dot(std::span<const double>(w + c * dim, dim), std::span<const double>(x[i]));
      peak = std::max(peak, logits[c]);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(logits[c] - peak);
    const double log_z = peak + std::log(z);
    loss += log_z - logits[y[i]];
    if (!gradient) continue;
    for (std::size_t c = 0; c < classes; ++c) {
      const double coef = std::exp(logits[c] - log_z) - (c == y[i] ? 1.0 : 0.0);
      double* gw = gradient->data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) gw[d] += coef * x[i][d];
      (*gradient)[classes * dim + c] += coef;
    }
  }
  const double inv_n = x.empty() ? 0.0 : 1.0 / static_cast<double>(x.size());
  loss *= inv_n;
  double penalty = 0.0;
  for (std::size_t i = 0; i < classes * dim; ++i) penalty += w[i] * w[i];
  loss += 0.5 * l2 * penalty;
  if (gradient) {
    for (auto& g : *gradient) g *= inv_n;
    for (std::size_t i = 0; i < classes * dim; ++i) (*gradient)[i] += l2 * w[i];
  }
  return loss;
}

ClassifierModel fit_classifier(const LabeledDataset& train, ClassifierKind kind,
                               const Hyperparameters& hyper) {
  ClassifierModel model;
  model.kind_ = kind;
  for (const auto& [label, count] : class_counts(train)) model.classes_.push_back(label);
  if (model.classes_.size() < 2) fail(ErrorCode::kFit, "classifier needs at least two classes");
  std::map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < model.classes_.size(); ++c) class_index[model.classes_[c]] = c;
  std::vector<std::size_t> y;
  y.reserve(train.rows.size());
  for (const auto& s : train.rows) y.push_back(class_index[s.label]);

  if (kind == ClassifierKind::kKnn) {
    if (hyper.knn_k < 1) fail(ErrorCode::kInput, "kNN: k must be >= 1");
    for (const auto& s : train.rows) model.train_x_.push_back(s.x);
    model.train_y_ = std::move(y);
    model.knn_k_ = std::min(hyper.knn_k, model.train_x_.size());
    return model;
  }

  const std::size_t dim = train.dim;
  const std::size_t classes = model.classes_.size();
  model.feature_mean_.assign(dim, 0.0);
  model.feature_scale_.assign(dim, 1.0);
  const auto n = static_cast<double>(train.rows.size());
  for (const auto& s : train.rows) {
    for (std::size_t d = 0; d < dim; ++d) model.feature_mean_[d] += s.x[d] / n;
  }
  Vector var(dim, 0.0);
  for (const auto& s : train.rows) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = s.x[d] - model.feature_mean_[d];
      var[d] += c * c / n;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (var[d] > 0.0) model.feature_scale_[d] = std::sqrt(var[d]);
  }
  std::vector<Vector> xs;
  xs.reserve(train.rows.size());
  for (const auto& s : train.rows) {
    Vector z(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      z[d] = (s.x[d] - model.feature_mean_[d]) / model.feature_scale_[d];
    }
    xs.push_back(std::move(z));
  }

  Vector params(classes * (dim + 1), 0.0);
  Vector grad;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    softmax_objective(params, xs, y, classes, hyper.l2, &grad);
    double largest = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= hyper.learning_rate * grad[i];
      largest = std::max(largest, std::abs(grad[i]));
    }
    if (largest < 1e-8) break;
  }
  model.weights_.assign(classes, Vector(dim));
  model.bias_.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(c * dim), dim, model.weights_[c].begin());
    model.bias_[c] = params[classes * dim + c];
  }
  return model;
}

Vector ClassifierModel::predict_scores(std::span<const double> x) const {
  const std::size_t classes = classes_.size();
  Vector scores(classes, 0.0);
  if (kind_ == ClassifierKind::kKnn) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(train_x_.size());
    for (std::size_t i = 0; i < train_x_.size(); ++i) {
      if (train_x_[i].size() != x.size()) fail(ErrorCode::kInput, "kNN: dimension mismatch");
      dists.emplace_back(squared_distance(x, std::span<const double>(train_x_[i])), i);
    }
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(knn_k_), dists.end());
    for (std::size_t i = 0; i < knn_k_; ++i) {
      scores[train_y_[dists[i].second]] += 1.0 / static_cast<double>(knn_k_);
    }
    return scores;
  }
  if (x.size() != feature_mean_.size()) fail(ErrorCode::kInput, "classifier: dimension mismatch");
  Vector z(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) z[d] = (x[d] - feature_mean_[d]) / feature_scale_[d];
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < classes; ++c) {
    scores[c] = bias_[c] + dot(std::span<const double>(weights_[c]), std::span<const double>(z));
    peak = std::max(peak, scores[c]);
  }
  double total = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - peak);
    total += s;
  }
  for (auto& s : scores) s /= total;
  return scores;
}

namespace {

// Class indices ordered by score, ties in class order.
std::vector<std::size_t> ranking(const Vector& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double top_n_accuracy(const ClassifierModel& model, const LabeledDataset& test, std::size_t n) {
  if (n < 1 || n > model.classes().size()) {
    fail(ErrorCode::kInput, "top-n: n must lie in [1, class count]");
  }
  if (test.rows.empty()) fail(ErrorCode::kEvaluation, "top-n: empty test set");
  std::size_t hits = 0;
  for (const auto& s : test.rows) {
    const auto order = ranking(model.predict_scores(s.x));
    for (std::size_t i = 0; i < n; ++i) {
      if (model.classes()[order[i]] == s.label) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(test.rows.size());
}

EvalResult evaluate_model(const ClassifierModel& model, const LabeledDataset& test) {
  EvalResult result;
  result.classes = model.classes();
  for (const auto& [label, count] : class_counts(test)) {
    if (std::find(result.classes.begin(), result.classes.end(), label) == result.classes.end()) {
      result.classes.push_back(label);
    }
  }
  const std::size_t c = result.classes.size();
  result.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::size_t top1 = 0;
  std::size_t top3 = 0;
  const std::size_t depth = std::min<std::size_t>(3, model.classes().size());
  for (const auto& s : test.rows) {
    const auto order = ranking(model.predict_scores(s.x));
    const auto truth = static_cast<std::size_t>(
        std::find(result.classes.begin(), result.classes.end(), s.label) - result.classes.begin());
    ++result.confusion[truth][order.front()];
    for (std::size_t i = 0; i < depth; ++i) {
      if (model.classes()[order[i]] == s.label) {
        if (i == 0) ++top1;
        ++top3;
        break;
      }
    }
  }
  const auto total = static_cast<double>(test.rows.size());
  result.top1 = test.rows.empty() ? 0.0 : static_cast<double>(top1) / total;
  result.top3 = test.rows.empty() ? 0.0 : static_cast<double>(top3) / total;
  for (std::size_t t = 0; t < c; ++t) {
    const auto row_sum = std::accumulate(result.confusion[t].begin(), result.confusion[t].end(),
                                         std::size_t{0});
    result.per_class_recall.push_back(
        row_sum == 0 ? 0.0 : static_cast<double>(result.confusion[t][t]) / static_cast<double>(row_sum));
  }
  return result;
}

NaiveBaseline naive_baseline(std::span<const std::string> labels) {
  if (labels.empty()) fail(ErrorCode::kInput, "naive baseline: no labels");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  NaiveBaseline best;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best_count = count;
      best.label = label;
    }
  }
  best.probability = static_cast<double>(best_count) / static_cast<double>(labels.size());
  return best;
}

GridReport run_grid(const std::vector<embed::CompanyRecord>& records,
                    const wordvec::WordVectorTable& table, const GridOptions& options) {
  if (options.strategies.empty() || options.classifiers.empty()) {
    fail(ErrorCode::kInput, "evaluation grid needs at least one strategy and one classifier");
  }
  std::vector<std::optional<std::string>> labels;
  std::vector<std::string> present;
  for (const auto& r : records) {
    labels.push_back(options.level == Level::kLevel1 ? r.nace_level1 : r.nace_level2);
    if (labels.back()) present.push_back(*labels.back());
  }
  if (present.empty()) fail(ErrorCode::kEvaluation, "no labelled records at the requested level");

  GridReport report;
  report.naive = naive_baseline(present);
  std::map<std::string, std::size_t> counts;
  for (const auto& l : present) ++counts[l];
  report.class_count = counts.size();
  report.a_priori = 1.0 / static_cast<double>(counts.size());

  for (const auto strategy : options.strategies) {
    const auto matrix = embed::build_embedding_matrix(records, table, strategy);
    const auto ds = make_labeled_dataset(matrix, labels);
    const auto [train, test] = stratified_split(ds, options.test_fraction, options.seed);
    std::vector<std::pair<bool, LabeledDataset>> variants;
    if (options.unbalanced) variants.emplace_back(false, train);
    if (options.balanced) variants.emplace_back(true, balance(train, options.smote_k, options.seed));
    for (const auto& [balanced, fit_set] : variants) {
      for (const auto kind : options.classifiers) {
        const auto model = fit_classifier(fit_set, kind, options.hyper);
        report.cells.push_back(GridCell{strategy, kind, balanced, fit_set.rows.size(),
                                        test.rows.size(), evaluate_model(model, test)});
      }
    }
  }
  return report;
}

void write_grid_table(std::ostream& out, const GridReport& report) {
  out << "# naive top-1\t" << report.naive.label << '\t' << std::fixed << std::setprecision(4)
      << report.naive.probability << '\n';
  out << "# a-priori top-1\t" << report.a_priori << '\n';
  out << "strategy\tclassifier\tdata\ttop1\ttop3\ttrain\ttest\n";
  for (const auto& cell : report.cells) {
    out << embed::to_string(cell.strategy) << '\t' << to_string(cell.classifier) << '\t'
        << (cell.balanced ? "balanced" : "unbalanced") << '\t' << cell.result.top1 << '\t'
        << cell.result.top3 << '\t' << cell.train_rows << '\t' << cell.test_rows << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_confusion_grid(std::ostream& out, const GridReport& report) {
  for (const auto& cell : report.cells) {
    out << "# " << embed::to_string(cell.strategy) << '\t' << to_string(cell.classifier) << '\t'
        << (cell.balanced ? "balanced" : "unbalanced") << '\n';
    out << "true\\pred";
    for (const auto& c : cell.result.classes) out << '\t' << c;
    out << '\n';
    for (std::size_t t = 0; t < cell.result.classes.size(); ++t) {
      out << cell.result.classes[t];
      for (const auto v : cell.result.confusion[t]) out << '\t' << v;
      out << '\n';
    }
    out << '\n';
  }
}

}  // namespace c2v::evaluate
