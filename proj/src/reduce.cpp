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

#include "c2v/reduce.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "c2v/error.hpp"

namespace c2v::reduce {

namespace {

// Eigenpairs of the scatter matrix XᵀX (descending), computed through the
// smaller of XᵀX and XXᵀ.
void scatter_eigen(const Eigen::MatrixXd& centered, Eigen::VectorXd& values,
                   Eigen::MatrixXd& vectors) {
  const auto n = centered.rows();
  const auto s = centered.cols();
  if (n < s) {
    const Eigen::MatrixXd gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) fail(ErrorCode::kFit, "PCA: eigensolver failed");
    values = solver.eigenvalues().reverse();
    const Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
    vectors.resize(s, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sigma = std::sqrt(std::max(values(i), 0.0));
      if (sigma > 0.0) {
        vectors.col(i) = centered.transpose() * u.col(i) / sigma;
        vectors.col(i).normalize();
      } else {
        vectors.col(i).setZero();
      }
    }
  } else {
    const Eigen::MatrixXd scatter = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
    if (solver.info() != Eigen::Success) fail(ErrorCode::kFit, "PCA: eigensolver failed");
    values = solver.eigenvalues().reverse();
    vectors = solver.eigenvectors().rowwise().reverse();
  }
}

void apply_sign_convention(Vector& component) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < component.size(); ++i) {
    if (std::abs(component[i]) > std::abs(component[best])) best = i;
  }
  if (component[best] < 0.0) {
    for (auto& v : component) v = -v;
  }
}

}  // namespace

PcaModel fit_pca(const std::vector<Vector>& rows, const PcaOptions& options) {
  if (!(options.variance_threshold > 0.0 && options.variance_threshold <= 1.0)) {
    fail(ErrorCode::kInput, "PCA: variance threshold must lie in (0, 1]");
  }
  if (options.max_components == 0) fail(ErrorCode::kInput, "PCA: max_components must be >= 1");
  if (rows.size() < 2) fail(ErrorCode::kFit, "PCA: need at least 2 non-masked rows");
  const std::size_t s = rows.front().size();
  if (s == 0) fail(ErrorCode::kFit, "PCA: zero-dimensional input");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(s));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (row.size() != s) fail(ErrorCode::kInput, "PCA: ragged input rows");
    for (std::size_t c = 0; c < s; ++c) x(r, static_cast<Eigen::Index>(c)) = row[c];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  scatter_eigen(x, values, vectors);

  const double total = x.squaredNorm();
  if (!(total > 0.0)) fail(ErrorCode::kFit, "PCA: input has zero variance");

  // Directions whose variance is indistinguishable from rounding noise are
  // not components.
  const double floor = total * 1e-12;
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(values.size()) &&
         values(static_cast<Eigen::Index>(rank)) > floor) {
    ++rank;
  }

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + s);
  double cumulative = 0.0;
  const std::size_t cap = std::min(options.max_components, rank);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    Vector component(vectors.col(col).data(), vectors.col(col).data() + s);
    apply_sign_convention(component);
    const double ratio = values(col) / total;
    model.components.push_back(std::move(component));
    model.explained_ratio.push_back(ratio);
    cumulative += ratio;
    if (cumulative >= options.variance_threshold - 1e-12) break;
  }
  return model;
}

PcaModel fit_pca(const EmbeddingMatrix& matrix, const PcaOptions& options) {
  std::vector<Vector> rows;
  for (const auto r : matrix.active_rows()) rows.push_back(matrix.row_vector(r));
  return fit_pca(rows, options);
}

namespace {

template <class T>
Vector transform_impl(const PcaModel& model, std::span<const T> v) {
  if (v.size() != model.input_dim()) {
    fail(ErrorCode::kInput, "PCA transform: vector length " + std::to_string(v.size()) +
                                " != model input dim " + std::to_string(model.input_dim()));
  }
  Vector centered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    centered[i] = static_cast<double>(v[i]) - model.mean[i];
  }
  Vector out(model.output_dim());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = dot(std::span<const double>(model.components[c]), std::span<const double>(centered));
  }
  return out;
}

}  // namespace

Vector transform(const PcaModel& model, std::span<const double> v) {
  return transform_impl(model, v);
}

Vector transform(const PcaModel& model, std::span<const float> v) {
  return transform_impl(model, v);
}

Vector reconstruct(const PcaModel& model, std::span<const double> coefficients) {
  if (coefficients.size() != model.output_dim()) {
    fail(ErrorCode::kInput, "PCA reconstruct: coefficient count mismatch");
  }
  Vector out = model.mean;
  for (std::size_t c = 0; c < coefficients.size(); ++c) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coefficients[c] * model.components[c][i];
  }
  return out;
}

double explained_at(const PcaModel& model, std::size_t m) {
  if (m < 1 || m > model.output_dim()) {
    fail(ErrorCode::kInput, "explained_at: m must lie in [1, " +
                                std::to_string(model.output_dim()) + "]");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += model.explained_ratio[i];
  return sum;
}

EmbeddingMatrix transform_matrix(const PcaModel& model, const EmbeddingMatrix& matrix) {
  EmbeddingMatrix out(matrix.ids(), model.output_dim());
  std::vector<std::string> names;
  names.reserve(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) names.push_back(matrix.name(r));
  out.set_names(std::move(names));
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (matrix.masked(r)) continue;
    const Vector projected = transform(model, matrix.row(r));
    out.set_row(r, std::span<const double>(projected));
  }
  return out;
}

void validate(const PcaModel& model, double tolerance) {
  const std::size_t s = model.input_dim();
  if (s == 0) fail(ErrorCode::kFormat, "PCA model: empty mean");
  if (model.explained_ratio.size() != model.output_dim()) {
    fail(ErrorCode::kFormat, "PCA model: ratio count != component count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < model.output_dim(); ++i) {
    const auto& ci = model.components[i];
    if (ci.size() != s) fail(ErrorCode::kFormat, "PCA model: component length mismatch");
    for (std::size_t j = 0; j <= i; ++j) {
      const double d = dot(std::span<const double>(ci), std::span<const double>(model.components[j]));
      const double expected = i == j ? 1.0 : 0.0;
      if (!(std::abs(d - expected) <= tolerance)) {
        fail(ErrorCode::kFormat, "PCA model: components not orthonormal");
      }
    }
    const double r = model.explained_ratio[i];
    if (!(r > 0.0 && r <= 1.0)) fail(ErrorCode::kFormat, "PCA model: ratio outside (0, 1]");
    if (i > 0 && r > model.explained_ratio[i - 1]) {
      fail(ErrorCode::kFormat, "PCA model: explained ratios increase");
    }
    sum += r;
  }
  if (sum > 1.0 + 1e-6) fail(ErrorCode::kFormat, "PCA model: ratios sum above 1");
}

}  // namespace c2v::reduce
