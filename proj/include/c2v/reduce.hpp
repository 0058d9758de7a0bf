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

// Principal component analysis with variance-threshold component selection.

#pragma once

#include <span>
#include <vector>

#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"

namespace c2v::reduce {

inline constexpr double kDefaultVarianceThreshold = 0.90;
inline constexpr std::size_t kDefaultMaxComponents = 100;

struct PcaModel {
  Vector mean;                     // length S
  std::vector<Vector> components;  // S' orthonormal rows of length S, variance-descending
  std::vector<double> explained_ratio;

  std::size_t input_dim() const { return mean.size(); }
  std::size_t output_dim() const { return components.size(); }

  bool operator==(const PcaModel&) const = default;
};

struct PcaOptions {
  double variance_threshold = kDefaultVarianceThreshold;
  std::size_t max_components = kDefaultMaxComponents;
};

/// Fits on the non-masked rows of `matrix`. S' is the smallest m whose
/// cumulative explained ratio reaches the threshold, capped by
/// max_components and by the number of non-zero-variance directions.
/// Each component is flipped so its largest-magnitude coordinate is positive.
PcaModel fit_pca(const EmbeddingMatrix& matrix, const PcaOptions& options = {});

/// Same as fit_pca over explicit rows (each of equal length).
PcaModel fit_pca(const std::vector<Vector>& rows, const PcaOptions& options = {});

/// componentsᵀ · (v - mean).
Vector transform(const PcaModel& model, std::span<const double> v);
Vector transform(const PcaModel& model, std::span<const float> v);

/// mean + Σ coeff_i · component_i.
Vector reconstruct(const PcaModel& model, std::span<const double> coefficients);

/// Cumulative explained ratio of the first m components, 1 <= m <= S'.
double explained_at(const PcaModel& model, std::size_t m);

/// Row-wise transform; masked rows stay masked. Names carry over.
EmbeddingMatrix transform_matrix(const PcaModel& model, const EmbeddingMatrix& matrix);

/// Internal consistency check used by loaders: dims agree, components
/// orthonormal within `tolerance`, ratios in (0,1] and non-increasing.
void validate(const PcaModel& model, double tolerance = 1e-4);

}  // namespace c2v::reduce
