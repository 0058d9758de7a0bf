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

// k-means segmentation of company embeddings (Lloyd iterations, k-means++
// seeding, Euclidean distance).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"

namespace c2v::segment {

inline constexpr std::size_t kDefaultClusters = 400;
inline constexpr int kUnassigned = -1;

struct SegmentationModel {
  std::size_t k = 0;
  std::vector<Vector> centroids;
  std::vector<int> assignments;  // per matrix row; kUnassigned for masked rows
  std::uint64_t seed = 0;
  std::size_t iterations_run = 0;
  bool converged = false;
  std::vector<double> distortion_trace;  // distortion after every assignment step

  std::size_t dim() const { return centroids.empty() ? 0 : centroids.front().size(); }
  bool operator==(const SegmentationModel&) const = default;
};

struct KMeansOptions {
  std::size_t k = kDefaultClusters;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
};

/// Lloyd's algorithm from a seeded k-means++ start. Stops at an assignment
/// fixpoint or after max_iter updates; assignments always equal the nearest
/// centroid of the final model. A cluster left empty by an update is
/// re-seeded at the point farthest from its assigned centroid.
SegmentationModel fit_kmeans(const EmbeddingMatrix& matrix, const KMeansOptions& options);

/// Nearest centroid by Euclidean distance; ties go to the lowest index.
int assign_segment(const SegmentationModel& model, std::span<const double> v);
int assign_segment(const SegmentationModel& model, std::span<const float> v);

/// Labels for every row of `matrix` (kUnassigned where masked).
std::vector<int> assign_all(const SegmentationModel& model, const EmbeddingMatrix& matrix);

/// Σ over non-masked rows of the squared distance to the assigned centroid.
double distortion(const SegmentationModel& model, const EmbeddingMatrix& matrix);

/// Best-of-seeds fit: the lowest-distortion model among `seeds`.
SegmentationModel fit_kmeans_best(const EmbeddingMatrix& matrix, std::size_t k,
                                  std::span<const std::uint64_t> seeds, std::size_t max_iter);

struct ElbowPoint {
  std::size_t k = 0;
  double distortion = 0.0;
};

/// Distortion for each k in [k_min, k_max], each the best over `seeds`.
std::vector<ElbowPoint> distortion_curve(const EmbeddingMatrix& matrix, std::size_t k_min,
                                         std::size_t k_max, std::span<const std::uint64_t> seeds,
                                         std::size_t max_iter);

/// The knee of the curve: with both axes scaled to [0, 1], the point lying
/// farthest below the chord joining the end points. Needs at least three
/// points.
std::size_t elbow_k(const std::vector<ElbowPoint>& curve);

struct CentroidSet {
  EmbeddingMatrix centroids;  // ids "centroid_0", ...
  std::vector<std::optional<std::string>> labels;  // member majority, ties -> smallest
};

/// Centroid rows, each labelled with the majority label of its members.
/// `labels` is indexed by matrix row; absent labels do not vote.
CentroidSet centroid_matrix(const SegmentationModel& model,
                            const std::vector<std::optional<std::string>>& labels);

/// Loader-side consistency check.
void validate(const SegmentationModel& model, std::size_t rows, std::size_t dim);

}  // namespace c2v::segment
