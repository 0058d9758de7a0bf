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

#include "c2v/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "c2v/error.hpp"

namespace c2v::segment {

namespace {

template <class T>
int nearest(const std::vector<Vector>& centroids, std::span<const T> v) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(v, std::span<const double>(centroids[c]));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// k-means++: first centre uniform, then proportional to squared distance to
// the nearest chosen centre.
std::vector<Vector> seed_centroids(const std::vector<Vector>& points, std::size_t k,
                                   std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centroids;
  std::vector<bool> chosen(n, false);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t first = pick(rng);
  centroids.push_back(points[first]);
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = squared_distance(std::span<const double>(points[i]), std::span<const double>(points[first]));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centroids.size() < k) {
    double total = 0.0;
    for (const double d : d2) total += d;
    std::size_t next = n;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        next = i;
        if (acc > target) break;
      }
    }
    if (next == n) {
      // Every remaining point coincides with a centre.
      next = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    chosen[next] = true;
    centroids.push_back(points[next]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(std::span<const double>(points[i]),
                                               std::span<const double>(points[next])));
    }
  }
  return centroids;
}

}  // namespace

int assign_segment(const SegmentationModel& model, std::span<const double> v) {
  if (v.size() != model.dim()) fail(ErrorCode::kInput, "assign_segment: dimension mismatch");
  return nearest(model.centroids, v);
}

int assign_segment(const SegmentationModel& model, std::span<const float> v) {
  if (v.size() != model.dim()) fail(ErrorCode::kInput, "assign_segment: dimension mismatch");
  return nearest(model.centroids, v);
}

SegmentationModel fit_kmeans(const EmbeddingMatrix& matrix, const KMeansOptions& options) {
  const auto active = matrix.active_rows();
  if (options.k < 1 || options.k > active.size()) {
    fail(ErrorCode::kInput, "k-means: k=" + std::to_string(options.k) + " outside [1, " +
                                std::to_string(active.size()) + "]");
  }
  std::vector<Vector> points;
  points.reserve(active.size());
  for (const auto r : active) points.push_back(matrix.row_vector(r));

  std::mt19937_64 rng(options.seed);
  SegmentationModel model;
  model.k = options.k;
  model.seed = options.seed;
  model.centroids = seed_centroids(points, options.k, rng);

  std::vector<int> labels(points.size(), kUnassigned);
  auto assign = [&] {
    bool changed = false;
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int c = nearest(model.centroids, std::span<const double>(points[i]));
      changed |= c != labels[i];
      labels[i] = c;
      total += squared_distance(std::span<const double>(points[i]),
                                std::span<const double>(model.centroids[static_cast<std::size_t>(c)]));
    }
    model.distortion_trace.push_back(total);
    return changed;
  };

  auto update = [&] {
    const std::size_t dim = matrix.dim();
    std::vector<Vector> sums(options.k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(options.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
      ++counts[c];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < options.k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        model.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
      }
    }
    if (empty.empty()) return;
    std::vector<bool> used(points.size(), false);
    for (const auto c : empty) {
      std::size_t far = points.size();
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (used[i]) continue;
        const double d = squared_distance(
            std::span<const double>(points[i]),
            std::span<const double>(model.centroids[static_cast<std::size_t>(labels[i])]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      used[far] = true;
      model.centroids[c] = points[far];
    }
  };

  assign();
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    update();
    ++model.iterations_run;
    if (!assign()) {
      model.converged = true;
      break;
    }
  }

  model.assignments.assign(matrix.rows(), kUnassigned);
  for (std::size_t i = 0; i < active.size(); ++i) model.assignments[active[i]] = labels[i];
  return model;
}

std::vector<int> assign_all(const SegmentationModel& model, const EmbeddingMatrix& matrix) {
  std::vector<int> out(matrix.rows(), kUnassigned);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (!matrix.masked(r)) out[r] = assign_segment(model, matrix.row(r));
  }
  return out;
}

double distortion(const SegmentationModel& model, const EmbeddingMatrix& matrix) {
  if (matrix.dim() != model.dim()) fail(ErrorCode::kInput, "distortion: dimension mismatch");
  double total = 0.0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (matrix.masked(r)) continue;
    const auto c = static_cast<std::size_t>(assign_segment(model, matrix.row(r)));
    total += squared_distance(matrix.row(r), std::span<const double>(model.centroids[c]));
  }
  return total;
}

SegmentationModel fit_kmeans_best(const EmbeddingMatrix& matrix, std::size_t k,
                                  std::span<const std::uint64_t> seeds, std::size_t max_iter) {
  if (seeds.empty()) fail(ErrorCode::kInput, "k-means sweep: no seeds");
  std::optional<SegmentationModel> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto seed : seeds) {
    auto model = fit_kmeans(matrix, {k, seed, max_iter});
    const double d = distortion(model, matrix);
    if (d < best_d) {
      best_d = d;
      best = std::move(model);
    }
  }
  return std::move(*best);
}

std::vector<ElbowPoint> distortion_curve(const EmbeddingMatrix& matrix, std::size_t k_min,
                                         std::size_t k_max, std::span<const std::uint64_t> seeds,
                                         std::size_t max_iter) {
  if (k_min < 1 || k_min > k_max) fail(ErrorCode::kInput, "distortion curve: need 1 <= k_min <= k_max");
  std::vector<ElbowPoint> curve;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const auto model = fit_kmeans_best(matrix, k, seeds, max_iter);
    curve.push_back({k, distortion(model, matrix)});
  }
  return curve;
}

std::size_t elbow_k(const std::vector<ElbowPoint>& curve) {
  if (curve.size() < 3) fail(ErrorCode::kInput, "elbow: need at least three points");
  const double k0 = static_cast<double>(curve.front().k);
  const double k1 = static_cast<double>(curve.back().k);
  double d_min = curve.front().distortion;
  double d_max = curve.front().distortion;
  for (const auto& p : curve) {
    d_min = std::min(d_min, p.distortion);
    d_max = std::max(d_max, p.distortion);
  }
  if (d_max == d_min) return curve.front().k;
  // Kneedle: on a decreasing convex curve scaled to the unit square, the
  // knee is the point farthest below the chord from (0, 1) to (1, 0).
  std::size_t best = curve.front().k;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    const double x = (static_cast<double>(p.k) - k0) / (k1 - k0);
    const double y = (p.distortion - d_min) / (d_max - d_min);
    const double gap = (1.0 - x) - y;
    if (gap > best_gap) {
      best_gap = gap;
      best = p.k;
    }
  }
  return best;
}

CentroidSet centroid_matrix(const SegmentationModel& model,
                            const std::vector<std::optional<std::string>>& labels) {
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < model.k; ++c) ids.push_back("centroid_" + std::to_string(c));
  CentroidSet out{EmbeddingMatrix(std::move(ids), model.dim()), {}};
  for (std::size_t c = 0; c < model.k; ++c) {
    out.centroids.set_row(c, std::span<const double>(model.centroids[c]));
  }
  std::vector<std::map<std::string, std::size_t>> votes(model.k);
  for (std::size_t r = 0; r < model.assignments.size() && r < labels.size(); ++r) {
    if (model.assignments[r] == kUnassigned || !labels[r]) continue;
    ++votes[static_cast<std::size_t>(model.assignments[r])][*labels[r]];
  }
  for (const auto& tally : votes) {
    std::optional<std::string> winner;
    std::size_t best = 0;
    for (const auto& [label, count] : tally) {  // map order: ties keep the smallest label
      if (count > best) {
        best = count;
        winner = label;
      }
    }
    out.labels.push_back(std::move(winner));
  }
  return out;
}

void validate(const SegmentationModel& model, std::size_t rows, std::size_t dim) {
  if (model.k == 0 || model.centroids.size() != model.k) {
    fail(ErrorCode::kFormat, "segmentation: centroid count does not match k");
  }
  for (const auto& c : model.centroids) {
    if (c.size() != dim) fail(ErrorCode::kFormat, "segmentation: centroid dimension mismatch");
    for (const double v : c) {
      if (!std::isfinite(v)) fail(ErrorCode::kFormat, "segmentation: non-finite centroid");
    }
  }
  if (model.assignments.size() != rows) {
    fail(ErrorCode::kFormat, "segmentation: assignment count does not match rows");
  }
  for (const int a : model.assignments) {
    if (a < kUnassigned || a >= static_cast<int>(model.k)) {
      fail(ErrorCode::kFormat, "segmentation: assignment out of range");
    }
  }
}

}  // namespace c2v::segment
