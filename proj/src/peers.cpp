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

#include "c2v/peers.hpp"

#include <algorithm>
#include <cmath>

#include "c2v/error.hpp"

namespace c2v::peers {

const char* to_string(EmptyReason reason) {
  switch (reason) {
    case EmptyReason::kNone: return "none";
    case EmptyReason::kMaskedQuery: return "query firm has an empty embedding";
    case EmptyReason::kZeroQuery: return "query vector has zero norm";
    case EmptyReason::kAllMembersMasked: return "every portfolio member has an empty embedding";
  }
  return "?";
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInput, "euclidean_distance: length mismatch");
  return std::sqrt(squared_distance(a, b));
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

namespace {

struct Scored {
  double similarity;
  std::uint32_t row;
  bool anchor;
};

// Strict "ranks before" order.
bool ranks_before(const Scored& a, const Scored& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.anchor != b.anchor) return a.anchor;
  return a.row < b.row;
}

bool same_vector(std::span<const double> query, std::span<const float> row) {
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (static_cast<double>(row[i]) != query[i]) return false;
  }
  return true;
}

void check_row(const EmbeddingMatrix& matrix, std::size_t j) {
  if (j >= matrix.rows()) {
    fail(ErrorCode::kInput, "row " + std::to_string(j) + " out of range (K=" +
                                std::to_string(matrix.rows()) + ")");
  }
}

void check_n(const EmbeddingMatrix& matrix, std::size_t n) {
  if (n < 1 || n > matrix.rows()) {
    fail(ErrorCode::kInput, "n=" + std::to_string(n) + " outside [1, " +
                                std::to_string(matrix.rows()) + "]");
  }
}

PeerResult to_result(const EmbeddingMatrix& matrix, const Scored& s) {
  return PeerResult{s.row, matrix.id(s.row), matrix.name(s.row), s.similarity};
}

// Calls emit(Scored) for every candidate row.
template <class Emit>
void score_rows(const EmbeddingMatrix& matrix, std::span<const double> query, double query_norm,
                std::span<const std::size_t> sorted_anchors, Emit&& emit) {
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const double row_norm = matrix.row_norm(r);
    if (matrix.masked(r) || row_norm == 0.0) continue;
    const auto row = matrix.row(r);
    double sim = dot(query, row) / (query_norm * row_norm);
    sim = std::clamp(sim, -1.0, 1.0);
    if (sim > 1.0 - 1e-9 && same_vector(query, row)) sim = 1.0;
    const bool anchor =
        !sorted_anchors.empty() &&
        std::binary_search(sorted_anchors.begin(), sorted_anchors.end(), r);
    emit(Scored{sim, static_cast<std::uint32_t>(r), anchor});
  }
}

}  // namespace

PeerQuery rank_by_vector(const EmbeddingMatrix& matrix, std::span<const double> query,
                         std::size_t n, std::span<const std::size_t> anchors, bool selective) {
  check_n(matrix, n);
  if (query.size() != matrix.dim()) fail(ErrorCode::kInput, "query dimension mismatch");
  PeerQuery out;
  const double query_norm = norm(query);
  if (query_norm == 0.0) {
    out.empty = EmptyReason::kZeroQuery;
    return out;
  }
  std::vector<std::size_t> sorted_anchors(anchors.begin(), anchors.end());
  std::sort(sorted_anchors.begin(), sorted_anchors.end());

  std::vector<Scored> kept;
  if (selective) {
    // Max-heap under ranks_before: the front is the weakest kept entry.
    kept.reserve(n);
    score_rows(matrix, query, query_norm, sorted_anchors, [&](const Scored& s) {
      if (kept.size() < n) {
        kept.push_back(s);
        std::push_heap(kept.begin(), kept.end(), ranks_before);
      } else if (ranks_before(s, kept.front())) {
        std::pop_heap(kept.begin(), kept.end(), ranks_before);
        kept.back() = s;
        std::push_heap(kept.begin(), kept.end(), ranks_before);
      }
    });
    std::sort_heap(kept.begin(), kept.end(), ranks_before);
  } else {
    kept.reserve(matrix.rows());
    score_rows(matrix, query, query_norm, sorted_anchors,
               [&](const Scored& s) { kept.push_back(s); });
    std::sort(kept.begin(), kept.end(), ranks_before);
    if (kept.size() > n) kept.resize(n);
  }
  out.peers.reserve(kept.size());
  for (const auto& s : kept) out.peers.push_back(to_result(matrix, s));
  return out;
}

namespace {

PeerQuery firm_query(const EmbeddingMatrix& matrix, std::size_t j, std::size_t n, bool selective) {
  check_row(matrix, j);
  check_n(matrix, n);
  if (matrix.masked(j)) return PeerQuery{{}, EmptyReason::kMaskedQuery};
  const Vector query = matrix.row_vector(j);
  const std::size_t anchor[] = {j};
  return rank_by_vector(matrix, query, n, anchor, selective);
}

}  // namespace

PeerQuery peers_for_firm(const EmbeddingMatrix& matrix, std::size_t j, std::size_t n) {
  return firm_query(matrix, j, n, false);
}

PeerQuery peers_for_firm_selective(const EmbeddingMatrix& matrix, std::size_t j, std::size_t n) {
  return firm_query(matrix, j, n, true);
}

PeerQuery peers_in_segment(const EmbeddingMatrix& matrix, std::size_t j,
                           std::span<const int> labels) {
  check_row(matrix, j);
  if (labels.size() != matrix.rows()) fail(ErrorCode::kInput, "segment labels do not match rows");
  if (matrix.masked(j)) return PeerQuery{{}, EmptyReason::kMaskedQuery};
  const double query_norm = matrix.row_norm(j);
  if (query_norm == 0.0) return PeerQuery{{}, EmptyReason::kZeroQuery};
  const Vector query = matrix.row_vector(j);
  const int target = labels[j];

  std::vector<Scored> members;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (matrix.masked(r) || labels[r] != target) continue;
    double sim = 0.0;
    if (matrix.row_norm(r) > 0.0) {
      const auto row = matrix.row(r);
      sim = std::clamp(dot(std::span<const double>(query), row) / (query_norm * matrix.row_norm(r)),
                       -1.0, 1.0);
      if (sim > 1.0 - 1e-9 && same_vector(query, row)) sim = 1.0;
    }
    members.push_back(Scored{sim, static_cast<std::uint32_t>(r), r == j});
  }
  std::sort(members.begin(), members.end(), ranks_before);
  PeerQuery out;
  for (const auto& s : members) out.peers.push_back(to_result(matrix, s));
  return out;
}

PeerQuery peers_in_segment(const EmbeddingMatrix& matrix, std::size_t j,
                           const segment::SegmentationModel& model) {
  check_row(matrix, j);
  if (model.dim() != matrix.dim()) fail(ErrorCode::kInput, "segmentation dimension mismatch");
  if (matrix.masked(j)) return PeerQuery{{}, EmptyReason::kMaskedQuery};
  const auto labels = segment::assign_all(model, matrix);
  return peers_in_segment(matrix, j, std::span<const int>(labels));
}

std::optional<PortfolioVector> portfolio_vector(const EmbeddingMatrix& matrix,
                                                std::span<const std::size_t> indices) {
  if (indices.empty()) fail(ErrorCode::kInput, "portfolio is empty");
  PortfolioVector p{Vector(matrix.dim(), 0.0), 0};
  for (const auto j : indices) {
    check_row(matrix, j);
    if (matrix.masked(j)) continue;
    const auto row = matrix.row(j);
    for (std::size_t d = 0; d < row.size(); ++d) p.vector[d] += row[d];
    ++p.member_count;
  }
  if (p.member_count == 0) return std::nullopt;
  if (p.member_count > 1) {
    const double inv = 1.0 / static_cast<double>(p.member_count);
    for (auto& v : p.vector) v *= inv;
  }
  return p;
}

PeerQuery peers_for_portfolio(const EmbeddingMatrix& matrix, std::span<const std::size_t> indices,
                              std::size_t n, bool selective) {
  check_n(matrix, n);
  const auto p = portfolio_vector(matrix, indices);
  if (!p) return PeerQuery{{}, EmptyReason::kAllMembersMasked};
  return rank_by_vector(matrix, p->vector, n, indices, selective);
}

}  // namespace c2v::peers
