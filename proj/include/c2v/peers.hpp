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

// Peer-firm retrieval over a company embedding matrix: firm-centric top-n,
// industry-centric (same k-means segment) and portfolio-centric queries.
//
// Ranking is by cosine similarity, descending. Equal similarities are
// ordered anchors first (the query firm, or the portfolio members), then by
// ascending row index. Rows that are bitwise equal to the query vector score
// exactly 1.0. Masked and zero-norm rows are never candidates.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"
#include "c2v/segment.hpp"

namespace c2v::peers {

struct PeerResult {
  std::size_t row = 0;
  std::string company_id;
  std::string name;
  double similarity = 0.0;

  bool operator==(const PeerResult&) const = default;
};

enum class EmptyReason {
  kNone,
  kMaskedQuery,       // the query firm has no embedding
  kZeroQuery,         // the query vector has zero norm
  kAllMembersMasked,  // no portfolio member has an embedding
};

const char* to_string(EmptyReason reason);

/// A ranked answer or the empty-result signal (`empty != kNone`).
struct PeerQuery {
  std::vector<PeerResult> peers;
  EmptyReason empty = EmptyReason::kNone;
  bool sorted_by_similarity = true;

  bool ok() const { return empty == EmptyReason::kNone; }
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);
/// 1 - cos, in [0, 2]. Throws kDomain on a zero-norm input.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Top-n by complete sort of all K scores. The query firm is result[0].
PeerQuery peers_for_firm(const EmbeddingMatrix& matrix, std::size_t j, std::size_t n);

/// Same contract as peers_for_firm using one pass with a bounded selection
/// structure of size n instead of sorting all scores.
PeerQuery peers_for_firm_selective(const EmbeddingMatrix& matrix, std::size_t j, std::size_t n);

/// Every non-masked firm sharing the query firm's segment. Membership is
/// the segmentation function applied to each row; `labels` (from
/// segment::assign_all) may be passed to reuse precomputed assignments.
/// The result carries cosine-to-query and is similarity-sorted.
PeerQuery peers_in_segment(const EmbeddingMatrix& matrix, std::size_t j,
                           const segment::SegmentationModel& model);
PeerQuery peers_in_segment(const EmbeddingMatrix& matrix, std::size_t j,
                           std::span<const int> labels);

struct PortfolioVector {
  Vector vector;
  std::size_t member_count = 0;  // members with an embedding (the divisor)
};

/// Mean of the members' embeddings, skipping masked members. Absent when
/// every member is masked.
std::optional<PortfolioVector> portfolio_vector(const EmbeddingMatrix& matrix,
                                                std::span<const std::size_t> indices);

PeerQuery peers_for_portfolio(const EmbeddingMatrix& matrix, std::span<const std::size_t> indices,
                              std::size_t n, bool selective = true);

/// Ranks all candidates against an arbitrary query vector. `anchors` are
/// rows that win similarity ties.
PeerQuery rank_by_vector(const EmbeddingMatrix& matrix, std::span<const double> query,
                         std::size_t n, std::span<const std::size_t> anchors, bool selective);

}  // namespace c2v::peers
