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

// Probes over the joint company/word space. Word vectors are moved into the
// company space with the company-fitted PCA.

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"
#include "c2v/reduce.hpp"
#include "c2v/wordvec.hpp"

namespace c2v::semantics {

/// Borrows the table, model and matrix; they must outlive the context.
/// Construction transforms every vocabulary word once.
class SemanticQueryContext {
 public:
  /// Throws kInput unless pca.input_dim == table.dim and
  /// pca.output_dim == F.dim.
  SemanticQueryContext(const wordvec::WordVectorTable& table, const reduce::PcaModel& pca,
                       const EmbeddingMatrix& F);

  const wordvec::WordVectorTable& table() const { return *table_; }
  const reduce::PcaModel& pca() const { return *pca_; }
  const EmbeddingMatrix& companies() const { return *F_; }

  std::size_t vocabulary_size() const { return word_norms_.size(); }
  /// Harmonised (post-PCA) vector of vocabulary entry `i`.
  std::span<const double> word_vector(std::size_t i) const {
    return {words_.data() + i * dim_, dim_};
  }
  double word_norm(std::size_t i) const { return word_norms_[i]; }

 private:
  const wordvec::WordVectorTable* table_;
  const reduce::PcaModel* pca_;
  const EmbeddingMatrix* F_;
  std::size_t dim_ = 0;
  std::vector<double> words_;
  std::vector<double> word_norms_;
};

struct WordMatch {
  std::string word;
  double similarity = 0.0;

  bool operator==(const WordMatch&) const = default;
};

struct WordQuery {
  std::vector<WordMatch> words;
  bool empty_embedding = false;  // the company has no vector
};

/// The n vocabulary words closest to the company by cosine similarity,
/// descending, equal scores in lexicographic order. n is clamped to the
/// vocabulary size. Throws kLookup for an unknown id, kInput for n == 0.
WordQuery top_n_words(const SemanticQueryContext& ctx, std::string_view company_id,
                      std::size_t n);

enum class EntityKind { kCompany, kWord };

struct EntityRef {
  EntityKind kind = EntityKind::kCompany;
  std::size_t index = 0;  // matrix row or vocabulary index
  std::string label;      // company id or word

  bool operator==(const EntityRef&) const = default;
};

/// "firm:<id>" and "word:<w>" name the kind explicitly. A bare name is
/// tried as a company id first, then as a word. Throws kLookup naming the
/// entity when nothing with a vector matches.
EntityRef resolve_entity(const SemanticQueryContext& ctx, std::string_view name);

/// Post-PCA vector of a resolved entity.
Vector entity_vector(const SemanticQueryContext& ctx, const EntityRef& entity);

struct AnalogyMatch {
  EntityRef entity;
  double similarity = 0.0;
};

/// Vector-offset analogy: entities ranked by cosine to (b - a + c), a, b
/// and c excluded. Candidates are every company with an embedding and every
/// word; equal scores put companies first, then order by label. Empty when
/// the offset vector is zero.
std::vector<AnalogyMatch> analogy(const SemanticQueryContext& ctx, std::string_view a,
                                  std::string_view b, std::string_view c, std::size_t n);

struct MapPoint {
  std::string company_id;
  double x = 0.0;
  double y = 0.0;
};

/// Coordinates on the first two principal components of F's non-masked
/// rows, in row order. The second coordinate is zero when the rows span a
/// single direction. Throws kInput with fewer than three non-masked rows.
std::vector<MapPoint> project_2d(const EmbeddingMatrix& F);

/// `company_id,x,y` header and one line per point.
void write_map_csv(std::ostream& out, const std::vector<MapPoint>& points);

}  // namespace c2v::semantics
