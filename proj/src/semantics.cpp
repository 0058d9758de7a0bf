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

#include "c2v/semantics.hpp"

#include <algorithm>
#include <numeric>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::semantics {

SemanticQueryContext::SemanticQueryContext(const wordvec::WordVectorTable& table,
                                           const reduce::PcaModel& pca, const EmbeddingMatrix& F)
    : table_(&table), pca_(&pca), F_(&F), dim_(pca.output_dim()) {
  if (pca.input_dim() != table.dim()) {
    fail(ErrorCode::kInput, "word vectors have dim " + std::to_string(table.dim()) +
                                " but the PCA expects " + std::to_string(pca.input_dim()));
  }
  if (pca.output_dim() != F.dim()) {
    fail(ErrorCode::kInput, "company matrix dim does not match the PCA output dim");
  }
  words_.reserve(table.size() * dim_);
  word_norms_.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Vector v = reduce::transform(pca, table.vector(i));
    words_.insert(words_.end(), v.begin(), v.end());
    word_norms_.push_back(norm(std::span<const double>(v)));
  }
}

WordQuery top_n_words(const SemanticQueryContext& ctx, std::string_view company_id,
                      std::size_t n) {
  if (n == 0) fail(ErrorCode::kInput, "top-n words: n must be >= 1");
  const auto& F = ctx.companies();
  const auto row = F.find(std::string(company_id));
  if (!row) fail(ErrorCode::kLookup, "unknown company '" + std::string(company_id) + "'");
  WordQuery out;
  if (F.masked(*row) || F.row_norm(*row) == 0.0) {
    out.empty_embedding = true;
    return out;
  }
  const auto company = F.row(*row);
  const double company_norm = F.row_norm(*row);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(ctx.vocabulary_size());
  for (std::size_t i = 0; i < ctx.vocabulary_size(); ++i) {
    if (ctx.word_norm(i) == 0.0) continue;
    const double sim = dot(company, ctx.word_vector(i)) / (company_norm * ctx.word_norm(i));
    scored.emplace_back(std::clamp(sim, -1.0, 1.0), i);
  }
  const auto& table = ctx.table();
  auto before = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return table.word(a.second) < table.word(b.second);
  };
  const std::size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), before);
  for (std::size_t i = 0; i < take; ++i) {
    out.words.push_back(WordMatch{table.word(scored[i].second), scored[i].first});
  }
  return out;
}

namespace {

std::optional<EntityRef> as_company(const SemanticQueryContext& ctx, std::string_view name) {
  const auto& F = ctx.companies();
  const auto row = F.find(std::string(name));
  if (!row || F.masked(*row)) return std::nullopt;
  return EntityRef{EntityKind::kCompany, *row, std::string(name)};
}

std::optional<EntityRef> as_word(const SemanticQueryContext& ctx, std::string_view name) {
  const auto index = ctx.table().find(name);
  if (!index) return std::nullopt;
  return EntityRef{EntityKind::kWord, *index, ctx.table().word(*index)};
}

}  // namespace

EntityRef resolve_entity(const SemanticQueryContext& ctx, std::string_view name) {
  std::optional<EntityRef> found;
  if (name.starts_with("firm:")) {
    found = as_company(ctx, name.substr(5));
  } else if (name.starts_with("word:")) {
    found = as_word(ctx, name.substr(5));
  } else {
    found = as_company(ctx, name);
    if (!found) found = as_word(ctx, name);
  }
  if (!found) fail(ErrorCode::kLookup, "cannot resolve '" + std::string(name) + "' to a vector");
  return *found;
}

Vector entity_vector(const SemanticQueryContext& ctx, const EntityRef& entity) {
  if (entity.kind == EntityKind::kCompany) return ctx.companies().row_vector(entity.index);
  const auto v = ctx.word_vector(entity.index);
  return Vector(v.begin(), v.end());
}

std::vector<AnalogyMatch> analogy(const SemanticQueryContext& ctx, std::string_view a,
                                  std::string_view b, std::string_view c, std::size_t n) {
  if (n == 0) fail(ErrorCode::kInput, "analogy: n must be >= 1");
  const EntityRef ea = resolve_entity(ctx, a);
  const EntityRef eb = resolve_entity(ctx, b);
  const EntityRef ec = resolve_entity(ctx, c);
  const Vector va = entity_vector(ctx, ea);
  const Vector vb = entity_vector(ctx, eb);
  const Vector vc = entity_vector(ctx, ec);
  Vector target(va.size());
  for (std::size_t d = 0; d < target.size(); ++d) target[d] = vb[d] - va[d] + vc[d];
  const double target_norm = norm(std::span<const double>(target));
  if (target_norm == 0.0) return {};

  auto excluded = [&](EntityKind kind, std::size_t index) {
    for (const auto* e : {&ea, &eb, &ec}) {
      if (e->kind == kind && e->index == index) return true;
    }
    return false;
  };
  std::vector<AnalogyMatch> scored;
  const auto& F = ctx.companies();
  for (std::size_t r = 0; r < F.rows(); ++r) {
    if (F.masked(r) || F.row_norm(r) == 0.0 || excluded(EntityKind::kCompany, r)) continue;
    const double sim = dot(std::span<const double>(target), F.row(r)) / (target_norm * F.row_norm(r));
    scored.push_back({EntityRef{EntityKind::kCompany, r, F.id(r)}, std::clamp(sim, -1.0, 1.0)});
  }
  for (std::size_t i = 0; i < ctx.vocabulary_size(); ++i) {
    if (ctx.word_norm(i) == 0.0 || excluded(EntityKind::kWord, i)) continue;
    const double sim =
        dot(std::span<const double>(target), ctx.word_vector(i)) / (target_norm * ctx.word_norm(i));
    scored.push_back(
        {EntityRef{EntityKind::kWord, i, ctx.table().word(i)}, std::clamp(sim, -1.0, 1.0)});
  }
  auto before = [](const AnalogyMatch& x, const AnalogyMatch& y) {
    if (x.similarity != y.similarity) return x.similarity > y.similarity;
    if (x.entity.kind != y.entity.kind) return x.entity.kind == EntityKind::kCompany;
    return x.entity.label < y.entity.label;
  };
  const std::size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), before);
  scored.resize(take);
  return scored;
}

std::vector<MapPoint> project_2d(const EmbeddingMatrix& F) {
  const auto active = F.active_rows();
  if (active.size() < 3) {
    fail(ErrorCode::kInput, "2-D map needs at least three firms with embeddings");
  }
  std::vector<MapPoint> points;
  points.reserve(active.size());
  std::optional<reduce::PcaModel> model;
  try {
    model = reduce::fit_pca(F, reduce::PcaOptions{1.0, 2});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFit) throw;
  }
  for (const auto r : active) {
    MapPoint p{F.id(r), 0.0, 0.0};
    if (model) {
      const Vector coords = reduce::transform(*model, F.row(r));
      p.x = coords[0];
      if (coords.size() > 1) p.y = coords[1];
    }
    points.push_back(std::move(p));
  }
  return points;
}

void write_map_csv(std::ostream& out, const std::vector<MapPoint>& points) {
  out << "company_id,x,y\n";
  for (const auto& p : points) {
    out << p.company_id << ',' << detail::format_double(p.x) << ',' << detail::format_double(p.y)
        << '\n';
  }
}

}  // namespace c2v::semantics
