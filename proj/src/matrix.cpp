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

#include "c2v/matrix.hpp"

#include <algorithm>

#include "c2v/error.hpp"

namespace c2v {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim)
    : dim_(dim),
      ids_(std::move(ids)),
      names_(ids_),
      data_(ids_.size() * dim, 0.0f),
      mask_(ids_.size(), 1),
      norms_(ids_.size(), 0.0) {
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) {
      fail(ErrorCode::kInput, "duplicate company id '" + ids_[r] + "'");
    }
  }
}

void EmbeddingMatrix::set_names(std::vector<std::string> names) {
  if (names.size() != ids_.size()) fail(ErrorCode::kInput, "name count does not match rows");
  names_ = std::move(names);
}

Vector EmbeddingMatrix::row_vector(std::size_t r) const {
  const auto values = row(r);
  return Vector(values.begin(), values.end());
}

void EmbeddingMatrix::set_row(std::size_t r, std::span<const double> values) {
  if (values.size() != dim_) fail(ErrorCode::kInput, "row length does not match matrix dim");
  std::transform(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_),
                 [](double v) { return static_cast<float>(v); });
  mask_[r] = 0;
  refresh_norm(r);
}

void EmbeddingMatrix::set_row(std::size_t r, std::span<const float> values) {
  if (values.size() != dim_) fail(ErrorCode::kInput, "row length does not match matrix dim");
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
  mask_[r] = 0;
  refresh_norm(r);
}

void EmbeddingMatrix::mask_row(std::size_t r) {
  std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(r * dim_), dim_, 0.0f);
  mask_[r] = 1;
  norms_[r] = 0.0;
}

void EmbeddingMatrix::refresh_norm(std::size_t r) { norms_[r] = norm(row(r)); }

std::size_t EmbeddingMatrix::active_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 0));
}

std::vector<std::size_t> EmbeddingMatrix::active_rows() const {
  std::vector<std::size_t> out;
  out.reserve(rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    if (!mask_[r]) out.push_back(r);
  }
  return out;
}

std::optional<std::size_t> EmbeddingMatrix::find(const std::string& id) const {
  if (auto it = index_.find(id); it != index_.end()) return it->second;
  return std::nullopt;
}

}  // namespace c2v
