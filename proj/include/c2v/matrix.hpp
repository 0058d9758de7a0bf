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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "c2v/kernels.hpp"

namespace c2v {

/// K x S' company embedding matrix. Rows are float32; a masked row is a firm
/// with an empty embedding and never takes part in similarity math.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// All rows start masked. Names default to ids.
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim);

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  const std::string& name(std::size_t row) const { return names_[row]; }
  void set_names(std::vector<std::string> names);

  std::span<const float> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }
  Vector row_vector(std::size_t r) const;
  bool masked(std::size_t r) const { return mask_[r] != 0; }
  /// Euclidean norm of the stored (float32) row; 0 for masked rows.
  double row_norm(std::size_t r) const { return norms_[r]; }

  void set_row(std::size_t r, std::span<const double> values);
  void set_row(std::size_t r, std::span<const float> values);
  void mask_row(std::size_t r);

  std::size_t active_count() const;
  std::vector<std::size_t> active_rows() const;
  std::optional<std::size_t> find(const std::string& id) const;

  /// Raw float32 storage, row-major; masked rows hold zeros.
  std::span<const float> data() const { return data_; }

  bool operator==(const EmbeddingMatrix& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && names_ == other.names_ &&
           mask_ == other.mask_ && data_ == other.data_;
  }

 private:
  void refresh_norm(std::size_t r);

  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<float> data_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace c2v
