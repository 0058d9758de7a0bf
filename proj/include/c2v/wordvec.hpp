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

// Pretrained word-vector tables and their intrinsic evaluation.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace c2v::wordvec {

enum class VectorFormat { kText, kBinary };

/// Vocabulary -> S-dimensional float32 vectors. Immutable once built.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  explicit WordVectorTable(std::size_t dim) : dim_(dim) {}

  /// Appends an entry; throws kInput on a duplicate word or wrong length.
  void add(std::string word, std::span<const float> vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t index) const { return words_[index]; }
  std::span<const float> vector(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }

  /// Exact match first, then the lowercased query.
  std::optional<std::size_t> find(std::string_view word) const;
  std::optional<std::span<const float>> lookup(std::string_view word) const;

  bool operator==(const WordVectorTable& other) const {
    return dim_ == other.dim_ && words_ == other.words_ && data_ == other.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text: optional "J S" header, then "word v1 ... vS" lines.
/// Binary: "J S\n" header, then per entry the word, one space and S
/// little-endian IEEE-754 float32 values.
WordVectorTable load_word_vectors(const std::filesystem::path& path, VectorFormat format);
WordVectorTable parse_text_vectors(std::string_view content);
WordVectorTable parse_binary_vectors(std::string_view content);
void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path,
                       VectorFormat format);

struct WordPair {
  std::string a;
  std::string b;
  double gold = 0.0;
};

struct SimilarityDataset {
  std::vector<WordPair> pairs;
};

/// Lines `word_a<TAB>word_b<TAB>score`; `#` comments and blank lines skipped.
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path);
SimilarityDataset parse_similarity_dataset(std::string_view content);

enum class Correlation { kSpearman, kPearson };

struct EvalReport {
  double correlation = 0.0;  // the requested correlation type
  double spearman = 0.0;
  double pearson = 0.0;
  double coverage = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_total = 0;
};

/// Pairs with both words in vocabulary contribute their cosine score;
/// out-of-vocabulary pairs are excluded, not scored. Throws kEvaluation with
/// fewer than three contributing pairs.
EvalReport evaluate_similarity_dataset(const WordVectorTable& table, const SimilarityDataset& ds,
                                       Correlation kind = Correlation::kSpearman);

/// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);
double pearson_correlation(std::span<const double> x, std::span<const double> y);
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace c2v::wordvec
