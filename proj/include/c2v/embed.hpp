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

// Company embeddings by averaging pretrained word vectors over a firm's
// token channels.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "c2v/kernels.hpp"
#include "c2v/matrix.hpp"
#include "c2v/preprocess.hpp"
#include "c2v/wordvec.hpp"

namespace c2v::embed {

using preprocess::TokenList;

struct CompanyRecord {
  std::string id;
  std::string name;
  std::string url;
  std::optional<std::string> nace_level1;
  std::optional<std::string> nace_level2;
  TokenList text_tokens;
  TokenList image_tokens;
  TokenList alt_tokens;
};

enum class EmbeddingStrategy { kText, kImage, kAlt, kAppendTokens, kConcatVectors };

const char* to_string(EmbeddingStrategy strategy);
/// Accepts text, image, alt, append, concat (case-insensitive).
EmbeddingStrategy parse_strategy(std::string_view name);
std::size_t strategy_dim(EmbeddingStrategy strategy, std::size_t word_dim);

struct CompanyEmbedding {
  std::string company_id;
  std::optional<Vector> vector;  // absent = empty embedding
  std::size_t dim = 0;
  EmbeddingStrategy strategy = EmbeddingStrategy::kText;
};

/// Mean of the resolvable tokens' vectors; absent when none resolve. The
/// divisor counts resolved tokens only.
std::optional<Vector> embed_tokens(const wordvec::WordVectorTable& table, const TokenList& tokens);

CompanyEmbedding embed_company(const CompanyRecord& record, const wordvec::WordVectorTable& table,
                               EmbeddingStrategy strategy);

/// Row order follows `records`; empty embeddings are masked. Throws kInput
/// on an empty list or duplicate ids.
EmbeddingMatrix build_embedding_matrix(const std::vector<CompanyRecord>& records,
                                       const wordvec::WordVectorTable& table,
                                       EmbeddingStrategy strategy);

/// Company dataset file: tab-separated columns id, name, url, nace_level1,
/// nace_level2, text_tokens, image_tokens, alt_tokens. Token columns are
/// `;`-separated. Empty label columns mean "absent". Lines starting with
/// `#` are comments.
std::vector<CompanyRecord> load_dataset(const std::filesystem::path& path);
std::vector<CompanyRecord> parse_dataset(std::string_view content);
void save_dataset(const std::vector<CompanyRecord>& records, const std::filesystem::path& path);

}  // namespace c2v::embed
