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

#include "c2v/embed.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::embed {

const char* to_string(EmbeddingStrategy strategy) {
  switch (strategy) {
    case EmbeddingStrategy::kText: return "text";
    case EmbeddingStrategy::kImage: return "image";
    case EmbeddingStrategy::kAlt: return "alt";
    case EmbeddingStrategy::kAppendTokens: return "append";
    case EmbeddingStrategy::kConcatVectors: return "concat";
  }
  return "?";
}

EmbeddingStrategy parse_strategy(std::string_view name) {
  const std::string lower = detail::ascii_lower(name);
  if (lower == "text") return EmbeddingStrategy::kText;
  if (lower == "image") return EmbeddingStrategy::kImage;
  if (lower == "alt") return EmbeddingStrategy::kAlt;
  if (lower == "append" || lower == "append_tokens") return EmbeddingStrategy::kAppendTokens;
  if (lower == "concat" || lower == "concat_vectors") return EmbeddingStrategy::kConcatVectors;
  fail(ErrorCode::kInput, "unknown embedding strategy '" + std::string(name) + "'");
}

std::size_t strategy_dim(EmbeddingStrategy strategy, std::size_t word_dim) {
  return strategy == EmbeddingStrategy::kConcatVectors ? 3 * word_dim : word_dim;
}

std::optional<Vector> embed_tokens(const wordvec::WordVectorTable& table, const TokenList& tokens) {
  Vector sum(table.dim(), 0.0);
  std::size_t resolved = 0;
  for (const auto& token : tokens) {
    const auto vec = table.lookup(token);
    if (!vec) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*vec)[d];
    ++resolved;
  }
  if (resolved == 0) return std::nullopt;
  const double inv = 1.0 / static_cast<double>(resolved);
  for (auto& v : sum) v *= inv;
  return sum;
}

CompanyEmbedding embed_company(const CompanyRecord& record, const wordvec::WordVectorTable& table,
                               EmbeddingStrategy strategy) {
  CompanyEmbedding out{record.id, std::nullopt, strategy_dim(strategy, table.dim()), strategy};
  switch (strategy) {
    case EmbeddingStrategy::kText:
      out.vector = embed_tokens(table, record.text_tokens);
      break;
    case EmbeddingStrategy::kImage:
      out.vector = embed_tokens(table, record.image_tokens);
      break;
    case EmbeddingStrategy::kAlt:
      out.vector = embed_tokens(table, record.alt_tokens);
      break;
    case EmbeddingStrategy::kAppendTokens: {
      TokenList all = record.text_tokens;
      all.insert(all.end(), record.image_tokens.begin(), record.image_tokens.end());
      all.insert(all.end(), record.alt_tokens.begin(), record.alt_tokens.end());
      out.vector = embed_tokens(table, all);
      break;
    }
    case EmbeddingStrategy::kConcatVectors: {
      Vector joined;
      joined.reserve(out.dim);
      bool any = false;
      for (const TokenList* channel :
           {&record.text_tokens, &record.image_tokens, &record.alt_tokens}) {
        if (auto mean = embed_tokens(table, *channel)) {
          joined.insert(joined.end(), mean->begin(), mean->end());
          any = true;
        } else {
          joined.insert(joined.end(), table.dim(), 0.0);
        }
      }
      if (any) out.vector = std::move(joined);
      break;
    }
  }
  return out;
}

EmbeddingMatrix build_embedding_matrix(const std::vector<CompanyRecord>& records,
                                       const wordvec::WordVectorTable& table,
                                       EmbeddingStrategy strategy) {
  if (records.empty()) fail(ErrorCode::kInput, "no company records");
  std::vector<std::string> ids;
  std::vector<std::string> names;
  ids.reserve(records.size());
  for (const auto& r : records) {
    ids.push_back(r.id);
    names.push_back(r.name.empty() ? r.id : r.name);
  }
  EmbeddingMatrix matrix(std::move(ids), strategy_dim(strategy, table.dim()));
  matrix.set_names(std::move(names));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto embedding = embed_company(records[i], table, strategy);
    if (embedding.vector) matrix.set_row(i, std::span<const double>(*embedding.vector));
  }
  return matrix;
}

namespace {

TokenList split_tokens(const std::string& column) {
  TokenList tokens;
  if (column.empty()) return tokens;
  for (auto& t : detail::split(column, ';')) {
    t = detail::trim(t);
    if (!t.empty()) tokens.push_back(std::move(t));
  }
  return tokens;
}

std::string join_tokens(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(';');
    out += tokens[i];
  }
  return out;
}

std::optional<std::string> label(const std::string& column) {
  auto trimmed = detail::trim(column);
  if (trimmed.empty()) return std::nullopt;
  return trimmed;
}

}  // namespace

std::vector<CompanyRecord> parse_dataset(std::string_view content) {
  std::vector<CompanyRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split_lines(content)) {
    ++line_no;
    const std::string line = detail::trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() < 5 || cols.size() > 8) {
      fail(ErrorCode::kParse, "dataset line " + std::to_string(line_no) +
                                  ": expected 5-8 tab-separated columns, found " +
                                  std::to_string(cols.size()));
    }
    cols.resize(8);
    CompanyRecord record;
    record.id = detail::trim(cols[0]);
    if (record.id.empty()) fail(ErrorCode::kParse, "dataset line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert(record.id).second) {
      fail(ErrorCode::kInput, "dataset line " + std::to_string(line_no) + ": duplicate id '" +
                                  record.id + "'");
    }
    record.name = cols[1];
    record.url = cols[2];
    record.nace_level1 = label(cols[3]);
    record.nace_level2 = label(cols[4]);
    record.text_tokens = split_tokens(cols[5]);
    record.image_tokens = split_tokens(cols[6]);
    record.alt_tokens = split_tokens(cols[7]);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<CompanyRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read dataset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str());
}

void save_dataset(const std::vector<CompanyRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write dataset " + path.string());
  for (const auto& r : records) {
    out << detail::fold_field(r.id) << '\t' << detail::fold_field(r.name) << '\t'
        << detail::fold_field(r.url) << '\t' << r.nace_level1.value_or("") << '\t'
        << r.nace_level2.value_or("") << '\t' << join_tokens(r.text_tokens) << '\t'
        << join_tokens(r.image_tokens) << '\t' << join_tokens(r.alt_tokens) << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace c2v::embed
