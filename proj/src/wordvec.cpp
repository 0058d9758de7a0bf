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

#include "c2v/wordvec.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "c2v/error.hpp"
#include "c2v/kernels.hpp"
#include "text_util.hpp"

namespace c2v::wordvec {

static_assert(std::endian::native == std::endian::little,
              "binary vector I/O assumes a little-endian host");

void WordVectorTable::add(std::string word, std::span<const float> vector) {
  if (vector.size() != dim_) {
    fail(ErrorCode::kInput, "word vector for '" + word + "' has length " +
                                std::to_string(vector.size()) + ", expected " +
                                std::to_string(dim_));
  }
  if (index_.contains(word)) fail(ErrorCode::kInput, "duplicate word '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> WordVectorTable::find(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
  if (auto it = index_.find(detail::ascii_lower(word)); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::span<const float>> WordVectorTable::lookup(std::string_view word) const {
  if (auto idx = find(word)) return vector(*idx);
  return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::kParse, "word vectors line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

WordVectorTable parse_text_vectors(std::string_view content) {
  const auto lines = detail::split_lines(content);
  std::size_t line_no = 0;
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) fail(ErrorCode::kParse, "word vectors: empty file");

  std::size_t expected_count = 0;
  std::size_t dim = 0;
  bool has_header = false;
  {
    const auto head = fields(lines[first]);
    std::size_t j = 0;
    std::size_t s = 0;
    if (head.size() == 2 && parse_number(head[0], j) && parse_number(head[1], s)) {
      if (s == 0) parse_error(first + 1, "header declares dimension 0");
      has_header = true;
      expected_count = j;
      dim = s;
      ++first;
    }
  }
  WordVectorTable table;
  std::vector<float> buffer;
  for (std::size_t i = first; i < lines.size(); ++i) {
    line_no = i + 1;
    const std::string line = detail::trim_cr(lines[i]);
    const auto parts = fields(line);
    if (parts.empty()) continue;
    if (dim == 0) {
      if (parts.size() < 2) parse_error(line_no, "no vector values");
      dim = parts.size() - 1;
    }
    if (table.dim() == 0) table = WordVectorTable(dim);
    if (parts.size() != dim + 1) {
      parse_error(line_no, "expected " + std::to_string(dim) + " values, found " +
                               std::to_string(parts.size() - 1));
    }
    buffer.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_number(parts[d + 1], buffer[d]) || !std::isfinite(buffer[d])) {
        parse_error(line_no, "bad value '" + std::string(parts[d + 1]) + "'");
      }
    }
    if (table.find(parts[0]) && table.word(*table.find(parts[0])) == parts[0]) {
      parse_error(line_no, "duplicate word '" + std::string(parts[0]) + "'");
    }
    table.add(std::string(parts[0]), buffer);
  }
  if (table.size() == 0) fail(ErrorCode::kParse, "word vectors: no entries");
  if (has_header && expected_count != table.size()) {
    fail(ErrorCode::kParse, "word vectors: header declares " + std::to_string(expected_count) +
                                " entries, found " + std::to_string(table.size()));
  }
  return table;
}

WordVectorTable parse_binary_vectors(std::string_view content) {
  const auto newline = content.find('\n');
  if (content.empty() || newline == std::string_view::npos) {
    fail(ErrorCode::kParse, "binary word vectors: missing header");
  }
  const auto head = fields(detail::trim_cr(content.substr(0, newline)));
  std::size_t count = 0;
  std::size_t dim = 0;
  if (head.size() != 2 || !parse_number(head[0], count) || !parse_number(head[1], dim) ||
      dim == 0) {
    fail(ErrorCode::kParse, "binary word vectors: bad header");
  }
  WordVectorTable table(dim);
  std::vector<float> buffer(dim);
  std::size_t pos = newline + 1;
  for (std::size_t e = 0; e < count; ++e) {
    while (pos < content.size() && (content[pos] == '\n' || content[pos] == ' ')) ++pos;
    const auto space = content.find(' ', pos);
    if (space == std::string_view::npos || space == pos) {
      fail(ErrorCode::kParse, "binary word vectors: truncated at entry " + std::to_string(e + 1));
    }
    std::string word(content.substr(pos, space - pos));
    pos = space + 1;
    const std::size_t bytes = dim * sizeof(float);
    if (content.size() - pos < bytes) {
      fail(ErrorCode::kParse, "binary word vectors: truncated vector at entry " +
                                  std::to_string(e + 1));
    }
    std::memcpy(buffer.data(), content.data() + pos, bytes);
    pos += bytes;
    for (const float v : buffer) {
      if (!std::isfinite(v)) {
        fail(ErrorCode::kParse, "binary word vectors: non-finite value for '" + word + "'");
      }
    }
    if (table.find(word) && table.word(*table.find(word)) == word) {
      fail(ErrorCode::kParse, "binary word vectors: duplicate word '" + word + "'");
    }
    table.add(std::move(word), buffer);
  }
  if (count == 0) fail(ErrorCode::kParse, "binary word vectors: no entries");
  return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path, VectorFormat format) {
  const std::string content = read_file(path);
  if (content.empty()) fail(ErrorCode::kParse, "word vectors: empty file " + path.string());
  return format == VectorFormat::kText ? parse_text_vectors(content)
                                       : parse_binary_vectors(content);
}

void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path,
                       VectorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto vec = table.vector(i);
    if (format == VectorFormat::kBinary) {
      out << table.word(i) << ' ';
      out.write(reinterpret_cast<const char*>(vec.data()),
                static_cast<std::streamsize>(vec.size() * sizeof(float)));
      continue;
    }
    out << table.word(i);
    char buf[32];
    for (const float v : vec) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

SimilarityDataset parse_similarity_dataset(std::string_view content) {
  SimilarityDataset ds;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split_lines(content)) {
    ++line_no;
    const std::string line = detail::trim_cr(raw);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto parts = detail::split(line, '\t');
    double score = 0.0;
    if (parts.size() != 3 || !parse_number(std::string_view(parts[2]), score) ||
        !std::isfinite(score)) {
      fail(ErrorCode::kParse,
           "similarity dataset line " + std::to_string(line_no) + ": expected a<TAB>b<TAB>score");
    }
    ds.pairs.push_back({parts[0], parts[1], score});
  }
  return ds;
}

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path) {
  return parse_similarity_dataset(read_file(path));
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorCode::kEvaluation, "correlation undefined for a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_correlation(rx, ry);
}

EvalReport evaluate_similarity_dataset(const WordVectorTable& table, const SimilarityDataset& ds,
                                       Correlation kind) {
  if (ds.pairs.empty()) fail(ErrorCode::kInput, "similarity dataset is empty");
  std::vector<double> gold;
  std::vector<double> model;
  for (const auto& pair : ds.pairs) {
    const auto a = table.lookup(pair.a);
    const auto b = table.lookup(pair.b);
    if (!a || !b) continue;
    gold.push_back(pair.gold);
    model.push_back(cosine_similarity(*a, *b));
  }
  if (gold.size() < 3) {
    fail(ErrorCode::kEvaluation, "only " + std::to_string(gold.size()) +
                                     " in-vocabulary pairs; need at least 3");
  }
  EvalReport report;
  report.pairs_used = gold.size();
  report.pairs_total = ds.pairs.size();
  report.coverage = static_cast<double>(gold.size()) / static_cast<double>(ds.pairs.size());
  report.spearman = spearman_correlation(model, gold);
  report.pearson = pearson_correlation(model, gold);
  report.correlation = kind == Correlation::kSpearman ? report.spearman : report.pearson;
  return report;
}

}  // namespace c2v::wordvec
