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

#include "c2v/pipeline.hpp"

#include "c2v/error.hpp"
#include "c2v/preprocess.hpp"
#include "c2v/segment.hpp"

namespace c2v::pipeline {

std::vector<ingest::ScrapeRow> scrape(const std::vector<std::string>& urls,
                                      const ingest::FetchOptions& options, unsigned workers) {
  std::vector<ingest::ScrapeRow> rows;
  rows.reserve(urls.size());
  for (auto& page : ingest::fetch_pages(urls, options, workers)) {
    ingest::ScrapeRow row{page.url, page.http_status, {}};
    if (page.http_status == 200) row.channels = ingest::extract_channels(page.raw_html);
    rows.push_back(std::move(row));
  }
  return rows;
}

PreprocessOutput preprocess(const PreprocessInputs& inputs) {
  std::vector<std::string> corpus;
  for (const auto& row : inputs.scraped) {
    if (row.http_status == 200) corpus.push_back(row.channels.text);
  }
  const auto filter =
      preprocess::build_frequency_filter(corpus, inputs.stopwords, inputs.frequent_top_n);

  std::vector<std::pair<std::string, store::ScrapedChannels>> scraped;
  for (const auto& row : inputs.scraped) {
    if (row.http_status != 200) continue;
    scraped.emplace_back(row.url,
                         store::ScrapedChannels{
                             preprocess::normalize_and_tokenize(row.channels.text, filter),
                             {},
                             preprocess::normalize_and_tokenize(row.channels.alt, filter)});
  }
  PreprocessOutput out;
  out.records = store::join_metadata(inputs.metadata, scraped, &out.warnings);
  if (inputs.image_labels) {
    for (auto& record : out.records) {
      std::string joined;
      for (const auto& label : inputs.image_labels->labels_for(record.id)) {
        joined += label;
        joined += ' ';
      }
      record.image_tokens = preprocess::normalize_and_tokenize(joined, filter);
    }
  }
  return out;
}

store::EngineSnapshot embed(const std::vector<embed::CompanyRecord>& records,
                            const wordvec::WordVectorTable& table,
                            embed::EmbeddingStrategy strategy) {
  store::EngineSnapshot s;
  s.matrix = embed::build_embedding_matrix(records, table, strategy);
  for (const auto& r : records) {
    s.nace_level1.push_back(r.nace_level1);
    s.nace_level2.push_back(r.nace_level2);
  }
  s.strategy = strategy;
  return s;
}

store::EngineSnapshot reduce(store::EngineSnapshot snapshot, const reduce::PcaOptions& options) {
  if (snapshot.pca) fail(ErrorCode::kInput, "snapshot is already PCA-reduced");
  auto model = reduce::fit_pca(snapshot.matrix, options);
  snapshot.matrix = reduce::transform_matrix(model, snapshot.matrix);
  snapshot.pca = std::move(model);
  snapshot.segmentation.reset();
  snapshot.provenance.seeds.erase("segment");
  return snapshot;
}

std::vector<std::uint64_t> seed_range(std::uint64_t seed, std::size_t count) {
  if (count == 0) fail(ErrorCode::kInput, "need at least one k-means restart");
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < count; ++i) seeds.push_back(seed + i);
  return seeds;
}

store::EngineSnapshot segment(store::EngineSnapshot snapshot, std::size_t k, std::uint64_t seed,
                              std::size_t restarts, std::size_t max_iter) {
  const auto seeds = seed_range(seed, restarts);
  snapshot.segmentation = segment::fit_kmeans_best(snapshot.matrix, k, seeds, max_iter);
  snapshot.provenance.seeds["segment"] = seed;
  return snapshot;
}

}  // namespace c2v::pipeline
