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

// Pipeline stages as used by the command line: each one turns the output
// of the previous stage into the input of the next.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "c2v/embed.hpp"
#include "c2v/ingest.hpp"
#include "c2v/reduce.hpp"
#include "c2v/store.hpp"
#include "c2v/wordvec.hpp"

namespace c2v::pipeline {

/// Fetches every URL and reduces each page to its raw channels.
std::vector<ingest::ScrapeRow> scrape(const std::vector<std::string>& urls,
                                      const ingest::FetchOptions& options, unsigned workers);

struct PreprocessInputs {
  std::vector<embed::CompanyRecord> metadata;
  std::vector<ingest::ScrapeRow> scraped;
  std::optional<ingest::ImageLabelIndex> image_labels;
  std::set<std::string> stopwords;
  std::size_t frequent_top_n = 0;
};

struct PreprocessOutput {
  std::vector<embed::CompanyRecord> records;
  std::vector<std::string> warnings;
};

/// Pages that did not answer 200 contribute no tokens. The frequency
/// filter is built over the text channel of every scraped page.
PreprocessOutput preprocess(const PreprocessInputs& inputs);

/// Embedding matrix plus labels as an unreduced snapshot.
store::EngineSnapshot embed(const std::vector<embed::CompanyRecord>& records,
                            const wordvec::WordVectorTable& table,
                            embed::EmbeddingStrategy strategy);

/// Fits the PCA on the snapshot rows and replaces the matrix with its
/// projection. Throws kInput when the snapshot is already reduced. Any
/// segmentation is dropped since it lives in the old space.
store::EngineSnapshot reduce(store::EngineSnapshot snapshot, const reduce::PcaOptions& options);

/// Best of `restarts` seeds starting at `seed`.
store::EngineSnapshot segment(store::EngineSnapshot snapshot, std::size_t k, std::uint64_t seed,
                              std::size_t restarts, std::size_t max_iter);

std::vector<std::uint64_t> seed_range(std::uint64_t seed, std::size_t count);

}  // namespace c2v::pipeline
