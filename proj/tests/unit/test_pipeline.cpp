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

#include <doctest.h>

#include "c2v/error.hpp"
#include "c2v/pipeline.hpp"
#include "synth.hpp"

using namespace c2v;
namespace pl = c2v::pipeline;

TEST_CASE("preprocess joins pages, alt text and image labels") {
  pl::PreprocessInputs in;
  in.metadata = store::parse_metadata("F1\tAlpha\thttps://alpha.de\tK\tK64\n"
                                      "F2\tBeta\thttps://beta.de/\tC\tC10\n"
                                      "F3\tGamma\thttps://gamma.de\n");
  in.scraped = {
      {"https://ALPHA.de/", 200, {"Die Bank und die Bank und Kredit 2024", "Logo der Bank", {}}},
      {"beta.de", 404, {"Fehlerseite", "", {}}},
      {"gamma.de", 200, {"Bäckerei und Bank", "", {}}},
  };
  in.image_labels = ingest::ImageLabelIndex::parse("F1\tGeldautomat;Gebäude\nF2\tBrot\n");
  in.stopwords = {"und", "die", "der"};
  in.frequent_top_n = 1;
  const auto out = pl::preprocess(in);
  REQUIRE(out.records.size() == 3);
  // "Bank" is the most frequent word over the 200 pages and is filtered.
  CHECK(out.records[0].text_tokens == preprocess::TokenList{"Kredit"});
  CHECK(out.records[0].alt_tokens == preprocess::TokenList{"Logo"});
  CHECK(out.records[0].image_tokens == preprocess::TokenList{"Geldautomat", "Gebaeude"});
  CHECK(out.records[1].text_tokens.empty());
  CHECK(out.records[1].image_tokens == preprocess::TokenList{"Brot"});
  CHECK(out.records[2].text_tokens == preprocess::TokenList{"Baeckerei"});
  CHECK(out.records[2].image_tokens.empty());
  CHECK(out.records[0].nace_level2 == std::optional<std::string>("K64"));
}

TEST_CASE("stage chaining") {
  const auto corpus = testing::make_corpus(4);
  auto raw = pl::embed(corpus.records, corpus.table, embed::EmbeddingStrategy::kConcatVectors);
  CHECK(raw.matrix.dim() == 3 * corpus.table.dim());
  CHECK(raw.nace_level1.size() == corpus.records.size());
  CHECK_FALSE(raw.pca);

  auto reduced = pl::reduce(raw, {0.9, 20});
  REQUIRE(reduced.pca);
  CHECK(reduced.matrix.dim() == reduced.pca->output_dim());
  CHECK(reduced.pca->output_dim() <= 20);
  CHECK_THROWS_AS(pl::reduce(reduced, {0.9, 20}), Error);

  auto segmented = pl::segment(reduced, 5, 42, 3, 100);
  REQUIRE(segmented.segmentation);
  CHECK(segmented.segmentation->k == 5);
  CHECK(segmented.provenance.seeds.at("segment") == 42);
  CHECK(pl::segment(reduced, 5, 42, 3, 100) == segmented);
  store::check_consistency(segmented);

  CHECK(pl::seed_range(7, 3) == std::vector<std::uint64_t>{7, 8, 9});
  CHECK_THROWS_AS(pl::seed_range(7, 0), Error);
}

TEST_CASE("bundled synthetic corpus matches its generator") {
  const auto dir = std::filesystem::path(C2V_SOURCE_DIR) / "data/synthetic";
  const auto corpus = testing::make_corpus(2026);
  const auto records = embed::load_dataset(dir / "dataset.tsv");
  REQUIRE(records.size() == corpus.records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CAPTURE(i);
    CHECK(records[i].id == corpus.records[i].id);
    CHECK(records[i].nace_level1 == corpus.records[i].nace_level1);
    CHECK(records[i].nace_level2 == corpus.records[i].nace_level2);
    CHECK(records[i].text_tokens == corpus.records[i].text_tokens);
    CHECK(records[i].image_tokens == corpus.records[i].image_tokens);
    CHECK(records[i].alt_tokens == corpus.records[i].alt_tokens);
  }
  CHECK(wordvec::load_word_vectors(dir / "vectors.txt", wordvec::VectorFormat::kText) == corpus.table);
}
