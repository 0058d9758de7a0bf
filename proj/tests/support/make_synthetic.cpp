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

// Writes the bundled synthetic corpus: make_synthetic <out_dir> [seed]

#include <cstdlib>
#include <iostream>

#include "c2v/embed.hpp"
#include "c2v/wordvec.hpp"
#include "synth.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic <out_dir> [seed]\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2026;
  std::filesystem::create_directories(dir);
  const auto corpus = c2v::testing::make_corpus(seed);
  c2v::embed::save_dataset(corpus.records, dir / "dataset.tsv");
  c2v::wordvec::save_word_vectors(corpus.table, dir / "vectors.txt", c2v::wordvec::VectorFormat::kText);
  std::cout << corpus.records.size() << " records, " << corpus.table.size() << " words\n";
  return 0;
}
