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

// Text normalisation for German company webpages.
//
// The pipeline order is fixed:
//   1. strip HTML tags and hyperlinks
//   2. transliterate umlauts and sharp s (ä -> ae, ß -> ss, ...)
//   3. drop every character that is not an ASCII letter, underscore or
//      whitespace (other non-ASCII letters are dropped, not transliterated)
//   4. split on whitespace
//   5. drop stopwords and corpus-frequent words (case-insensitive)
//   6. drop tokens shorter than two characters
// Case is preserved in the output.

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace c2v::preprocess {

using TokenList = std::vector<std::string>;

class FrequencyFilter {
 public:
  FrequencyFilter() = default;
  /// Entries are normalised (transliterated, lowercased) on construction.
  FrequencyFilter(const std::set<std::string>& stopwords,
                  const std::set<std::string>& frequent_words, std::size_t top_n);

  const std::set<std::string>& stopwords() const { return stopwords_; }
  const std::set<std::string>& frequent_words() const { return frequent_words_; }
  std::size_t top_n() const { return top_n_; }

  /// Case-insensitive membership in either set.
  bool excludes(std::string_view token) const;

 private:
  std::set<std::string> stopwords_;
  std::set<std::string> frequent_words_;
  std::size_t top_n_ = 0;
};

/// Steps 1-4 only: no filtering, no length rule.
TokenList split_normalized(std::string_view raw);

TokenList normalize_and_tokenize(std::string_view raw, const FrequencyFilter& filter);

/// UTF-8, one word per line, `#` starts a comment.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

/// frequent_words = the `top_n` most frequent lowercase tokens across the
/// corpus after steps 1-4; equal counts are broken lexicographically.
FrequencyFilter build_frequency_filter(const std::vector<std::string>& corpus,
                                       const std::set<std::string>& stopwords,
                                       std::size_t top_n);
FrequencyFilter build_frequency_filter(const std::vector<std::string>& corpus,
                                       const std::filesystem::path& stopword_file,
                                       std::size_t top_n);

}  // namespace c2v::preprocess
