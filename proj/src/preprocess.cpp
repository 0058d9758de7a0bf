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

#include "c2v/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::preprocess {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Step 1. Tags and hyperlinks become separators.
std::string strip_markup(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c == '<') {
      const auto close = raw.find('>', i);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    const bool word_start = i == 0 || is_space(raw[i - 1]) || raw[i - 1] == '>' ||
                            raw[i - 1] == '"' || raw[i - 1] == '(';
    if (word_start) {
      const auto rest = raw.substr(i);
      const auto lower = detail::ascii_lower(rest.substr(0, 8));
      if (lower.rfind("http://", 0) == 0 || lower.rfind("https://", 0) == 0 ||
          lower.rfind("www.", 0) == 0) {
        while (i < raw.size() && !is_space(raw[i]) && raw[i] != '<') ++i;
        out.push_back(' ');
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

// Decodes one code point; invalid UTF-8 bytes are taken as Latin-1.
std::uint32_t next_codepoint(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  }
  if (len == 0 || i + len > s.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

// Steps 2 and 3.
std::string transliterate_and_filter(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint32_t cp = next_codepoint(s, i);
    switch (cp) {
      case 0xE4: out += "ae"; continue;
      case 0xF6: out += "oe"; continue;
      case 0xFC: out += "ue"; continue;
      case 0xC4: out += "Ae"; continue;
      case 0xD6: out += "Oe"; continue;
      case 0xDC: out += "Ue"; continue;
      case 0xDF: out += "ss"; continue;
      default: break;
    }
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(c);
      } else if (is_space(c)) {
        out.push_back(' ');
      }
    } else if (cp == 0xA0) {
      out.push_back(' ');
    }
  }
  return out;
}

std::string normalize_entry(std::string_view word) {
  const auto tokens = split_normalized(word);
  std::string joined;
  for (const auto& t : tokens) joined += t;
  return detail::ascii_lower(joined);
}

std::set<std::string> normalize_set(const std::set<std::string>& words) {
  std::set<std::string> out;
  for (const auto& w : words) {
    auto n = normalize_entry(w);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

}  // namespace

FrequencyFilter::FrequencyFilter(const std::set<std::string>& stopwords,
                                 const std::set<std::string>& frequent_words, std::size_t top_n)
    : stopwords_(normalize_set(stopwords)),
      frequent_words_(normalize_set(frequent_words)),
      top_n_(top_n) {
  if (frequent_words_.size() > top_n_) {
    fail(ErrorCode::kInput, "frequent word set larger than top_n");
  }
}

bool FrequencyFilter::excludes(std::string_view token) const {
  if (stopwords_.empty() && frequent_words_.empty()) return false;
  const std::string lower = detail::ascii_lower(token);
  return stopwords_.contains(lower) || frequent_words_.contains(lower);
}

TokenList split_normalized(std::string_view raw) {
  const std::string cleaned = transliterate_and_filter(strip_markup(raw));
  TokenList tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

TokenList normalize_and_tokenize(std::string_view raw, const FrequencyFilter& filter) {
  TokenList tokens = split_normalized(raw);
  std::erase_if(tokens, [&](const std::string& t) { return filter.excludes(t) || t.size() < 2; });
  return tokens;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfig, "cannot read stopword file " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (!line.empty()) words.insert(line);
  }
  return words;
}

FrequencyFilter build_frequency_filter(const std::vector<std::string>& corpus,
                                       const std::set<std::string>& stopwords,
                                       std::size_t top_n) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& token : split_normalized(doc)) ++counts[detail::ascii_lower(token)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  const std::size_t keep = std::min(top_n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  std::set<std::string> frequent;
  for (std::size_t i = 0; i < keep; ++i) frequent.insert(ranked[i].first);
  return FrequencyFilter(stopwords, frequent, top_n);
}

FrequencyFilter build_frequency_filter(const std::vector<std::string>& corpus,
                                       const std::filesystem::path& stopword_file,
                                       std::size_t top_n) {
  return build_frequency_filter(corpus, load_stopwords(stopword_file), top_n);
}

}  // namespace c2v::preprocess
