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

#include <random>
#include <regex>

#include "c2v/error.hpp"
#include "c2v/preprocess.hpp"
#include "synth.hpp"

using namespace c2v;
using namespace c2v::preprocess;

namespace {

const FrequencyFilter& german_filter() {
  static const FrequencyFilter filter({"und", "zu", "der", "Sie"}, {"gmbh"}, 1);
  return filter;
}

struct Fixture {
  const char* input;
  TokenList expected;
};

}  // namespace

TEST_CASE("tag stripping and transliteration of the reference example") {
  const FrequencyFilter none;
  CHECK(normalize_and_tokenize("</p> Littfaßsäule </p>", none) == TokenList{"Littfasssaeule"});
}

TEST_CASE("rule fixtures") {
  const Fixture fixtures[] = {
      {"", {}},
      {"   \t\n ", {}},
      {"<a href=x>Haeuser zu kaufen</a>", {"Haeuser", "kaufen"}},
      {"Müller", {"Mueller"}},
      {"Öl Übung Äpfel", {"Oel", "Uebung", "Aepfel"}},
      {"ÄRGER", {"AeRGER"}},
      {"Straße", {"Strasse"}},
      {"Bäckerei und Konditorei", {"Baeckerei", "Konditorei"}},
      {"UND Der zu", {}},
      {"a b cd", {"cd"}},
      {"Tel. 0621-12345 Büro", {"Tel", "Buero"}},
      {"Haus-Bau", {"HausBau"}},
      {"Littfaß-Säule", {"LittfassSaeule"}},
      {"<div class=\"x\">Werkstatt</div><p>Reparatur</p>", {"Werkstatt", "Reparatur"}},
      {"Preis <b>100</b> Euro", {"Preis", "Euro"}},
      {"Besuchen Sie https://www.beispiel.de/kontakt heute", {"Besuchen", "heute"}},
      {"mehr unter www.firma.de", {"mehr", "unter"}},
      {"Zeile1\nZeile2\tEnde", {"Zeile", "Zeile", "Ende"}},
      {"snake_case bleibt", {"snake_case", "bleibt"}},
      {"Café Crème", {"Caf", "Crme"}},
      {"Meier GmbH Bau", {"Meier", "Bau"}},
      {"Garten\xC2\xA0"
       "Bau",
       {"Garten", "Bau"}},
  };
  for (const auto& f : fixtures) {
    CAPTURE(f.input);
    CHECK(normalize_and_tokenize(f.input, german_filter()) == f.expected);
  }
}

TEST_CASE("frequency filter counting") {
  SUBCASE("most frequent token") {
    const auto f = build_frequency_filter({"a b b", "b c"}, std::set<std::string>{}, 1);
    CHECK(f.frequent_words() == std::set<std::string>{"b"});
  }
  SUBCASE("top_n zero") {
    const auto f = build_frequency_filter({"a b b"}, std::set<std::string>{}, 0);
    CHECK(f.frequent_words().empty());
  }
  SUBCASE("ties broken lexicographically") {
    const auto f = build_frequency_filter({"bb aa bb aa"}, std::set<std::string>{}, 1);
    CHECK(f.frequent_words() == std::set<std::string>{"aa"});
  }
  SUBCASE("counting happens after transliteration") {
    const auto f = build_frequency_filter({"Größe groesse Maß"}, std::set<std::string>{}, 1);
    CHECK(f.frequent_words() == std::set<std::string>{"groesse"});
  }
  SUBCASE("missing stopword file") {
    CHECK_THROWS_AS(build_frequency_filter({"x"}, std::filesystem::path("/nonexistent/stop.txt"), 3),
                    Error);
    try {
      build_frequency_filter({"x"}, std::filesystem::path("/nonexistent/stop.txt"), 3);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
    }
  }
}

TEST_CASE("stopword file parsing") {
  const auto dir = testing::scratch_dir("stop");
  testing::write_file(dir / "s.txt", "# header\nund\n  der  \n\nzu # trailing\n");
  CHECK(load_stopwords(dir / "s.txt") == std::set<std::string>{"und", "der", "zu"});
  std::filesystem::remove_all(dir);
}

TEST_CASE("bundled stopword list loads") {
  const auto words = load_stopwords(std::filesystem::path(C2V_SOURCE_DIR) / "data/stopwords_de.txt");
  CHECK(words.size() > 100);
  CHECK(words.contains("und"));
}

namespace {

std::string random_raw(testing::Rng& rng) {
  static const std::vector<std::string> pieces = {
      "Haus", "und", "ß", "ä", "Ö", "ü", "<p>", "</p>", "<a href=\"x\">", "</a>", " ", " ", "\n",
      "1", "42", "-", ".", "x", "Bau", "zu", "https://a.de/b", "www.x.de", "_", "é", "GmbH",
      "Der", "\t", "Q", "Straße", ">", "<"};
  std::string s;
  const auto len = testing::pick(rng, 20);
  for (std::size_t i = 0; i < len; ++i) s += pieces[testing::pick(rng, pieces.size())];
  return s;
}

std::string join(const TokenList& tokens) {
  std::string s;
  for (const auto& t : tokens) s += t + " ";
  return s;
}

}  // namespace

TEST_CASE("properties on random inputs") {
  testing::Rng rng(7);
  const std::regex forbidden("[äöüßÄÖÜ<>/0-9]");
  const FrequencyFilter smaller({"und", "zu"}, {"gmbh"}, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto raw = random_raw(rng);
    CAPTURE(raw);
    const auto tokens = normalize_and_tokenize(raw, german_filter());
    for (const auto& t : tokens) {
      CHECK(t.size() >= 2);
      CHECK_FALSE(std::regex_search(t, forbidden));
      for (const char c : t) CHECK((std::isalpha(static_cast<unsigned char>(c)) || c == '_'));
      CHECK_FALSE(german_filter().excludes(t));
    }
    CHECK(normalize_and_tokenize(join(tokens), german_filter()) == tokens);

    // Dropping stopwords only ever adds tokens, as a supersequence.
    const auto relaxed = normalize_and_tokenize(raw, smaller);
    std::size_t i = 0;
    for (const auto& t : relaxed) {
      if (i < tokens.size() && tokens[i] == t) ++i;
    }
    CHECK(i == tokens.size());
    CHECK(relaxed.size() >= tokens.size());
  }
}

TEST_CASE("filter rejects more frequent words than top_n") {
  CHECK_THROWS_AS(FrequencyFilter({}, {"aa", "bb"}, 1), Error);
}
