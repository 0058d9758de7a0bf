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

#include <cmath>

#include "c2v/error.hpp"
#include "c2v/kernels.hpp"
#include "c2v/wordvec.hpp"
#include "synth.hpp"

using namespace c2v;
using namespace c2v::wordvec;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInput;
}

WordVectorTable table_2d(std::initializer_list<std::pair<const char*, std::array<float, 2>>> items) {
  WordVectorTable t(2);
  for (const auto& [w, v] : items) t.add(w, v);
  return t;
}

}  // namespace

TEST_CASE("text format parsing") {
  const auto t = parse_text_vectors("2 2\na 1 0\nb 0 1\n");
  CHECK(t.dim() == 2);
  CHECK(t.size() == 2);
  CHECK(t.vector(1)[1] == 1.0f);

  const auto headless = parse_text_vectors("a 1 0 0\nb 0 1 0\n");
  CHECK(headless.dim() == 3);
  CHECK(headless.size() == 2);

  CHECK(code_of([] { parse_text_vectors("2 2\na 1 0\nb 0 1 5\n"); }) == ErrorCode::kParse);
  try {
    parse_text_vectors("2 2\na 1 0\nb 0 1 5\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(code_of([] { parse_text_vectors(""); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_text_vectors("a 1 x\n"); }) == ErrorCode::kParse);
}

TEST_CASE("binary and text round trips") {
  testing::Rng rng(3);
  WordVectorTable t(5);
  for (int i = 0; i < 40; ++i) {
    std::vector<float> v(5);
    for (auto& x : v) x = static_cast<float>(testing::gaussian(rng, 3.0));
    t.add("wort" + std::to_string(i) + (i % 3 ? "" : "_ä"), v);
  }
  const auto dir = testing::scratch_dir("wv");
  save_word_vectors(t, dir / "v.bin", VectorFormat::kBinary);
  save_word_vectors(t, dir / "v.txt", VectorFormat::kText);
  CHECK(load_word_vectors(dir / "v.bin", VectorFormat::kBinary) == t);
  CHECK(load_word_vectors(dir / "v.txt", VectorFormat::kText) == t);

  const auto bytes = testing::read_file(dir / "v.bin");
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
    CAPTURE(cut);
    CHECK(code_of([&] { parse_binary_vectors(std::string_view(bytes).substr(0, cut)); }) ==
          ErrorCode::kParse);
  }
  CHECK(code_of([&] { load_word_vectors(dir / "missing.bin", VectorFormat::kBinary); }) ==
        ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lookup falls back to lowercase") {
  const auto upper = table_2d({{"Haus", {1, 2}}});
  CHECK(upper.lookup("Haus").has_value());
  CHECK_FALSE(upper.lookup("haus").has_value());
  const auto lower = table_2d({{"haus", {1, 2}}});
  REQUIRE(lower.lookup("Haus").has_value());
  CHECK((*lower.lookup("Haus"))[1] == 2.0f);
  const auto both = table_2d({{"haus", {1, 0}}, {"Haus", {0, 1}}});
  CHECK((*both.lookup("Haus"))[1] == 1.0f);
  CHECK_FALSE(WordVectorTable(2).lookup("x").has_value());
  CHECK(code_of([] { table_2d({{"a", {1, 0}}, {"a", {0, 1}}}); }) == ErrorCode::kInput);
}

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(Vector{3, 4}, Vector{3, 4}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(Vector{1, 0}, Vector{0, 1}) == 0.0);
  CHECK(std::abs(cosine_similarity(Vector{1, 1}, Vector{1, 0}) - 0.70710678) < 1e-8);
  CHECK(code_of([] { cosine_similarity(Vector{0, 0}, Vector{1, 0}); }) == ErrorCode::kDomain);

  testing::Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    Vector a(7), b(7);
    for (auto& x : a) x = testing::gaussian(rng);
    for (auto& x : b) x = testing::gaussian(rng);
    const double c = testing::uniform(rng, 0.01, 100.0);
    Vector ca = a;
    for (auto& x : ca) x *= c;
    const double ab = cosine_similarity(a, b);
    CHECK(std::abs(ab - cosine_similarity(b, a)) < 1e-12);
    CHECK(std::abs(ab - cosine_similarity(ca, b)) < 1e-9);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab >= -1.0 - 1e-12);
  }
}

TEST_CASE("rank correlation") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {5, 6, 7, 8, 7};
  CHECK(average_ranks(y) == std::vector<double>{1, 2, 3.5, 5, 3.5});
  CHECK(std::abs(spearman_correlation(x, y) - 0.820782681668123) < 1e-12);
  CHECK(std::abs(pearson_correlation(x, x) - 1.0) < 1e-12);

  testing::Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + testing::pick(rng, 30);
    std::vector<double> a(n), b(n), fa(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::round(testing::gaussian(rng) * 4.0);  // rounding creates ties
      b[i] = testing::gaussian(rng);
    }
    if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; })) continue;
    const double shift = testing::uniform(rng, -3.0, 3.0);
    for (std::size_t i = 0; i < n; ++i) fa[i] = std::exp(0.3 * a[i]) * 2.0 + shift;
    CHECK(std::abs(spearman_correlation(a, b) - spearman_correlation(fa, b)) < 1e-12);
  }
}

TEST_CASE("intrinsic evaluation") {
  const auto t = table_2d({{"x", {1, 0}}, {"p1", {2, 0}}, {"p2", {1, 1}}, {"p3", {0, 1}}, {"p4", {-1, 1}}});

  SUBCASE("model order equals gold order") {
    const auto ds = parse_similarity_dataset("x\tp1\t10\nx\tp2\t7\nx\tp3\t3\nx\tp4\t1\n");
    const auto r = evaluate_similarity_dataset(t, ds);
    CHECK(std::abs(r.correlation - 1.0) < 1e-9);
    CHECK(std::abs(r.spearman - 1.0) < 1e-9);
    CHECK(r.coverage == 1.0);
    CHECK(r.pairs_used == 4);
  }
  SUBCASE("coverage counts resolvable pairs") {
    const auto ds = parse_similarity_dataset("# comment\nx\tp1\t10\nx\tp2\t7\nx\tp3\t3\nx\tzz\t1\n");
    const auto r = evaluate_similarity_dataset(t, ds);
    CHECK(r.coverage == 0.75);
    CHECK(r.pairs_used == 3);
    CHECK(r.pairs_total == 4);
  }
  SUBCASE("lowercase fallback counts as coverage") {
    const auto ds = parse_similarity_dataset("X\tp1\t10\nx\tP2\t7\nx\tp3\t3\nq\tr\t1\nx\tp4\t0\n");
    const auto r = evaluate_similarity_dataset(t, ds, Correlation::kPearson);
    CHECK(r.coverage == 0.8);
    CHECK(r.correlation == r.pearson);
  }
  SUBCASE("too few pairs") {
    const auto ds = parse_similarity_dataset("x\tp1\t10\nx\tp2\t7\nx\tzz\t3\n");
    CHECK(code_of([&] { evaluate_similarity_dataset(t, ds); }) == ErrorCode::kEvaluation);
  }
  SUBCASE("malformed dataset") {
    CHECK(code_of([] { parse_similarity_dataset("x\tp1\n"); }) == ErrorCode::kParse);
    CHECK(code_of([] { parse_similarity_dataset("x\tp1\tten\n"); }) == ErrorCode::kParse);
  }
}
