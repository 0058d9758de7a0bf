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

// Read-only query engine over one snapshot, shared by the HTTP service and
// the command line.
//
// Endpoints (JSON bodies, every one carrying the snapshot digest):
//   GET  /health
//   GET  /firms?offset=&limit=&q=
//   GET  /peers/{id}?n=
//   GET  /segment-peers/{id}
//   POST /portfolio-peers        {"ids": [...], "n": 15}
//   GET  /topwords/{id}?n=
//   GET  /map
//   GET  /analogy?a=&b=&c=&n=
// Errors carry a machine-readable "code": FIRM_NOT_FOUND (404),
// BAD_REQUEST (400), NOT_FOUND (404), METHOD_NOT_ALLOWED (405),
// ENTITY_NOT_FOUND (404), NO_SEGMENTATION, NO_WORD_VECTORS, MAP_UNAVAILABLE
// (409). A firm without an embedding answers 200 with an empty list and
// code EMPTY_EMBEDDING.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "c2v/store.hpp"
#include "c2v/wordvec.hpp"

namespace c2v::gateway {

inline constexpr std::size_t kDefaultN = 15;
inline constexpr std::size_t kMaxN = 1000;
inline constexpr std::size_t kDefaultPageSize = 100;

struct Response {
  int status = 200;
  std::string body;  // JSON
};

class Engine {
 public:
  /// `digest` identifies the snapshot in every response. Word vectors are
  /// needed for /topwords only and must match the PCA input dim.
  Engine(store::EngineSnapshot snapshot, std::string digest,
         std::optional<wordvec::WordVectorTable> words = {});
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  /// Loads and validates the snapshot; the digest is the file digest.
  static Engine open(const std::filesystem::path& snapshot,
                     const std::optional<std::filesystem::path>& vectors = {},
                     wordvec::VectorFormat format = wordvec::VectorFormat::kText);

  const store::EngineSnapshot& snapshot() const;
  const std::string& digest() const;
  bool has_word_vectors() const;

  /// Routes one HTTP request. `target` is the request path with its query
  /// string. Never throws for bad requests; those become 4xx responses.
  Response handle_request(std::string_view method, std::string_view target,
                          std::string_view body) const;

  Response health() const;
  Response firms(std::size_t offset, std::size_t limit, std::string_view query) const;
  /// n is capped at kMaxN and at the row count; n == 0 is a bad request.
  Response peers(std::string_view id, std::size_t n) const;
  Response segment_peers(std::string_view id) const;
  Response portfolio_peers(std::span<const std::string> ids, std::size_t n) const;
  Response topwords(std::string_view id, std::size_t n) const;
  Response map() const;
  /// Vector-offset analogy over companies and words (needs word vectors).
  Response analogy(std::string_view a, std::string_view b, std::string_view c,
                   std::size_t n) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace c2v::gateway
