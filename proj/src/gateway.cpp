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

#include "c2v/gateway.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include <json.hpp>

#include "c2v/error.hpp"
#include "c2v/peers.hpp"
#include "c2v/semantics.hpp"
#include "text_util.hpp"

namespace c2v::gateway {

using Json = nlohmann::ordered_json;

struct Engine::State {
  store::EngineSnapshot snapshot;
  std::string digest;
  std::optional<wordvec::WordVectorTable> words;
  reduce::PcaModel harmonizer;  // the snapshot PCA, or identity without one
  std::unique_ptr<semantics::SemanticQueryContext> semantics;
  std::vector<int> segment_labels;
  std::vector<semantics::MapPoint> map_points;
  std::string map_error;
};

namespace {

Response reply(int status, const Json& body) { return Response{status, body.dump()}; }

Response error_reply(const std::string& digest, int status, std::string_view code,
                     std::string_view message) {
  return reply(status, Json{{"code", code}, {"message", message}, {"digest", digest}});
}

Json peer_list(const std::vector<peers::PeerResult>& results) {
  Json list = Json::array();
  std::size_t rank = 0;
  for (const auto& p : results) {
    list.push_back(Json{{"rank", ++rank}, {"id", p.company_id}, {"name", p.name},
                        {"similarity", p.similarity}});
  }
  return list;
}

std::string percent_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int value = 0;
      const auto res = std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
      if (res.ec == std::errc() && res.ptr == s.data() + i + 3) {
        out.push_back(static_cast<char>(value));
        i += 2;
        continue;
      }
    }
    out.push_back(plus_is_space && s[i] == '+' ? ' ' : s[i]);
  }
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view query) {
  std::map<std::string, std::string> params;
  for (const auto& pair : detail::split(query, '&')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    const std::string key = percent_decode(std::string_view(pair).substr(0, eq), true);
    params[key] = eq == std::string::npos ? "" : percent_decode(std::string_view(pair).substr(eq + 1), true);
  }
  return params;
}

std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

Engine::Engine(store::EngineSnapshot snapshot, std::string digest,
               std::optional<wordvec::WordVectorTable> words)
    : state_(std::make_unique<State>()) {
  store::check_consistency(snapshot);
  auto& s = *state_;
  s.snapshot = std::move(snapshot);
  s.digest = std::move(digest);
  s.words = std::move(words);
  const auto& F = s.snapshot.matrix;
  if (s.snapshot.pca) {
    s.harmonizer = *s.snapshot.pca;
  } else {
    s.harmonizer.mean.assign(F.dim(), 0.0);
    for (std::size_t d = 0; d < F.dim(); ++d) {
      Vector axis(F.dim(), 0.0);
      axis[d] = 1.0;
      s.harmonizer.components.push_back(std::move(axis));
    }
    s.harmonizer.explained_ratio.assign(F.dim(), 1.0 / static_cast<double>(F.dim()));
  }
  if (s.words) {
    s.semantics = std::make_unique<semantics::SemanticQueryContext>(*s.words, s.harmonizer, F);
  }
  if (s.snapshot.segmentation) s.segment_labels = segment::assign_all(*s.snapshot.segmentation, F);
  try {
    s.map_points = semantics::project_2d(F);
  } catch (const Error& e) {
    s.map_error = e.what();
  }
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

Engine Engine::open(const std::filesystem::path& snapshot,
                    const std::optional<std::filesystem::path>& vectors,
                    wordvec::VectorFormat format) {
  auto snap = store::load_snapshot(snapshot);
  std::optional<wordvec::WordVectorTable> words;
  if (vectors) words = wordvec::load_word_vectors(*vectors, format);
  return Engine(std::move(snap), store::file_digest(snapshot), std::move(words));
}

const store::EngineSnapshot& Engine::snapshot() const { return state_->snapshot; }
const std::string& Engine::digest() const { return state_->digest; }
bool Engine::has_word_vectors() const { return state_->semantics != nullptr; }

Response Engine::health() const {
  const auto& s = *state_;
  return reply(200, Json{{"code", "OK"},
                         {"digest", s.digest},
                         {"status", "ok"},
                         {"rows", s.snapshot.matrix.rows()},
                         {"active_rows", s.snapshot.matrix.active_count()},
                         {"dim", s.snapshot.matrix.dim()},
                         {"strategy", embed::to_string(s.snapshot.strategy)},
                         {"segmentation", s.snapshot.segmentation.has_value()},
                         {"word_vectors", has_word_vectors()}});
}

Response Engine::firms(std::size_t offset, std::size_t limit, std::string_view query) const {
  const auto& s = *state_;
  const auto& F = s.snapshot.matrix;
  if (limit == 0) return error_reply(s.digest, 400, "BAD_REQUEST", "limit must be >= 1");
  limit = std::min(limit, kMaxN);
  const std::string needle = detail::ascii_lower(query);
  Json list = Json::array();
  std::size_t total = 0;
  for (std::size_t r = 0; r < F.rows(); ++r) {
    if (!needle.empty() && detail::ascii_lower(F.id(r)).find(needle) == std::string::npos &&
        detail::ascii_lower(F.name(r)).find(needle) == std::string::npos) {
      continue;
    }
    if (total >= offset && list.size() < limit) {
      list.push_back(Json{{"id", F.id(r)}, {"name", F.name(r)}, {"has_embedding", !F.masked(r)}});
    }
    ++total;
  }
  return reply(200, Json{{"code", "OK"},
                         {"digest", s.digest},
                         {"total", total},
                         {"offset", offset},
                         {"limit", limit},
                         {"firms", std::move(list)}});
}

Response Engine::peers(std::string_view id, std::size_t n) const {
  const std::string ids[] = {std::string(id)};
  return portfolio_peers(ids, n);
}

Response Engine::portfolio_peers(std::span<const std::string> ids, std::size_t n) const {
  const auto& s = *state_;
  const auto& F = s.snapshot.matrix;
  if (ids.empty()) return error_reply(s.digest, 400, "BAD_REQUEST", "no firm ids given");
  if (n == 0) return error_reply(s.digest, 400, "BAD_REQUEST", "n must be >= 1");
  n = std::min({n, kMaxN, F.rows()});
  std::vector<std::size_t> rows;
  Json names = Json::array();
  for (const auto& id : ids) {
    const auto row = F.find(id);
    if (!row) return error_reply(s.digest, 404, "FIRM_NOT_FOUND", "unknown firm '" + id + "'");
    if (std::find(rows.begin(), rows.end(), *row) != rows.end()) continue;
    rows.push_back(*row);
    names.push_back(id);
  }
  const auto result = peers::peers_for_portfolio(F, rows, n, true);
  return reply(200, Json{{"code", result.ok() ? "OK" : "EMPTY_EMBEDDING"},
                         {"digest", s.digest},
                         {"firms", std::move(names)},
                         {"n", n},
                         {"peers", peer_list(result.peers)}});
}

Response Engine::segment_peers(std::string_view id) const {
  const auto& s = *state_;
  const auto& F = s.snapshot.matrix;
  const auto row = F.find(std::string(id));
  if (!row) {
    return error_reply(s.digest, 404, "FIRM_NOT_FOUND", "unknown firm '" + std::string(id) + "'");
  }
  if (!s.snapshot.segmentation) {
    return error_reply(s.digest, 409, "NO_SEGMENTATION", "the snapshot carries no segmentation");
  }
  const auto result = peers::peers_in_segment(F, *row, std::span<const int>(s.segment_labels));
  Json body{{"code", result.ok() ? "OK" : "EMPTY_EMBEDDING"}, {"digest", s.digest}, {"firm", id}};
  body["segment"] = result.ok() ? Json(s.segment_labels[*row]) : Json(nullptr);
  body["peers"] = peer_list(result.peers);
  return reply(200, body);
}

Response Engine::topwords(std::string_view id, std::size_t n) const {
  const auto& s = *state_;
  const auto& F = s.snapshot.matrix;
  if (!F.find(std::string(id))) {
    return error_reply(s.digest, 404, "FIRM_NOT_FOUND", "unknown firm '" + std::string(id) + "'");
  }
  if (!s.semantics) {
    return error_reply(s.digest, 409, "NO_WORD_VECTORS", "the service was started without word vectors");
  }
  if (n == 0) return error_reply(s.digest, 400, "BAD_REQUEST", "n must be >= 1");
  n = std::min(n, kMaxN);
  const auto result = semantics::top_n_words(*s.semantics, id, n);
  Json words = Json::array();
  for (const auto& w : result.words) words.push_back(Json{{"word", w.word}, {"similarity", w.similarity}});
  return reply(200, Json{{"code", result.empty_embedding ? "EMPTY_EMBEDDING" : "OK"},
                         {"digest", s.digest},
                         {"firm", id},
                         {"n", n},
                         {"words", std::move(words)}});
}

Response Engine::map() const {
  const auto& s = *state_;
  if (!s.map_error.empty()) return error_reply(s.digest, 409, "MAP_UNAVAILABLE", s.map_error);
  Json points = Json::array();
  const auto& F = s.snapshot.matrix;
  for (const auto& p : s.map_points) {
    Json point{{"id", p.company_id}, {"x", p.x}, {"y", p.y}};
    if (!s.segment_labels.empty()) point["segment"] = s.segment_labels[*F.find(p.company_id)];
    points.push_back(std::move(point));
  }
  return reply(200, Json{{"code", "OK"}, {"digest", s.digest}, {"points", std::move(points)}});
}

Response Engine::analogy(std::string_view a, std::string_view b, std::string_view c,
                         std::size_t n) const {
  const auto& s = *state_;
  if (!s.semantics) {
    return error_reply(s.digest, 409, "NO_WORD_VECTORS", "the service was started without word vectors");
  }
  if (n == 0) return error_reply(s.digest, 400, "BAD_REQUEST", "n must be >= 1");
  n = std::min(n, kMaxN);
  std::vector<semantics::AnalogyMatch> matches;
  try {
    matches = semantics::analogy(*s.semantics, a, b, c, n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kLookup) throw;
    return error_reply(s.digest, 404, "ENTITY_NOT_FOUND", e.what());
  }
  Json results = Json::array();
  for (const auto& m : matches) {
    results.push_back(Json{{"kind", m.entity.kind == semantics::EntityKind::kCompany ? "company" : "word"},
                           {"label", m.entity.label},
                           {"similarity", m.similarity}});
  }
  return reply(200, Json{{"code", "OK"},
                         {"digest", s.digest},
                         {"query", Json{{"a", a}, {"b", b}, {"c", c}}},
                         {"n", n},
                         {"results", std::move(results)}});
}

Response Engine::handle_request(std::string_view method, std::string_view target,
                                std::string_view body) const {
  const auto& digest = state_->digest;
  const auto qmark = target.find('?');
  const std::string path = percent_decode(target.substr(0, qmark), false);
  const auto params =
      parse_query(qmark == std::string_view::npos ? std::string_view() : target.substr(qmark + 1));

  auto count_param = [&](const char* key, std::size_t fallback) -> std::optional<std::size_t> {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    return parse_count(it->second);
  };
  auto bad_param = [&](const char* key) {
    return error_reply(digest, 400, "BAD_REQUEST",
                       std::string("parameter '") + key + "' must be a non-negative integer");
  };
  auto with_id = [&](std::string_view prefix) -> std::optional<std::string> {
    if (!path.starts_with(prefix) || path.size() == prefix.size()) return std::nullopt;
    return path.substr(prefix.size());
  };

  try {
    if (path == "/portfolio-peers") {
      if (method != "POST") return error_reply(digest, 405, "METHOD_NOT_ALLOWED", "use POST");
      const auto json = Json::parse(body.begin(), body.end(), nullptr, false);
      if (json.is_discarded() || !json.is_object() || !json.contains("ids") ||
          !json["ids"].is_array()) {
        return error_reply(digest, 400, "BAD_REQUEST", "body must be {\"ids\": [...], \"n\": int}");
      }
      std::vector<std::string> ids;
      for (const auto& id : json["ids"]) {
        if (!id.is_string()) return error_reply(digest, 400, "BAD_REQUEST", "ids must be strings");
        ids.push_back(id.get<std::string>());
      }
      std::size_t n = kDefaultN;
      if (json.contains("n")) {
        if (!json["n"].is_number_unsigned()) {
          return error_reply(digest, 400, "BAD_REQUEST", "n must be a non-negative integer");
        }
        n = json["n"].get<std::size_t>();
      }
      return portfolio_peers(ids, n);
    }
    if (method != "GET") return error_reply(digest, 405, "METHOD_NOT_ALLOWED", "use GET");
    if (path == "/health") return health();
    if (path == "/map") return map();
    if (path == "/firms") {
      const auto offset = count_param("offset", 0);
      if (!offset) return bad_param("offset");
      const auto limit = count_param("limit", kDefaultPageSize);
      if (!limit) return bad_param("limit");
      const auto q = params.find("q");
      return firms(*offset, *limit, q == params.end() ? "" : q->second);
    }
    if (const auto id = with_id("/peers/")) {
      const auto n = count_param("n", kDefaultN);
      if (!n) return bad_param("n");
      return peers(*id, *n);
    }
    if (const auto id = with_id("/segment-peers/")) return segment_peers(*id);
    if (const auto id = with_id("/topwords/")) {
      const auto n = count_param("n", kDefaultN);
      if (!n) return bad_param("n");
      return topwords(*id, *n);
    }
    if (path == "/analogy") {
      const auto n = count_param("n", kDefaultN);
      if (!n) return bad_param("n");
      for (const char* key : {"a", "b", "c"}) {
        if (!params.contains(key)) {
          return error_reply(digest, 400, "BAD_REQUEST", std::string("missing parameter '") + key + "'");
        }
      }
      return analogy(params.at("a"), params.at("b"), params.at("c"), *n);
    }
    return error_reply(digest, 404, "NOT_FOUND", "no endpoint " + path);
  } catch (const Error& e) {
    return error_reply(digest, 400, "BAD_REQUEST", e.what());
  } catch (const std::exception& e) {
    return error_reply(digest, 500, "INTERNAL", e.what());
  }
}

}  // namespace c2v::gateway
