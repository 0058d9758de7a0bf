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

// c2v command line. Exit codes: 0 success, 2 input error, 1 internal error.

#include <httplib.h>

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "c2v/c2v.h"

#ifndef C2V_DEFAULT_STOPWORDS
#define C2V_DEFAULT_STOPWORDS ""
#endif

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

// Owns a string handed out by the library.
class LibString {
 public:
  LibString() = default;
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  ~LibString() { c2v_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ == nullptr ? std::string() : std::string(p_); }

 private:
  char* p_ = nullptr;
};

class Engine {
 public:
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;
  ~Engine() { c2v_engine_close(e_); }
  static c2v_status open(const std::string& snapshot, const std::string& vectors,
                         const std::string& format, std::optional<Engine>& out) {
    c2v_engine* e = nullptr;
    const auto st = c2v_engine_open(snapshot.c_str(), vectors.empty() ? nullptr : vectors.c_str(),
                                    format.c_str(), &e);
    if (st == C2V_OK) out.emplace(e);
    return st;
  }
  explicit Engine(c2v_engine* e) : e_(e) {}
  const c2v_engine* get() const { return e_; }

 private:
  c2v_engine* e_ = nullptr;
};

int report(c2v_status st) {
  if (st == C2V_OK) return 0;
  std::cerr << "c2v: " << c2v_status_name(st) << " error: " << c2v_last_error() << '\n';
  return st == C2V_ERR_INTERNAL ? kExitInternal : kExitInput;
}

void print(const LibString& s) { std::cout << s.str(); }

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "c2v: io error: cannot write " << path << '\n';
    return kExitInput;
  }
  return 0;
}

// Prints a peer answer as `rank<TAB>id<TAB>name<TAB>similarity` lines.
int print_peers(c2v_status st, const LibString& json, bool as_json) {
  if (st != C2V_OK) return report(st);
  if (as_json) {
    std::cout << json.str() << '\n';
    return 0;
  }
  const auto body = nlohmann::json::parse(json.str());
  if (body.value("code", "") == "EMPTY_EMBEDDING") {
    std::cerr << "c2v: the query has no embedding; no peers\n";
    return 0;
  }
  for (const auto& p : body.at("peers")) {
    std::cout << p.at("rank").get<std::size_t>() << '\t' << p.at("id").get<std::string>() << '\t'
              << p.at("name").get<std::string>() << '\t' << fmt(p.at("similarity").get<double>())
              << '\n';
  }
  return 0;
}

std::vector<std::string> split_ids(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = std::min(list.find(',', start), list.size());
    if (comma > start) out.push_back(list.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

httplib::Server* active_server = nullptr;

extern "C" void stop_server(int) {
  if (active_server != nullptr) active_server->stop();
}

int serve(const Engine& engine, const std::string& host, int port, int threads) {
  httplib::Server server;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<size_t>(threads)); };
  auto handler = [&engine](const httplib::Request& req, httplib::Response& res) {
    const auto start = std::chrono::steady_clock::now();
    std::string target = req.path;
    if (!req.params.empty()) {
      target += '?';
      bool first = true;
      for (const auto& [key, value] : req.params) {
        if (!first) target += '&';
        first = false;
        target += httplib::detail::encode_query_param(key) + '=' +
                  httplib::detail::encode_query_param(value);
      }
    }
    int status = 500;
    LibString body;
    const auto st = c2v_engine_handle(engine.get(), req.method.c_str(), target.c_str(),
                                      req.body.data(), req.body.size(), &status, body.out());
    if (st != C2V_OK) {
      res.status = 500;
      res.set_content(nlohmann::json{{"code", "INTERNAL"}, {"message", c2v_last_error()}}.dump(),
                      "application/json");
      return;
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    res.status = status;
    res.set_header("X-C2V-Elapsed-Us", std::to_string(elapsed.count()));
    res.set_header("X-C2V-Digest", c2v_engine_digest(engine.get()));
    res.set_content(body.str(), "application/json; charset=utf-8");
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);

  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    std::cerr << "c2v: io error: cannot listen on " << host << ':' << port << '\n';
    return kExitInput;
  }
  active_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::cout << "listening on " << host << ':' << bound << std::endl;
  server.listen_after_bind();
  active_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"c2v: company embeddings and peer-firm retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(c2v_version()));

  int code = 0;
  std::string snapshot;
  auto add_snapshot = [&](CLI::App* sub) {
    sub->add_option("--snapshot", snapshot, "Engine snapshot (default: $C2V_SNAPSHOT)")
        ->envname("C2V_SNAPSHOT")
        ->required();
  };
  std::string vectors;
  std::string format = "text";
  auto add_vectors = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--vectors", vectors, "Word-vector file");
    if (required) opt->required();
    sub->add_option("--format", format, "Word-vector format: text or binary")
        ->check(CLI::IsMember({"text", "binary"}));
  };
  std::string out;
  std::uint64_t seed = 0;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Fetch company webpages into a scrape table");
  std::string urls;
  unsigned workers = 8;
  std::int64_t timeout_ms = 10000;
  ingest->add_option("--urls", urls, "URL list, one per line")->required();
  ingest->add_option("--out", out, "Scrape table to write")->required();
  ingest->add_option("--workers", workers, "Concurrent requests")->check(CLI::Range(1u, 256u));
  ingest->add_option("--timeout-ms", timeout_ms, "Per-page timeout")->check(CLI::PositiveNumber);
  ingest->callback([&] { code = report(c2v_ingest(urls.c_str(), out.c_str(), workers, timeout_ms)); });

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "Join metadata with scraped pages and tokenize");
  std::string metadata, scrape, image_labels, stopwords = C2V_DEFAULT_STOPWORDS;
  std::size_t top_frequent = 0;
  prep->add_option("--metadata", metadata, "Company metadata table")->required();
  prep->add_option("--scrape", scrape, "Scrape table from `ingest`")->required();
  prep->add_option("--image-labels", image_labels, "Image class labels per company id");
  prep->add_option("--stopwords", stopwords, "Stopword list")->capture_default_str();
  prep->add_option("--top-frequent", top_frequent, "Also drop the N most frequent corpus words");
  prep->add_option("--out", out, "Dataset to write")->required();
  prep->callback([&] {
    LibString warnings;
    const auto st = c2v_preprocess(metadata.c_str(), scrape.c_str(),
                                   image_labels.empty() ? nullptr : image_labels.c_str(),
                                   stopwords.empty() ? nullptr : stopwords.c_str(), top_frequent,
                                   out.c_str(), warnings.out());
    std::cerr << warnings.str();
    code = report(st);
  });

  // embed
  auto* emb = app.add_subcommand("embed", "Average word vectors into company embeddings");
  std::string dataset, strategy = "text";
  emb->add_option("--dataset", dataset, "Dataset from `preprocess`")->required();
  add_vectors(emb, true);
  emb->add_option("--strategy", strategy, "text, image, alt, append or concat")->capture_default_str();
  emb->add_option("--out", out, "Snapshot to write")->required();
  emb->callback([&] {
    code = report(c2v_embed(dataset.c_str(), vectors.c_str(), format.c_str(), strategy.c_str(), out.c_str()));
  });

  // pca
  auto* pca = app.add_subcommand("pca", "Reduce a snapshot with PCA");
  double threshold = 0.90;
  std::size_t max_components = 100;
  add_snapshot(pca);
  pca->add_option("--threshold", threshold, "Explained-variance target")->capture_default_str();
  pca->add_option("--max-components", max_components, "Upper bound on S'")->capture_default_str();
  pca->add_option("--out", out, "Snapshot to write")->required();
  pca->callback([&] {
    LibString text;
    code = report(c2v_pca(snapshot.c_str(), threshold, max_components, out.c_str(), text.out()));
    if (code == 0) print(text);
  });

  // segment fit | elbow
  auto* seg = app.add_subcommand("segment", "k-means segmentation");
  seg->require_subcommand(1);
  std::size_t k = 400, restarts = 1, max_iter = 300, k_min = 1, k_max = 20;
  auto* fit = seg->add_subcommand("fit", "Fit k-means and store it in the snapshot");
  add_snapshot(fit);
  fit->add_option("--k", k, "Number of segments")->capture_default_str();
  fit->add_option("--seed", seed, "Random seed")->required();
  fit->add_option("--restarts", restarts, "Seeds tried (best distortion wins)");
  fit->add_option("--max-iter", max_iter, "Lloyd iteration cap");
  fit->add_option("--out", out, "Snapshot to write")->required();
  fit->callback([&] {
    LibString text;
    code = report(c2v_segment_fit(snapshot.c_str(), k, seed, restarts, max_iter, out.c_str(), text.out()));
    if (code == 0) print(text);
  });
  auto* elbow = seg->add_subcommand("elbow", "Distortion curve and elbow");
  add_snapshot(elbow);
  elbow->add_option("--k-min", k_min)->capture_default_str();
  elbow->add_option("--k-max", k_max)->capture_default_str();
  elbow->add_option("--seed", seed, "Random seed")->required();
  elbow->add_option("--restarts", restarts);
  elbow->add_option("--max-iter", max_iter);
  elbow->callback([&] {
    LibString text;
    code = report(c2v_segment_elbow(snapshot.c_str(), k_min, k_max, seed, restarts, max_iter, text.out()));
    if (code == 0) print(text);
  });

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Industry-prediction grid");
  c2v_eval_options eo;
  c2v_eval_options_init(&eo);
  std::string strategies = eo.strategies, classifiers = eo.classifiers, confusion_out;
  bool no_balanced = false, no_unbalanced = false;
  eval->add_option("--dataset", dataset)->required();
  add_vectors(eval, true);
  eval->add_option("--level", eo.level, "NACE level (1 or 2)")->check(CLI::IsMember({1, 2}));
  eval->add_option("--strategies", strategies)->capture_default_str();
  eval->add_option("--classifiers", classifiers)->capture_default_str();
  eval->add_option("--test-fraction", eo.test_fraction)->capture_default_str();
  eval->add_option("--seed", seed, "Random seed")->required();
  eval->add_option("--smote-k", eo.smote_k)->capture_default_str();
  eval->add_option("--epochs", eo.epochs)->capture_default_str();
  eval->add_option("--learning-rate", eo.learning_rate)->capture_default_str();
  eval->add_option("--l2", eo.l2)->capture_default_str();
  eval->add_option("--knn-k", eo.knn_k)->capture_default_str();
  eval->add_flag("--no-balanced", no_balanced, "Skip the balanced training set");
  eval->add_flag("--no-unbalanced", no_unbalanced, "Skip the raw training set");
  eval->add_option("--confusion", confusion_out, "Write confusion matrices here");
  eval->callback([&] {
    eo.strategies = strategies.c_str();
    eo.classifiers = classifiers.c_str();
    eo.seed = seed;
    eo.balanced = no_balanced ? 0 : 1;
    eo.unbalanced = no_unbalanced ? 0 : 1;
    LibString table, confusion;
    code = report(c2v_evaluate(dataset.c_str(), vectors.c_str(), format.c_str(), &eo, table.out(),
                               confusion_out.empty() ? nullptr : confusion.out()));
    if (code != 0) return;
    print(table);
    if (!confusion_out.empty()) code = write_text(confusion_out, confusion.str());
  });

  // peers / segment-peers / portfolio
  std::string firm, firms;
  std::size_t n = 15;
  bool as_json = false;
  auto* peers = app.add_subcommand("peers", "Most similar firms to one firm");
  add_snapshot(peers);
  peers->add_option("--firm", firm, "Company id")->required();
  peers->add_option("--n", n, "Number of peers")->capture_default_str();
  peers->add_flag("--json", as_json, "Print the service JSON");
  peers->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, "", format, engine))) != 0) return;
    if (n == 0) {
      std::cerr << "c2v: input error: --n must be >= 1\n";
      code = kExitInput;
      return;
    }
    LibString json;
    code = print_peers(c2v_engine_peers(engine->get(), firm.c_str(), n, json.out()), json, as_json);
  });

  auto* seg_peers = app.add_subcommand("segment-peers", "Firms in the same k-means segment");
  add_snapshot(seg_peers);
  seg_peers->add_option("--firm", firm, "Company id")->required();
  seg_peers->add_flag("--json", as_json, "Print the service JSON");
  seg_peers->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, "", format, engine))) != 0) return;
    LibString json;
    code = print_peers(c2v_engine_segment_peers(engine->get(), firm.c_str(), json.out()), json, as_json);
  });

  auto* portfolio = app.add_subcommand("portfolio", "Peers of a portfolio of firms");
  add_snapshot(portfolio);
  portfolio->add_option("--firms", firms, "Comma-separated company ids")->required();
  portfolio->add_option("--n", n, "Number of peers")->capture_default_str();
  portfolio->add_flag("--json", as_json, "Print the service JSON");
  portfolio->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, "", format, engine))) != 0) return;
    if (n == 0) {
      std::cerr << "c2v: input error: --n must be >= 1\n";
      code = kExitInput;
      return;
    }
    const auto ids = split_ids(firms);
    std::vector<const char*> ptrs;
    for (const auto& id : ids) ptrs.push_back(id.c_str());
    LibString json;
    code = print_peers(c2v_engine_portfolio(engine->get(), ptrs.data(), ptrs.size(), n, json.out()),
                       json, as_json);
  });

  // topwords / analogy / map
  auto* top = app.add_subcommand("topwords", "Vocabulary words closest to a firm");
  add_snapshot(top);
  add_vectors(top, true);
  top->add_option("--firm", firm, "Company id")->required();
  top->add_option("--n", n, "Number of words")->capture_default_str();
  top->add_flag("--json", as_json, "Print the service JSON");
  top->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, vectors, format, engine))) != 0) return;
    LibString json;
    const auto st = c2v_engine_topwords(engine->get(), firm.c_str(), n, json.out());
    if ((code = report(st)) != 0) return;
    if (as_json) {
      std::cout << json.str() << '\n';
      return;
    }
    const auto body = nlohmann::json::parse(json.str());
    if (body.value("code", "") == "EMPTY_EMBEDDING") std::cerr << "c2v: the firm has no embedding\n";
    for (const auto& w : body.at("words")) {
      std::cout << w.at("word").get<std::string>() << '\t' << fmt(w.at("similarity").get<double>()) << '\n';
    }
  });

  auto* ana = app.add_subcommand("analogy", "Entities closest to b - a + c");
  std::string a, b, c;
  add_snapshot(ana);
  add_vectors(ana, true);
  ana->add_option("--a", a, "Entity (firm:<id>, word:<w> or a bare name)")->required();
  ana->add_option("--b", b)->required();
  ana->add_option("--c", c)->required();
  ana->add_option("--n", n)->capture_default_str();
  ana->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, vectors, format, engine))) != 0) return;
    LibString json;
    if ((code = report(c2v_engine_analogy(engine->get(), a.c_str(), b.c_str(), c.c_str(), n, json.out()))) != 0) {
      return;
    }
    const auto body = nlohmann::json::parse(json.str());
    for (const auto& r : body.at("results")) {
      std::cout << r.at("kind").get<std::string>() << '\t' << r.at("label").get<std::string>() << '\t'
                << fmt(r.at("similarity").get<double>()) << '\n';
    }
  });

  auto* map = app.add_subcommand("map", "2-D projection as company_id,x,y");
  add_snapshot(map);
  map->add_option("--out", out, "CSV file (default: stdout)");
  map->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, "", format, engine))) != 0) return;
    LibString csv;
    if ((code = report(c2v_engine_map_csv(engine->get(), csv.out()))) != 0) return;
    code = write_text(out, csv.str());
  });

  // wordsim
  auto* wordsim = app.add_subcommand("wordsim", "Intrinsic word-vector evaluation");
  std::string pairs, correlation = "spearman";
  add_vectors(wordsim, true);
  wordsim->add_option("--dataset", pairs, "Word-pair similarity file")->required();
  wordsim->add_option("--correlation", correlation)->check(CLI::IsMember({"spearman", "pearson"}));
  wordsim->callback([&] {
    LibString text;
    code = report(c2v_wordsim(vectors.c_str(), format.c_str(), pairs.c_str(), correlation.c_str(), text.out()));
    if (code == 0) print(text);
  });

  // serve
  auto* srv = app.add_subcommand("serve", "HTTP query service over a snapshot");
  std::string host = "127.0.0.1";
  int port = 8080, threads = 8;
  add_snapshot(srv);
  add_vectors(srv, false);
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port, "0 picks a free port")->check(CLI::Range(0, 65535));
  srv->add_option("--threads", threads)->check(CLI::Range(1, 256));
  srv->callback([&] {
    std::optional<Engine> engine;
    if ((code = report(Engine::open(snapshot, vectors, format, engine))) != 0) return;
    code = serve(*engine, host, port, threads);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::RequiredError) ||
        e.get_exit_code() == static_cast<int>(CLI::ExitCodes::ExtrasError)) {
      std::cerr << app.help();
    }
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "c2v: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return code;
}
