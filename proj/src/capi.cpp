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

#include "c2v/c2v.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "c2v/error.hpp"
#include "c2v/evaluate.hpp"
#include "c2v/gateway.hpp"
#include "c2v/pipeline.hpp"
#include "c2v/preprocess.hpp"
#include "c2v/segment.hpp"
#include "c2v/semantics.hpp"
#include "text_util.hpp"

struct c2v_engine {
  c2v::gateway::Engine engine;
};

namespace {

thread_local std::string last_error;

c2v_status status_of(c2v::ErrorCode code) {
  using c2v::ErrorCode;
  switch (code) {
    case ErrorCode::kInput: return C2V_ERR_INPUT;
    case ErrorCode::kParse: return C2V_ERR_PARSE;
    case ErrorCode::kFormat: return C2V_ERR_FORMAT;
    case ErrorCode::kVersion: return C2V_ERR_VERSION;
    case ErrorCode::kIo: return C2V_ERR_IO;
    case ErrorCode::kConfig: return C2V_ERR_CONFIG;
    case ErrorCode::kDomain: return C2V_ERR_DOMAIN;
    case ErrorCode::kFit: return C2V_ERR_FIT;
    case ErrorCode::kLookup: return C2V_ERR_LOOKUP;
    case ErrorCode::kSplit: return C2V_ERR_SPLIT;
    case ErrorCode::kResampling: return C2V_ERR_RESAMPLING;
    case ErrorCode::kEvaluation: return C2V_ERR_EVALUATION;
  }
  return C2V_ERR_INTERNAL;
}

template <class Fn>
c2v_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const c2v::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return C2V_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return C2V_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return C2V_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) c2v::fail(c2v::ErrorCode::kInput, std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out != nullptr) *out = dup_string(s);
}

c2v::wordvec::VectorFormat vector_format(const char* name) {
  const std::string f = name == nullptr ? "text" : c2v::detail::ascii_lower(name);
  if (f == "text") return c2v::wordvec::VectorFormat::kText;
  if (f == "binary" || f == "bin") return c2v::wordvec::VectorFormat::kBinary;
  c2v::fail(c2v::ErrorCode::kInput, "unknown vector format '" + f + "' (expected text or binary)");
}

std::vector<std::string> split_list(const char* list) {
  std::vector<std::string> out;
  if (list == nullptr) return out;
  for (const auto& item : c2v::detail::split(list, ',')) {
    auto t = c2v::detail::trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// Maps an engine answer onto a status; the JSON body is always handed out.
c2v_status from_response(const c2v::gateway::Response& r, char** json) {
  put(json, r.body);
  if (r.status == 200) return C2V_OK;
  const auto parsed = nlohmann::json::parse(r.body, nullptr, false);
  last_error = parsed.is_object() && parsed.contains("message") ? parsed["message"].get<std::string>()
                                                                 : r.body;
  if (r.status == 404) return C2V_ERR_LOOKUP;
  if (r.status >= 500) return C2V_ERR_INTERNAL;
  return C2V_ERR_INPUT;
}

}  // namespace

extern "C" {

const char* c2v_version(void) { return "1.0.0"; }

const char* c2v_status_name(c2v_status status) {
  switch (status) {
    case C2V_OK: return "ok";
    case C2V_ERR_INPUT: return "input";
    case C2V_ERR_PARSE: return "parse";
    case C2V_ERR_FORMAT: return "format";
    case C2V_ERR_VERSION: return "version";
    case C2V_ERR_IO: return "io";
    case C2V_ERR_CONFIG: return "config";
    case C2V_ERR_DOMAIN: return "domain";
    case C2V_ERR_FIT: return "fit";
    case C2V_ERR_LOOKUP: return "lookup";
    case C2V_ERR_SPLIT: return "split";
    case C2V_ERR_RESAMPLING: return "resampling";
    case C2V_ERR_EVALUATION: return "evaluation";
    case C2V_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* c2v_last_error(void) { return last_error.c_str(); }

void c2v_string_free(char* s) { std::free(s); }

c2v_status c2v_ingest(const char* url_list, const char* out_scrape_table, unsigned workers,
                      int64_t timeout_ms) {
  return guarded([&] {
    require(url_list, "url_list");
    require(out_scrape_table, "out_scrape_table");
    if (timeout_ms <= 0) c2v::fail(c2v::ErrorCode::kInput, "timeout must be positive");
    c2v::ingest::FetchOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    const auto rows =
        c2v::pipeline::scrape(c2v::ingest::read_url_list(url_list), options, workers == 0 ? 1 : workers);
    c2v::ingest::write_scrape_table(out_scrape_table, rows);
    return C2V_OK;
  });
}

c2v_status c2v_preprocess(const char* metadata, const char* scrape_table, const char* image_labels,
                          const char* stopwords, size_t frequent_top_n, const char* out_dataset,
                          char** warnings) {
  return guarded([&] {
    require(metadata, "metadata");
    require(scrape_table, "scrape_table");
    require(out_dataset, "out_dataset");
    c2v::pipeline::PreprocessInputs inputs;
    inputs.metadata = c2v::store::load_metadata(metadata);
    inputs.scraped = c2v::ingest::read_scrape_table(scrape_table);
    if (image_labels != nullptr) inputs.image_labels = c2v::ingest::ImageLabelIndex::load(image_labels);
    if (stopwords != nullptr) inputs.stopwords = c2v::preprocess::load_stopwords(stopwords);
    inputs.frequent_top_n = frequent_top_n;
    const auto out = c2v::pipeline::preprocess(inputs);
    c2v::embed::save_dataset(out.records, out_dataset);
    std::string lines;
    for (const auto& w : out.warnings) lines += w + '\n';
    put(warnings, lines);
    return C2V_OK;
  });
}

c2v_status c2v_embed(const char* dataset, const char* vectors, const char* format,
                     const char* strategy, const char* out_snapshot) {
  return guarded([&] {
    require(dataset, "dataset");
    require(vectors, "vectors");
    require(strategy, "strategy");
    require(out_snapshot, "out_snapshot");
    const auto records = c2v::embed::load_dataset(dataset);
    const auto table = c2v::wordvec::load_word_vectors(vectors, vector_format(format));
    auto snapshot =
        c2v::pipeline::embed(records, table, c2v::embed::parse_strategy(strategy));
    snapshot.provenance.source_digests["dataset"] = c2v::store::file_digest(dataset);
    snapshot.provenance.source_digests["vectors"] = c2v::store::file_digest(vectors);
    c2v::store::save_snapshot(snapshot, out_snapshot);
    return C2V_OK;
  });
}

c2v_status c2v_pca(const char* in_snapshot, double variance_threshold, size_t max_components,
                   const char* out_snapshot, char** report) {
  return guarded([&] {
    require(in_snapshot, "in_snapshot");
    require(out_snapshot, "out_snapshot");
    auto snapshot = c2v::store::load_snapshot(in_snapshot);
    const std::size_t input_dim = snapshot.matrix.dim();
    snapshot = c2v::pipeline::reduce(std::move(snapshot), {variance_threshold, max_components});
    c2v::store::save_snapshot(snapshot, out_snapshot);
    std::ostringstream text;
    text << "input_dim\t" << input_dim << "\noutput_dim\t" << snapshot.pca->output_dim() << '\n';
    text << "component\texplained\tcumulative\n";
    for (std::size_t m = 1; m <= snapshot.pca->output_dim(); ++m) {
      text << m << '\t' << c2v::detail::format_double(snapshot.pca->explained_ratio[m - 1]) << '\t'
           << c2v::detail::format_double(c2v::reduce::explained_at(*snapshot.pca, m)) << '\n';
    }
    put(report, text.str());
    return C2V_OK;
  });
}

c2v_status c2v_segment_fit(const char* in_snapshot, size_t k, uint64_t seed, size_t restarts,
                           size_t max_iter, const char* out_snapshot, char** report) {
  return guarded([&] {
    require(in_snapshot, "in_snapshot");
    require(out_snapshot, "out_snapshot");
    auto snapshot = c2v::pipeline::segment(c2v::store::load_snapshot(in_snapshot), k, seed,
                                           restarts, max_iter);
    c2v::store::save_snapshot(snapshot, out_snapshot);
    const auto& model = *snapshot.segmentation;
    std::vector<std::size_t> sizes(model.k, 0);
    for (const int a : model.assignments) {
      if (a != c2v::segment::kUnassigned) ++sizes[static_cast<std::size_t>(a)];
    }
    std::ostringstream text;
    text << "k\t" << model.k << "\nseed\t" << model.seed << "\niterations\t" << model.iterations_run
         << "\nconverged\t" << (model.converged ? "yes" : "no") << "\ndistortion\t"
         << c2v::detail::format_double(c2v::segment::distortion(model, snapshot.matrix))
         << "\nsegment\tsize\n";
    for (std::size_t c = 0; c < sizes.size(); ++c) text << c << '\t' << sizes[c] << '\n';
    put(report, text.str());
    return C2V_OK;
  });
}

c2v_status c2v_segment_elbow(const char* snapshot, size_t k_min, size_t k_max, uint64_t seed,
                             size_t restarts, size_t max_iter, char** report) {
  return guarded([&] {
    require(snapshot, "snapshot");
    const auto snap = c2v::store::load_snapshot(snapshot);
    const auto seeds = c2v::pipeline::seed_range(seed, restarts);
    const auto curve = c2v::segment::distortion_curve(snap.matrix, k_min, k_max, seeds, max_iter);
    std::ostringstream text;
    text << "k\tdistortion\n";
    for (const auto& p : curve) text << p.k << '\t' << c2v::detail::format_double(p.distortion) << '\n';
    text << "# elbow\t" << c2v::segment::elbow_k(curve) << '\n';
    put(report, text.str());
    return C2V_OK;
  });
}

void c2v_eval_options_init(c2v_eval_options* o) {
  if (o == nullptr) return;
  const c2v::evaluate::Hyperparameters hyper;
  o->level = 1;
  o->strategies = "text,image,alt,append,concat";
  o->classifiers = "logreg,knn";
  o->test_fraction = 0.2;
  o->seed = 0;
  o->smote_k = 5;
  o->unbalanced = 1;
  o->balanced = 1;
  o->l2 = hyper.l2;
  o->learning_rate = hyper.learning_rate;
  o->epochs = hyper.epochs;
  o->knn_k = hyper.knn_k;
}

c2v_status c2v_evaluate(const char* dataset, const char* vectors, const char* format,
                        const c2v_eval_options* options, char** table, char** confusion) {
  return guarded([&] {
    require(dataset, "dataset");
    require(vectors, "vectors");
    require(options, "options");
    if (options->level != 1 && options->level != 2) {
      c2v::fail(c2v::ErrorCode::kInput, "level must be 1 or 2");
    }
    c2v::evaluate::GridOptions grid;
    grid.level = options->level == 1 ? c2v::evaluate::Level::kLevel1 : c2v::evaluate::Level::kLevel2;
    for (const auto& s : split_list(options->strategies)) {
      grid.strategies.push_back(c2v::embed::parse_strategy(s));
    }
    for (const auto& c : split_list(options->classifiers)) {
      grid.classifiers.push_back(c2v::evaluate::parse_classifier(c));
    }
    grid.test_fraction = options->test_fraction;
    grid.seed = options->seed;
    grid.smote_k = options->smote_k;
    grid.unbalanced = options->unbalanced != 0;
    grid.balanced = options->balanced != 0;
    grid.hyper = {options->l2, options->learning_rate, options->epochs, options->knn_k};
    if (!grid.unbalanced && !grid.balanced) {
      c2v::fail(c2v::ErrorCode::kInput, "enable balanced and/or unbalanced training data");
    }
    const auto records = c2v::embed::load_dataset(dataset);
    const auto words = c2v::wordvec::load_word_vectors(vectors, vector_format(format));
    const auto report = c2v::evaluate::run_grid(records, words, grid);
    std::ostringstream t;
    c2v::evaluate::write_grid_table(t, report);
    put(table, t.str());
    if (confusion != nullptr) {
      std::ostringstream c;
      c2v::evaluate::write_confusion_grid(c, report);
      put(confusion, c.str());
    }
    return C2V_OK;
  });
}

c2v_status c2v_wordsim(const char* vectors, const char* format, const char* dataset,
                       const char* correlation, char** report) {
  return guarded([&] {
    require(vectors, "vectors");
    require(dataset, "dataset");
    const std::string kind = correlation == nullptr ? "spearman" : c2v::detail::ascii_lower(correlation);
    c2v::wordvec::Correlation corr;
    if (kind == "spearman") {
      corr = c2v::wordvec::Correlation::kSpearman;
    } else if (kind == "pearson") {
      corr = c2v::wordvec::Correlation::kPearson;
    } else {
      c2v::fail(c2v::ErrorCode::kInput, "unknown correlation '" + kind + "'");
    }
    const auto table = c2v::wordvec::load_word_vectors(vectors, vector_format(format));
    const auto ds = c2v::wordvec::load_similarity_dataset(dataset);
    const auto r = c2v::wordvec::evaluate_similarity_dataset(table, ds, corr);
    std::ostringstream text;
    text << "correlation\t" << kind << '\t' << c2v::detail::format_double(r.correlation) << '\n'
         << "spearman\t" << c2v::detail::format_double(r.spearman) << '\n'
         << "pearson\t" << c2v::detail::format_double(r.pearson) << '\n'
         << "coverage\t" << c2v::detail::format_double(r.coverage) << '\n'
         << "pairs\t" << r.pairs_used << '/' << r.pairs_total << '\n';
    put(report, text.str());
    return C2V_OK;
  });
}

c2v_status c2v_engine_open(const char* snapshot, const char* vectors, const char* format,
                           c2v_engine** out) {
  return guarded([&] {
    require(snapshot, "snapshot");
    require(out, "out");
    *out = nullptr;
    std::optional<std::filesystem::path> words;
    if (vectors != nullptr) words = vectors;
    *out = new c2v_engine{c2v::gateway::Engine::open(snapshot, words, vector_format(format))};
    return C2V_OK;
  });
}

void c2v_engine_close(c2v_engine* engine) { delete engine; }

const char* c2v_engine_digest(const c2v_engine* engine) {
  return engine == nullptr ? "" : engine->engine.digest().c_str();
}

size_t c2v_engine_rows(const c2v_engine* engine) {
  return engine == nullptr ? 0 : engine->engine.snapshot().matrix.rows();
}

c2v_status c2v_engine_handle(const c2v_engine* engine, const char* method, const char* target,
                             const char* body, size_t body_len, int* http_status,
                             char** response) {
  return guarded([&] {
    require(engine, "engine");
    require(method, "method");
    require(target, "target");
    require(http_status, "http_status");
    require(response, "response");
    const auto r = engine->engine.handle_request(
        method, target, body == nullptr ? std::string_view() : std::string_view(body, body_len));
    *http_status = r.status;
    *response = dup_string(r.body);
    return C2V_OK;
  });
}

c2v_status c2v_engine_peers(const c2v_engine* engine, const char* firm, size_t n, char** json) {
  return guarded([&] {
    require(engine, "engine");
    require(firm, "firm");
    return from_response(engine->engine.peers(firm, n), json);
  });
}

c2v_status c2v_engine_portfolio(const c2v_engine* engine, const char* const* firms, size_t count,
                                size_t n, char** json) {
  return guarded([&] {
    require(engine, "engine");
    if (count > 0) require(firms, "firms");
    std::vector<std::string> ids;
    for (size_t i = 0; i < count; ++i) {
      require(firms[i], "firm id");
      ids.emplace_back(firms[i]);
    }
    return from_response(engine->engine.portfolio_peers(ids, n), json);
  });
}

c2v_status c2v_engine_segment_peers(const c2v_engine* engine, const char* firm, char** json) {
  return guarded([&] {
    require(engine, "engine");
    require(firm, "firm");
    return from_response(engine->engine.segment_peers(firm), json);
  });
}

c2v_status c2v_engine_topwords(const c2v_engine* engine, const char* firm, size_t n, char** json) {
  return guarded([&] {
    require(engine, "engine");
    require(firm, "firm");
    return from_response(engine->engine.topwords(firm, n), json);
  });
}

c2v_status c2v_engine_analogy(const c2v_engine* engine, const char* a, const char* b,
                              const char* c, size_t n, char** json) {
  return guarded([&] {
    require(engine, "engine");
    require(a, "a");
    require(b, "b");
    require(c, "c");
    return from_response(engine->engine.analogy(a, b, c, n), json);
  });
}

c2v_status c2v_engine_map_csv(const c2v_engine* engine, char** csv) {
  return guarded([&] {
    require(engine, "engine");
    require(csv, "csv");
    std::ostringstream out;
    c2v::semantics::write_map_csv(out, c2v::semantics::project_2d(engine->engine.snapshot().matrix));
    *csv = dup_string(out.str());
    return C2V_OK;
  });
}

}  // extern "C"
