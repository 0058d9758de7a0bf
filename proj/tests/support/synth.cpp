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

#include "synth.hpp"

#include <cstring>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <unistd.h>

namespace c2v::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(Rng& rng, double sd) { return std::normal_distribution<double>(0.0, sd)(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

EmbeddingMatrix random_matrix(Rng& rng, const MatrixShape& shape) {
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < shape.rows; ++r) ids.push_back("firm" + std::to_string(r));
  EmbeddingMatrix m(ids, shape.dim);
  std::vector<std::string> names;
  for (std::size_t r = 0; r < shape.rows; ++r) names.push_back("Firm " + std::to_string(r));
  m.set_names(names);
  for (std::size_t r = 0; r < shape.rows; ++r) {
    const double u = uniform(rng);
    if (u < shape.mask_prob) continue;
    Vector v(shape.dim, 0.0);
    if (u < shape.mask_prob + shape.zero_prob) {
      m.set_row(r, std::span<const double>(v));
      continue;
    }
    if (r > 0 && uniform(rng) < shape.dup_prob) {
      const std::size_t src = pick(rng, r);
      if (!m.masked(src)) {
        m.set_row(r, m.row(src));
        continue;
      }
    }
    for (auto& x : v) {
      x = shape.small_integers ? static_cast<double>(static_cast<int>(pick(rng, 5)) - 2)
                               : gaussian(rng);
    }
    m.set_row(r, std::span<const double>(v));
  }
  return m;
}

std::vector<Vector> random_rotation(Rng& rng, std::size_t dim) {
  std::vector<Vector> q;
  while (q.size() < dim) {
    Vector v(dim);
    for (auto& x : v) x = gaussian(rng);
    for (const auto& u : q) {
      const double p = dot(std::span<const double>(v), std::span<const double>(u));
      for (std::size_t i = 0; i < dim; ++i) v[i] -= p * u[i];
    }
    const double n = norm(std::span<const double>(v));
    if (n < 1e-6) continue;
    for (auto& x : v) x /= n;
    q.push_back(std::move(v));
  }
  return q;
}

std::vector<Vector> exact_spectrum_rows(Rng& rng, const double (&lambda)[3], std::size_t dim) {
  const auto rot = random_rotation(rng, dim);
  Vector shift(dim);
  for (auto& x : shift) x = uniform(rng, -5.0, 5.0);
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < 3; ++i) {
    for (const double sign : {1.0, -1.0}) {
      // Point sign * sqrt(lambda_i) * e_i in the rotated frame.
      Vector p = shift;
      for (std::size_t d = 0; d < dim; ++d) p[d] += sign * std::sqrt(lambda[i]) * rot[i][d];
      rows.push_back(std::move(p));
    }
  }
  return rows;
}

Eigen jacobi_eigen(std::vector<Vector> a) {
  const std::size_t n = a.size();
  std::vector<Vector> v(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  Eigen out;
  for (const auto i : order) {
    out.values.push_back(a[i][i]);
    Vector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

std::vector<Vector> scatter(const std::vector<Vector>& rows) {
  const std::size_t dim = rows.front().size();
  Vector mean(dim, 0.0);
  for (const auto& r : rows) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += r[d] / static_cast<double>(rows.size());
  }
  std::vector<Vector> s(dim, Vector(dim, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) s[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    }
  }
  return s;
}

std::vector<peers::PeerResult> oracle_rank(const EmbeddingMatrix& m, const Vector& query,
                                           std::size_t n, const std::vector<std::size_t>& anchors) {
  struct Entry {
    std::size_t row;
    double sim;
    int anchor;  // 0 for anchors so that ascending order puts them first
  };
  double qn = 0.0;
  for (const double x : query) qn += x * x;
  qn = std::sqrt(qn);
  std::vector<Entry> all;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.masked(r)) continue;
    const auto row = m.row(r);
    double rn = 0.0;
    double d = 0.0;
    bool identical = true;
    for (std::size_t i = 0; i < row.size(); ++i) {
      rn += static_cast<double>(row[i]) * static_cast<double>(row[i]);
      d += query[i] * static_cast<double>(row[i]);
      identical = identical && static_cast<double>(row[i]) == query[i];
    }
    if (rn == 0.0) continue;
    double sim = identical ? 1.0 : d / (qn * std::sqrt(rn));
    sim = std::min(1.0, std::max(-1.0, sim));
    const bool is_anchor = std::find(anchors.begin(), anchors.end(), r) != anchors.end();
    all.push_back({r, sim, is_anchor ? 0 : 1});
  }
  // Stable sorts from the least to the most significant key.
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.anchor < b.anchor; });
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.sim > b.sim; });
  std::vector<peers::PeerResult> out;
  for (std::size_t i = 0; i < std::min(n, all.size()); ++i) {
    out.push_back({all[i].row, m.id(all[i].row), m.name(all[i].row), all[i].sim});
  }
  return out;
}

Blobs planted_blobs(Rng& rng, std::size_t groups, std::size_t per_group, std::size_t dim,
                    double separation, double spread) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < groups * per_group; ++i) ids.push_back("p" + std::to_string(i));
  Blobs out{EmbeddingMatrix(ids, dim), {}};
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t i = 0; i < per_group; ++i) {
      Vector v(dim);
      for (std::size_t d = 0; d < dim; ++d) v[d] = (d == g ? separation : 0.0) + gaussian(rng, spread);
      out.matrix.set_row(g * per_group + i, std::span<const double>(v));
      out.labels.push_back("G" + std::to_string(g));
    }
  }
  return out;
}

Corpus make_corpus(std::uint64_t seed) {
  Rng rng(seed);
  constexpr std::size_t kDim = 24;
  constexpr std::size_t kClasses = 8;
  constexpr std::size_t kTopicWords = 25;
  constexpr std::size_t kImageWords = 10;
  constexpr std::size_t kGenericWords = 200;
  const std::size_t sizes[kClasses] = {150, 110, 90, 70, 55, 45, 40, 40};
  const char* labels[kClasses] = {"A", "C", "F", "G", "J", "K", "M", "N"};

  Corpus corpus{{}, wordvec::WordVectorTable(kDim)};
  std::vector<Vector> centers;
  for (std::size_t c = 0; c < kClasses; ++c) {
    Vector v(kDim);
    for (auto& x : v) x = gaussian(rng);
    centers.push_back(std::move(v));
  }
  auto add_word = [&](const std::string& word, const Vector* center, double noise) {
    std::vector<float> v(kDim);
    for (std::size_t d = 0; d < kDim; ++d) {
      v[d] = static_cast<float>((center ? (*center)[d] : 0.0) + gaussian(rng, noise));
    }
    corpus.table.add(word, v);
  };
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t i = 0; i < kTopicWords; ++i) {
      add_word("topic" + std::string(labels[c]) + std::to_string(i), &centers[c], 0.7);
    }
    for (std::size_t i = 0; i < kImageWords; ++i) {
      add_word("bild" + std::string(labels[c]) + std::to_string(i), &centers[c], 0.7);
    }
  }
  for (std::size_t i = 0; i < kGenericWords; ++i) add_word("allgemein" + std::to_string(i), nullptr, 1.0);

  auto topic = [&](std::size_t c) {
    return "topic" + std::string(labels[c]) + std::to_string(pick(rng, kTopicWords));
  };
  std::size_t serial = 0;
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      embed::CompanyRecord r;
      ++serial;
      r.id = "F" + std::to_string(1000 + serial);
      r.name = "Firma " + std::to_string(serial);
      r.url = "https://firma" + std::to_string(serial) + ".example";
      r.nace_level1 = labels[c];
      r.nace_level2 = std::string(labels[c]) + (i % 2 == 0 ? "01" : "02");
      for (int t = 0; t < 30; ++t) {
        r.text_tokens.push_back(uniform(rng) < 0.35 ? topic(c)
                                                    : "allgemein" + std::to_string(pick(rng, kGenericWords)));
      }
      // Words outside the vocabulary exercise the resolved-token divisor.
      r.text_tokens.push_back("unbekannt" + std::to_string(pick(rng, 5)));
      for (int t = 0; t < 3; ++t) {
        const std::size_t cls = uniform(rng) < 0.3 ? c : pick(rng, kClasses);
        r.image_tokens.push_back("bild" + std::string(labels[cls]) + std::to_string(pick(rng, kImageWords)));
      }
      if (uniform(rng) < 0.45) {
        const std::size_t count = 1 + pick(rng, 2);
        for (std::size_t t = 0; t < count; ++t) {
          r.alt_tokens.push_back(topic(uniform(rng) < 0.7 ? c : pick(rng, kClasses)));
        }
      }
      corpus.records.push_back(std::move(r));
    }
  }
  // Interleave classes so row order carries no label information.
  std::shuffle(corpus.records.begin(), corpus.records.end(), rng);
  return corpus;
}

store::EngineSnapshot random_snapshot(Rng& rng) {
  store::EngineSnapshot s;
  MatrixShape shape;
  shape.rows = 3 + pick(rng, 60);
  shape.dim = 1 + pick(rng, 8);
  shape.mask_prob = uniform(rng, 0.0, 0.3);
  shape.dup_prob = 0.1;
  s.matrix = random_matrix(rng, shape);
  if (s.matrix.active_count() == 0) {
    Vector v(shape.dim, 1.0);
    s.matrix.set_row(0, std::span<const double>(v));
  }
  std::vector<std::string> names;
  for (std::size_t r = 0; r < s.matrix.rows(); ++r) {
    names.push_back(pick(rng, 4) == 0 ? "" : "Firma \"" + std::to_string(r) + "\" Straße\t");
  }
  s.matrix.set_names(names);
  const char* level1[] = {"A", "C", "G", "K"};
  for (std::size_t r = 0; r < s.matrix.rows(); ++r) {
    if (pick(rng, 5) == 0) {
      s.nace_level1.push_back(std::nullopt);
      s.nace_level2.push_back(std::nullopt);
      continue;
    }
    const std::string l = level1[pick(rng, 4)];
    s.nace_level1.push_back(l);
    s.nace_level2.push_back(l + std::to_string(10 + pick(rng, 5)));
  }
  s.strategy = static_cast<embed::EmbeddingStrategy>(pick(rng, 5));
  if (pick(rng, 2) == 0) {
    // Orthonormal float components: signed unit basis vectors.
    reduce::PcaModel pca;
    const std::size_t in_dim = shape.dim + pick(rng, 5);
    pca.mean.resize(in_dim);
    for (auto& v : pca.mean) v = static_cast<float>(gaussian(rng));
    std::vector<std::size_t> axes(in_dim);
    std::iota(axes.begin(), axes.end(), 0);
    std::shuffle(axes.begin(), axes.end(), rng);
    double remaining = 1.0;
    double previous = 1.0;
    for (std::size_t c = 0; c < shape.dim; ++c) {
      Vector comp(in_dim, 0.0);
      comp[axes[c]] = 1.0;
      pca.components.push_back(std::move(comp));
      const double ratio = std::min(previous, remaining * uniform(rng, 0.3, 0.7));
      pca.explained_ratio.push_back(ratio);
      remaining -= ratio;
      previous = ratio;
    }
    s.pca = std::move(pca);
  }
  if (pick(rng, 2) == 0 && s.matrix.active_count() >= 1) {
    segment::SegmentationModel seg;
    seg.k = 1 + pick(rng, std::min<std::size_t>(4, s.matrix.active_count()));
    for (std::size_t c = 0; c < seg.k; ++c) {
      Vector centroid(shape.dim);
      for (auto& v : centroid) v = static_cast<float>(gaussian(rng));
      seg.centroids.push_back(std::move(centroid));
    }
    for (std::size_t r = 0; r < s.matrix.rows(); ++r) {
      seg.assignments.push_back(s.matrix.masked(r) ? segment::kUnassigned
                                                   : static_cast<int>(pick(rng, seg.k)));
    }
    seg.seed = rng();
    seg.iterations_run = pick(rng, 50);
    seg.converged = pick(rng, 2) == 0;
    double d = uniform(rng, 10.0, 100.0);
    for (std::size_t i = 0; i < seg.iterations_run; ++i) {
      seg.distortion_trace.push_back(d);
      d *= uniform(rng, 0.5, 1.0);
    }
    s.segmentation = std::move(seg);
  }
  s.provenance.source_digests["vectors.txt"] = "0123456789abcdef";
  if (pick(rng, 2)) s.provenance.seeds["segment"] = rng();
  return s;
}

void reseal(std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i + 8 < bytes.size(); ++i) {
    h ^= static_cast<unsigned char>(bytes[i]);
    h *= 1099511628211ull;
  }
  std::memcpy(bytes.data() + bytes.size() - 8, &h, 8);
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("c2v-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace c2v::testing
