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

#include "c2v/store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::store {

namespace {

using Tag = std::array<char, 4>;

constexpr char kMagic[4] = {'C', '2', 'V', '1'};
constexpr std::size_t kHeaderSize = 12;
constexpr std::size_t kEntrySize = 20;
constexpr std::uint32_t kMaxSections = 64;

constexpr Tag kMeta{'M', 'E', 'T', 'A'};
constexpr Tag kIds{'I', 'D', 'S', ' '};
constexpr Tag kNames{'N', 'A', 'M', 'E'};
constexpr Tag kLabels1{'L', 'B', 'L', '1'};
constexpr Tag kLabels2{'L', 'B', 'L', '2'};
constexpr Tag kMask{'M', 'A', 'S', 'K'};
constexpr Tag kEmbedding{'E', 'M', 'B', 'D'};
constexpr Tag kPca{'P', 'C', 'A', ' '};
constexpr Tag kSegmentation{'S', 'E', 'G', 'M'};
constexpr Tag kProvenance{'P', 'R', 'O', 'V'};
constexpr Tag kChecksum{'C', 'S', 'U', 'M'};

std::string tag_name(const Tag& tag) { return std::string(tag.data(), 4); }

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { out_.append(s); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(need(1)[0]); }
  std::uint32_t u32() {
    const auto* p = need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() {
    const float v = std::bit_cast<float>(u32());
    if (!std::isfinite(v)) bad("non-finite value");
    return v;
  }
  double f64() {
    const double v = std::bit_cast<double>(u64());
    if (!std::isfinite(v)) bad("non-finite value");
    return v;
  }
  std::string str() {
    const std::uint32_t len = u32();
    const char* p = need(len);
    return std::string(p, len);
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  void finish() const {
    if (pos_ != data_.size()) bad("trailing bytes");
  }
  /// Count that must fit in the remaining bytes at `unit` bytes each.
  std::size_t count(std::uint64_t n, std::size_t unit) const {
    if (unit != 0 && n > remaining() / unit) bad("count exceeds section size");
    return static_cast<std::size_t>(n);
  }
  [[noreturn]] void bad(const std::string& why) const {
    fail(ErrorCode::kFormat, "snapshot section " + what_ + ": " + why);
  }

 private:
  const char* need(std::size_t n) {
    if (n > remaining()) bad("truncated");
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string encode_strings(const std::vector<std::string>& values) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(values.size()));
  for (const auto& v : values) w.str(v);
  return w.take();
}

std::vector<std::string> decode_strings(Reader r) {
  const std::size_t n = r.count(r.u32(), 4);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(r.str());
  r.finish();
  return out;
}

std::string encode_labels(const std::vector<std::optional<std::string>>& labels) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(labels.size()));
  for (const auto& l : labels) {
    w.u8(l ? 1 : 0);
    if (l) w.str(*l);
  }
  return w.take();
}

std::vector<std::optional<std::string>> decode_labels(Reader r) {
  const std::size_t n = r.count(r.u32(), 1);
  std::vector<std::optional<std::string>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto flag = r.u8();
    if (flag > 1) r.bad("bad presence flag");
    if (flag == 1) {
      out.emplace_back(r.str());
    } else {
      out.emplace_back();
    }
  }
  r.finish();
  return out;
}

std::string encode_pca(const reduce::PcaModel& pca) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(pca.input_dim()));
  w.u32(static_cast<std::uint32_t>(pca.output_dim()));
  for (const double v : pca.mean) w.f32(v);
  for (const auto& c : pca.components) {
    for (const double v : c) w.f32(v);
  }
  for (const double r : pca.explained_ratio) w.f64(r);
  return w.take();
}

reduce::PcaModel decode_pca(Reader r) {
  const std::size_t s = r.u32();
  const std::size_t m = r.u32();
  if (s == 0 || m == 0 || m > s) r.bad("bad dimensions");
  r.count(static_cast<std::uint64_t>(s) * (m + 1), 4);
  reduce::PcaModel pca;
  pca.mean.resize(s);
  for (auto& v : pca.mean) v = r.f32();
  pca.components.assign(m, Vector(s));
  for (auto& c : pca.components) {
    for (auto& v : c) v = r.f32();
  }
  pca.explained_ratio.resize(r.count(m, 8));
  for (auto& v : pca.explained_ratio) v = r.f64();
  r.finish();
  return pca;
}

std::string encode_segmentation(const segment::SegmentationModel& model) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(model.k));
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u64(model.seed);
  w.u64(model.iterations_run);
  w.u8(model.converged ? 1 : 0);
  for (const auto& c : model.centroids) {
    for (const double v : c) w.f32(v);
  }
  w.u32(static_cast<std::uint32_t>(model.assignments.size()));
  for (const int a : model.assignments) w.i32(a);
  w.u32(static_cast<std::uint32_t>(model.distortion_trace.size()));
  for (const double d : model.distortion_trace) w.f64(d);
  return w.take();
}

segment::SegmentationModel decode_segmentation(Reader r) {
  segment::SegmentationModel model;
  model.k = r.u32();
  const std::size_t dim = r.u32();
  if (model.k == 0 || dim == 0) r.bad("bad dimensions");
  model.seed = r.u64();
  model.iterations_run = r.u64();
  const auto converged = r.u8();
  if (converged > 1) r.bad("bad flag");
  model.converged = converged == 1;
  r.count(static_cast<std::uint64_t>(model.k) * dim, 4);
  model.centroids.assign(model.k, Vector(dim));
  for (auto& c : model.centroids) {
    for (auto& v : c) v = r.f32();
  }
  model.assignments.resize(r.count(r.u32(), 4));
  for (auto& a : model.assignments) a = r.i32();
  model.distortion_trace.resize(r.count(r.u32(), 8));
  for (auto& d : model.distortion_trace) d = r.f64();
  r.finish();
  return model;
}

nlohmann::json provenance_json(const Provenance& p) {
  return nlohmann::json{{"source_digests", p.source_digests}, {"seeds", p.seeds}};
}

nlohmann::json parse_json(std::string_view bytes, const char* what) {
  auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(ErrorCode::kFormat, std::string("snapshot section ") + what + ": invalid JSON");
  }
  return j;
}

}  // namespace

void check_consistency(const EngineSnapshot& s) {
  const std::size_t rows = s.matrix.rows();
  if (rows == 0) fail(ErrorCode::kInput, "snapshot has no rows");
  if (s.matrix.dim() == 0) fail(ErrorCode::kInput, "snapshot has zero dimension");
  if (s.nace_level1.size() != rows || s.nace_level2.size() != rows) {
    fail(ErrorCode::kInput, "snapshot label count does not match rows");
  }
  if (s.pca && s.pca->output_dim() != s.matrix.dim()) {
    fail(ErrorCode::kInput, "snapshot PCA output dim " + std::to_string(s.pca->output_dim()) +
                                " does not match matrix dim " + std::to_string(s.matrix.dim()));
  }
  if (s.segmentation) {
    try {
      segment::validate(*s.segmentation, rows, s.matrix.dim());
    } catch (const Error& e) {
      fail(ErrorCode::kInput, e.what());
    }
  }
}

std::string serialize_snapshot(const EngineSnapshot& s) {
  check_consistency(s);
  const auto& m = s.matrix;
  std::vector<std::pair<Tag, std::string>> sections;

  nlohmann::json meta{{"rows", m.rows()},
                      {"dim", m.dim()},
                      {"strategy", embed::to_string(s.strategy)}};
  sections.emplace_back(kMeta, meta.dump());
  sections.emplace_back(kIds, encode_strings(m.ids()));
  std::vector<std::string> names;
  names.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) names.push_back(m.name(r));
  sections.emplace_back(kNames, encode_strings(names));
  sections.emplace_back(kLabels1, encode_labels(s.nace_level1));
  sections.emplace_back(kLabels2, encode_labels(s.nace_level2));
  std::string mask(m.rows(), '\0');
  for (std::size_t r = 0; r < m.rows(); ++r) mask[r] = m.masked(r) ? 1 : 0;
  sections.emplace_back(kMask, mask);
  Writer emb;
  for (const float v : m.data()) emb.f32(v);
  sections.emplace_back(kEmbedding, emb.take());
  if (s.pca) sections.emplace_back(kPca, encode_pca(*s.pca));
  if (s.segmentation) sections.emplace_back(kSegmentation, encode_segmentation(*s.segmentation));
  sections.emplace_back(kProvenance, provenance_json(s.provenance).dump());

  const std::size_t count = sections.size() + 1;
  std::uint64_t offset = kHeaderSize + kEntrySize * count;
  Writer w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(count));
  for (const auto& [tag, payload] : sections) {
    w.bytes(std::string_view(tag.data(), 4));
    w.u64(offset);
    w.u64(payload.size());
    offset += payload.size();
  }
  w.bytes(std::string_view(kChecksum.data(), 4));
  w.u64(offset);
  w.u64(8);
  for (const auto& [tag, payload] : sections) w.bytes(payload);
  std::string out = w.take();
  Writer sum;
  sum.u64(detail::fnv1a64(out));
  out += sum.take();
  return out;
}

EngineSnapshot parse_snapshot(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::kFormat, "not a c2v snapshot (bad magic)");
  }
  Reader header(bytes.substr(4), "header");
  const std::uint32_t version = header.u32();
  if (version == 0) fail(ErrorCode::kFormat, "snapshot version 0 is invalid");
  if (version > kFormatVersion) {
    fail(ErrorCode::kVersion, "snapshot version " + std::to_string(version) +
                                  " is newer than supported version " +
                                  std::to_string(kFormatVersion));
  }
  const std::uint32_t count = header.u32();
  if (count == 0 || count > kMaxSections) fail(ErrorCode::kFormat, "bad section count");
  const std::uint64_t table_end = kHeaderSize + static_cast<std::uint64_t>(kEntrySize) * count;
  if (table_end > bytes.size()) fail(ErrorCode::kFormat, "section table truncated");

  std::map<Tag, std::string_view> found;
  Tag last{};
  std::uint64_t last_offset = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    Tag tag;
    std::memcpy(tag.data(), bytes.data() + kHeaderSize + kEntrySize * i, 4);
    (void)header.u32();  // the tag bytes
    const std::uint64_t offset = header.u64();
    const std::uint64_t length = header.u64();
    if (offset < table_end || offset > bytes.size() || length > bytes.size() - offset) {
      fail(ErrorCode::kFormat, "section " + tag_name(tag) + " lies outside the file");
    }
    if (!found.emplace(tag, bytes.substr(offset, length)).second) {
      fail(ErrorCode::kFormat, "duplicate section " + tag_name(tag));
    }
    last = tag;
    last_offset = offset;
  }
  if (last != kChecksum || found[kChecksum].size() != 8 || last_offset + 8 != bytes.size()) {
    fail(ErrorCode::kFormat, "missing or misplaced checksum section");
  }
  Reader sum(found[kChecksum], "CSUM");
  if (sum.u64() != detail::fnv1a64(bytes.substr(0, last_offset))) {
    fail(ErrorCode::kFormat, "snapshot checksum mismatch");
  }
  for (const auto& tag : {kMeta, kIds, kNames, kLabels1, kLabels2, kMask, kEmbedding, kProvenance}) {
    if (!found.contains(tag)) fail(ErrorCode::kFormat, "missing section " + tag_name(tag));
  }

  EngineSnapshot s;
  s.format_version = version;
  const auto meta = parse_json(found[kMeta], "META");
  std::size_t rows = 0;
  std::size_t dim = 0;
  try {
    rows = meta.at("rows").get<std::size_t>();
    dim = meta.at("dim").get<std::size_t>();
    s.strategy = embed::parse_strategy(meta.at("strategy").get<std::string>());
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kFormat, "snapshot section META: missing or mistyped field");
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, std::string("snapshot section META: ") + e.what());
  }
  if (rows == 0 || dim == 0) fail(ErrorCode::kFormat, "snapshot section META: empty matrix");

  auto ids = decode_strings(Reader(found[kIds], "IDS"));
  auto names = decode_strings(Reader(found[kNames], "NAME"));
  s.nace_level1 = decode_labels(Reader(found[kLabels1], "LBL1"));
  s.nace_level2 = decode_labels(Reader(found[kLabels2], "LBL2"));
  const auto mask = found[kMask];
  if (ids.size() != rows || names.size() != rows || mask.size() != rows ||
      s.nace_level1.size() != rows || s.nace_level2.size() != rows) {
    fail(ErrorCode::kFormat, "snapshot sections disagree on the row count");
  }
  std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) fail(ErrorCode::kFormat, "snapshot has duplicate company ids");
  if (found[kEmbedding].size() / 4 / dim != rows || found[kEmbedding].size() != rows * dim * 4) {
    fail(ErrorCode::kFormat, "snapshot section EMBD has the wrong size");
  }

  s.matrix = EmbeddingMatrix(std::move(ids), dim);
  s.matrix.set_names(std::move(names));
  Reader emb(found[kEmbedding], "EMBD");
  std::vector<float> row(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : row) v = emb.f32();
    if (mask[r] == 0) {
      s.matrix.set_row(r, std::span<const float>(row));
    } else if (mask[r] == 1) {
      for (const float v : row) {
        if (v != 0.0f) emb.bad("masked row holds data");
      }
    } else {
      fail(ErrorCode::kFormat, "snapshot section MASK: bad flag");
    }
  }

  if (found.contains(kPca)) {
    s.pca = decode_pca(Reader(found[kPca], "PCA"));
    reduce::validate(*s.pca);
    if (s.pca->output_dim() != dim) fail(ErrorCode::kFormat, "snapshot PCA does not match matrix dim");
  }
  if (found.contains(kSegmentation)) {
    s.segmentation = decode_segmentation(Reader(found[kSegmentation], "SEGM"));
    segment::validate(*s.segmentation, rows, dim);
    for (std::size_t r = 0; r < rows; ++r) {
      if ((s.segmentation->assignments[r] == segment::kUnassigned) != s.matrix.masked(r)) {
        fail(ErrorCode::kFormat, "snapshot segmentation disagrees with the mask");
      }
    }
  }

  const auto prov = parse_json(found[kProvenance], "PROV");
  try {
    s.provenance.source_digests =
        prov.at("source_digests").get<std::map<std::string, std::string>>();
    s.provenance.seeds = prov.at("seeds").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kFormat, "snapshot section PROV: missing or mistyped field");
  }
  return s;
}

void save_snapshot(const EngineSnapshot& snapshot, const std::filesystem::path& path) {
  const std::string bytes = serialize_snapshot(snapshot);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write snapshot " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot write snapshot " + path.string());
  }
}

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, std::string("cannot read ") + what + " " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

EngineSnapshot load_snapshot(const std::filesystem::path& path) {
  return parse_snapshot(read_file(path, "snapshot"));
}

std::string digest(std::string_view bytes) { return detail::hex64(detail::fnv1a64(bytes)); }

std::string file_digest(const std::filesystem::path& path) {
  return digest(read_file(path, "file"));
}

std::string normalize_url(std::string_view url) {
  std::string s = detail::trim(url);
  if (const auto scheme = s.find("://"); scheme != std::string::npos) s.erase(0, scheme + 3);
  const auto slash = s.find('/');
  const std::string host = detail::ascii_lower(s.substr(0, slash));
  std::string path = slash == std::string::npos ? "" : s.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return host + path;
}

std::vector<embed::CompanyRecord> join_metadata(
    std::vector<embed::CompanyRecord> records,
    const std::vector<std::pair<std::string, ScrapedChannels>>& scraped,
    std::vector<std::string>* warnings) {
  std::unordered_map<std::string, const ScrapedChannels*> by_url;
  for (const auto& [url, channels] : scraped) {
    if (!by_url.emplace(normalize_url(url), &channels).second && warnings) {
      warnings->push_back("duplicate scrape row for '" + url + "'; keeping the first");
    }
  }
  for (auto& record : records) {
    const auto it = by_url.find(normalize_url(record.url));
    if (it == by_url.end()) continue;
    record.text_tokens = it->second->text;
    record.image_tokens = it->second->image;
    record.alt_tokens = it->second->alt;
  }
  return records;
}

std::vector<embed::CompanyRecord> parse_metadata(std::string_view content) {
  std::vector<embed::CompanyRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split_lines(content)) {
    ++line_no;
    const auto line = detail::trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() < 3 || cols.size() > 5) {
      fail(ErrorCode::kParse, "metadata line " + std::to_string(line_no) + ": expected 3 to 5 columns");
    }
    embed::CompanyRecord r;
    r.id = detail::trim(cols[0]);
    if (r.id.empty()) fail(ErrorCode::kParse, "metadata line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert(r.id).second) {
      fail(ErrorCode::kInput, "metadata line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
    }
    r.name = cols[1];
    r.url = detail::trim(cols[2]);
    if (cols.size() > 3 && !detail::trim(cols[3]).empty()) r.nace_level1 = detail::trim(cols[3]);
    if (cols.size() > 4 && !detail::trim(cols[4]).empty()) r.nace_level2 = detail::trim(cols[4]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<embed::CompanyRecord> load_metadata(const std::filesystem::path& path) {
  return parse_metadata(read_file(path, "metadata"));
}

}  // namespace c2v::store
