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

// Engine snapshots and company metadata.
//
// Snapshot container, all integers little-endian:
//   "C2V1"  u32 version  u32 section_count
//   section_count x (tag[4], u64 offset, u64 length)
//   section payloads
// Sections: META (JSON), IDS, NAME, LBL1, LBL2, MASK, EMBD (float32 rows),
// optional PCA and SEGM, PROV (JSON) and CSUM, the FNV-1a 64 hash of every
// byte before the CSUM payload. CSUM is always the last section.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "c2v/embed.hpp"
#include "c2v/matrix.hpp"
#include "c2v/reduce.hpp"
#include "c2v/segment.hpp"

namespace c2v::store {

inline constexpr std::uint32_t kFormatVersion = 1;

struct Provenance {
  std::map<std::string, std::string> source_digests;  // file name -> hex digest
  std::map<std::string, std::uint64_t> seeds;         // stage -> seed

  bool operator==(const Provenance&) const = default;
};

struct EngineSnapshot {
  std::uint32_t format_version = kFormatVersion;
  EmbeddingMatrix matrix;  // post-PCA when `pca` is present
  std::vector<std::optional<std::string>> nace_level1;  // per row
  std::vector<std::optional<std::string>> nace_level2;
  std::optional<reduce::PcaModel> pca;
  std::optional<segment::SegmentationModel> segmentation;
  embed::EmbeddingStrategy strategy = embed::EmbeddingStrategy::kText;
  Provenance provenance;

  bool operator==(const EngineSnapshot&) const = default;
};

/// Throws kInput when the parts disagree (label counts, PCA output dim vs
/// matrix dim, segmentation dims or assignment count).
void check_consistency(const EngineSnapshot& snapshot);

/// Container bytes. Vectors are written as float32, explained ratios and
/// the distortion trace as float64.
std::string serialize_snapshot(const EngineSnapshot& snapshot);
/// Full validation; throws kFormat on any structural or checksum problem
/// and kVersion for a newer container.
EngineSnapshot parse_snapshot(std::string_view bytes);

void save_snapshot(const EngineSnapshot& snapshot, const std::filesystem::path& path);
EngineSnapshot load_snapshot(const std::filesystem::path& path);

/// Hex FNV-1a 64 of `bytes`.
std::string digest(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

/// Scheme stripped, host lowercased, trailing slashes removed.
std::string normalize_url(std::string_view url);

struct ScrapedChannels {
  preprocess::TokenList text;
  preprocess::TokenList image;
  preprocess::TokenList alt;
};

/// Left join on normalize_url. Records without a scrape row keep empty
/// channels. For a duplicated URL the first row wins and a warning naming
/// it is appended to `warnings` when non-null.
std::vector<embed::CompanyRecord> join_metadata(
    std::vector<embed::CompanyRecord> records,
    const std::vector<std::pair<std::string, ScrapedChannels>>& scraped,
    std::vector<std::string>* warnings = nullptr);

/// Metadata file: tab-separated id, name, url, nace_level1, nace_level2
/// (labels may be empty). `#` lines are comments.
std::vector<embed::CompanyRecord> parse_metadata(std::string_view content);
std::vector<embed::CompanyRecord> load_metadata(const std::filesystem::path& path);

}  // namespace c2v::store
