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

// Webpage acquisition: HTTP fetch, visible-text and alt-tag extraction, and
// attachment of externally produced image class labels.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace c2v::ingest {

struct PageFetchResult {
  std::string url;
  int http_status = 0;  // 0 when the request never completed
  std::string raw_html;
};

struct RawChannels {
  std::string text;
  std::string alt;
  std::vector<std::string> image_labels;
};

struct FetchOptions {
  std::chrono::milliseconds timeout{10000};
  std::string user_agent = "c2v-ingest/1.0";
  int max_redirects = 5;
};

/// GET `url`. Non-200 answers are returned as data; transport failures
/// (DNS, refused, timeout) yield status 0 with an empty body.
PageFetchResult fetch_page(const std::string& url, const FetchOptions& options = {});

/// Fetches every URL with up to `workers` concurrent requests. Output order
/// follows input order.
std::vector<PageFetchResult> fetch_pages(const std::vector<std::string>& urls,
                                         const FetchOptions& options, unsigned workers);

/// Text nodes outside script/style/noscript/head-metadata/comments, each
/// tag boundary acting as a separator, joined with single spaces.
std::string extract_visible_text(std::string_view html);

/// Non-empty `alt` attributes of `img` elements in document order.
std::vector<std::string> extract_alt_tags(std::string_view html);

RawChannels extract_channels(std::string_view html);

/// Image labels file: `record_id<TAB>label1;label2;...` per line. Duplicate
/// ids: the last line wins.
class ImageLabelIndex {
 public:
  static ImageLabelIndex load(const std::filesystem::path& path);
  static ImageLabelIndex parse(std::string_view content);

  /// Labels for `record_id`, empty when absent.
  std::vector<std::string> labels_for(const std::string& record_id) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> labels_;
};

std::vector<std::string> attach_image_labels(const std::string& record_id,
                                             const std::filesystem::path& labels_file);

/// Reads a URL list (one per line; blank lines and `#` comments skipped).
std::vector<std::string> read_url_list(const std::filesystem::path& path);

/// Scrape table row: one fetched page reduced to its raw channels.
struct ScrapeRow {
  std::string url;
  int http_status = 0;
  RawChannels channels;
};

/// `url<TAB>status<TAB>text<TAB>alt` lines. Tabs and newlines inside fields
/// are folded to spaces; alt tags are joined with " | ".
void write_scrape_table(const std::filesystem::path& path, const std::vector<ScrapeRow>& rows);
std::vector<ScrapeRow> read_scrape_table(const std::filesystem::path& path);

}  // namespace c2v::ingest
