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

#include "c2v/ingest.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "c2v/error.hpp"
#include "text_util.hpp"

namespace c2v::ingest {

namespace {

// ---------------------------------------------------------------------------
// URL handling

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path + query, never empty
};

bool split_url(const std::string& url, UrlParts& out) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return false;
  const std::string scheme = detail::ascii_lower(url.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") return false;
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find_first_of("/?#", host_begin);
  std::string host = url.substr(host_begin, path_begin == std::string::npos
                                                ? std::string::npos
                                                : path_begin - host_begin);
  if (host.empty()) return false;
  out.origin = scheme + "://" + host;
  out.target = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (out.target.front() != '/') out.target.insert(out.target.begin(), '/');
  if (const auto hash = out.target.find('#'); hash != std::string::npos) out.target.resize(hash);
  if (out.target.empty()) out.target = "/";
  return true;
}

std::string resolve_location(const UrlParts& base, const std::string& location) {
  if (location.find("://") != std::string::npos) return location;
  if (location.rfind("//", 0) == 0) {
    return base.origin.substr(0, base.origin.find("://") + 1) + location;
  }
  if (!location.empty() && location.front() == '/') return base.origin + location;
  auto dir = base.target.substr(0, base.target.rfind('/') + 1);
  return base.origin + dir + location;
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

// ---------------------------------------------------------------------------
// HTML scanning

enum class Skip { kNone, kRawText, kHead };

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

struct Tag {
  std::string name;  // lowercase, without '/'
  bool closing = false;
  std::string_view attrs;
};

// Parses the tag starting at html[pos] == '<'. Returns the index one past
// the closing '>' (or html.size() when unterminated).
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  tag.closing = i < html.size() && html[i] == '/';
  if (tag.closing) ++i;
  const std::size_t name_begin = i;
  while (i < html.size() && name_char(html[i])) ++i;
  tag.name = detail::ascii_lower(html.substr(name_begin, i - name_begin));
  const std::size_t attr_begin = i;
  char quote = 0;
  for (; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      tag.attrs = html.substr(attr_begin, i - attr_begin);
      return i + 1;
    }
  }
  tag.attrs = html.substr(attr_begin);
  return html.size();
}

// True when html[pos] == '<' opens markup rather than literal text.
bool opens_markup(std::string_view html, std::size_t pos) {
  if (pos + 1 >= html.size()) return false;
  const char c = html[pos + 1];
  return std::isalpha(static_cast<unsigned char>(c)) || c == '/' || c == '!' || c == '?';
}

// Skips a comment, doctype, CDATA or processing instruction at pos.
std::size_t skip_declaration(std::string_view html, std::size_t pos) {
  if (html.substr(pos, 4) == "<!--") {
    const auto end = html.find("-->", pos + 4);
    return end == std::string_view::npos ? html.size() : end + 3;
  }
  if (html.substr(pos, 9) == "<![CDATA[") {
    const auto end = html.find("]]>", pos + 9);
    return end == std::string_view::npos ? html.size() : end + 3;
  }
  const auto end = html.find('>', pos);
  return end == std::string_view::npos ? html.size() : end + 1;
}

std::size_t find_closing(std::string_view html, std::size_t from, std::string_view name) {
  for (std::size_t i = html.find("</", from); i != std::string_view::npos;
       i = html.find("</", i + 2)) {
    if (i + 2 + name.size() > html.size()) break;
    if (detail::ascii_lower(html.substr(i + 2, name.size())) == name) {
      const std::size_t after = i + 2 + name.size();
      if (after == html.size() || !name_char(html[after])) return i;
    }
  }
  return html.size();
}

bool is_raw_text_element(const std::string& name) {
  return name == "script" || name == "style" || name == "noscript" || name == "template";
}

// Extracts attribute `wanted` (lowercase) from the raw attribute text.
std::optional<std::string> attribute(std::string_view attrs, std::string_view wanted) {
  std::size_t i = 0;
  while (i < attrs.size()) {
    while (i < attrs.size() && (std::isspace(static_cast<unsigned char>(attrs[i])) || attrs[i] == '/')) ++i;
    const std::size_t name_begin = i;
    while (i < attrs.size() && !std::isspace(static_cast<unsigned char>(attrs[i])) &&
           attrs[i] != '=' && attrs[i] != '/') {
      ++i;
    }
    const std::string name = detail::ascii_lower(attrs.substr(name_begin, i - name_begin));
    while (i < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[i]))) ++i;
    std::string value;
    bool has_value = false;
    if (i < attrs.size() && attrs[i] == '=') {
      has_value = true;
      ++i;
      while (i < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[i]))) ++i;
      if (i < attrs.size() && (attrs[i] == '"' || attrs[i] == '\'')) {
        const char quote = attrs[i++];
        const auto end = attrs.find(quote, i);
        const std::size_t stop = end == std::string_view::npos ? attrs.size() : end;
        value = std::string(attrs.substr(i, stop - i));
        i = stop == attrs.size() ? stop : stop + 1;
      } else {
        const std::size_t begin = i;
        while (i < attrs.size() && !std::isspace(static_cast<unsigned char>(attrs[i]))) ++i;
        value = std::string(attrs.substr(begin, i - begin));
      }
    }
    if (name.empty()) {
      if (i == name_begin) ++i;
      continue;
    }
    if (name == wanted) return has_value ? value : std::string();
  }
  return std::nullopt;
}

template <class OnText, class OnTag>
void scan_html(std::string_view html, OnText&& on_text, OnTag&& on_tag) {
  Skip skip = Skip::kNone;
  std::size_t i = 0;
  while (i < html.size()) {
    const auto lt = html.find('<', i);
    const std::size_t text_end = lt == std::string_view::npos ? html.size() : lt;
    if (text_end > i && skip == Skip::kNone) on_text(html.substr(i, text_end - i));
    if (lt == std::string_view::npos) break;
    if (!opens_markup(html, lt)) {
      if (skip == Skip::kNone) on_text(html.substr(lt, 1));
      i = lt + 1;
      continue;
    }
    if (html[lt + 1] == '!' || html[lt + 1] == '?') {
      on_tag(Tag{});
      i = skip_declaration(html, lt);
      continue;
    }
    Tag tag;
    i = parse_tag(html, lt, tag);
    on_tag(tag);
    if (tag.closing) {
      if (tag.name == "head" && skip == Skip::kHead) skip = Skip::kNone;
      continue;
    }
    if (tag.name == "head") {
      skip = Skip::kHead;
    } else if (tag.name == "body" && skip == Skip::kHead) {
      skip = Skip::kNone;
    } else if (is_raw_text_element(tag.name)) {
      const bool self_closed = !tag.attrs.empty() && tag.attrs.back() == '/';
      if (!self_closed) {
        const auto close = find_closing(html, i, tag.name);
        i = close == html.size() ? close : parse_tag(html, close, tag);
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

PageFetchResult fetch_page(const std::string& url, const FetchOptions& options) {
  PageFetchResult result{url, 0, {}};
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  std::string current = url;
  for (int hop = 0;; ++hop) {
    UrlParts parts;
    if (!split_url(current, parts)) return result;
    const auto remaining = std::chrono::duration_cast<std::chrono::microseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) return PageFetchResult{url, 0, {}};
    // Connection and per-read waits split the budget so that a stalled peer
    // cannot hold the call past ~1.5x the timeout.
    const auto half = remaining / 2;
    httplib::Client client(parts.origin);
    client.set_connection_timeout(half);
    client.set_read_timeout(half);
    client.set_write_timeout(half);
    client.set_follow_location(false);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    client.enable_server_certificate_verification(false);
#endif
    const httplib::Headers headers{{"User-Agent", options.user_agent}};
    std::string body;
    auto response = client.Get(
        parts.target, headers,
        [&](const char* data, std::size_t len) {
          body.append(data, len);
          return std::chrono::steady_clock::now() < deadline;
        },
        [&](std::uint64_t, std::uint64_t) { return std::chrono::steady_clock::now() < deadline; });
    if (!response) return PageFetchResult{url, 0, {}};
    const int status = response->status;
    if (is_redirect(status) && hop < options.max_redirects &&
        response->has_header("Location")) {
      current = resolve_location(parts, response->get_header_value("Location"));
      continue;
    }
    result.http_status = status;
    result.raw_html = std::move(body);
    return result;
  }
}

std::vector<PageFetchResult> fetch_pages(const std::vector<std::string>& urls,
                                         const FetchOptions& options, unsigned workers) {
  std::vector<PageFetchResult> results(urls.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < urls.size(); i = next++) {
      results[i] = fetch_page(urls[i], options);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(urls.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return results;
}

std::string extract_visible_text(std::string_view html) {
  std::string out;
  bool pending_space = false;
  auto emit = [&](std::string_view chunk) {
    const std::string decoded = detail::decode_entities(chunk);
    for (const char c : decoded) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  };
  scan_html(html, emit, [&](const Tag&) { pending_space = true; });
  return out;
}

std::vector<std::string> extract_alt_tags(std::string_view html) {
  std::vector<std::string> alts;
  scan_html(
      html, [](std::string_view) {},
      [&](const Tag& tag) {
        if (tag.closing || tag.name != "img") return;
        if (auto alt = attribute(tag.attrs, "alt")) {
          std::string value = detail::collapse_whitespace(detail::decode_entities(*alt));
          if (!value.empty()) alts.push_back(std::move(value));
        }
      });
  return alts;
}

RawChannels extract_channels(std::string_view html) {
  RawChannels channels;
  channels.text = extract_visible_text(html);
  const auto alts = extract_alt_tags(html);
  for (std::size_t i = 0; i < alts.size(); ++i) {
    if (i) channels.alt += " | ";
    channels.alt += alts[i];
  }
  return channels;
}

ImageLabelIndex ImageLabelIndex::parse(std::string_view content) {
  ImageLabelIndex index;
  std::size_t line_no = 0;
  for (const auto& raw : detail::split_lines(content)) {
    ++line_no;
    const std::string line = detail::trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      fail(ErrorCode::kFormat,
           "image labels line " + std::to_string(line_no) + ": expected record_id<TAB>labels");
    }
    std::vector<std::string> labels;
    for (auto& label : detail::split(line.substr(tab + 1), ';')) {
      label = detail::collapse_whitespace(label);
      if (!label.empty()) labels.push_back(std::move(label));
    }
    index.labels_[line.substr(0, tab)] = std::move(labels);
  }
  return index;
}

ImageLabelIndex ImageLabelIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFormat, "cannot read image labels file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::vector<std::string> ImageLabelIndex::labels_for(const std::string& record_id) const {
  const auto it = labels_.find(record_id);
  return it == labels_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> attach_image_labels(const std::string& record_id,
                                             const std::filesystem::path& labels_file) {
  return ImageLabelIndex::load(labels_file).labels_for(record_id);
}

std::vector<std::string> read_url_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read URL list " + path.string());
  std::vector<std::string> urls;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    urls.push_back(line);
  }
  return urls;
}

void write_scrape_table(const std::filesystem::path& path, const std::vector<ScrapeRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write scrape table " + path.string());
  for (const auto& row : rows) {
    out << detail::fold_field(row.url) << '\t' << row.http_status << '\t'
        << detail::fold_field(row.channels.text) << '\t' << detail::fold_field(row.channels.alt)
        << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<ScrapeRow> read_scrape_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read scrape table " + path.string());
  std::vector<ScrapeRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() < 2 || fields.size() > 4) {
      fail(ErrorCode::kFormat, "scrape table line " + std::to_string(line_no) +
                                   ": expected 2-4 tab-separated fields");
    }
    ScrapeRow row;
    row.url = fields[0];
    try {
      row.http_status = std::stoi(fields[1]);
    } catch (const std::exception&) {
      fail(ErrorCode::kFormat, "scrape table line " + std::to_string(line_no) + ": bad status");
    }
    if (fields.size() > 2) row.channels.text = fields[2];
    if (fields.size() > 3) row.channels.alt = fields[3];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace c2v::ingest
