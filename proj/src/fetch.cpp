#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "corrkit/errors.hpp"
#include "corrkit/series.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace corrkit {

namespace {

// FNV-1a, printed as 16 hex digits; stable across platforms.
std::string url_hash(const std::string& url) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : url) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct UrlParts {
  std::string scheme_host;  // e.g. http://host:port
  std::string path;
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw InputError("fetch: url must start with http:// or https://");
  auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_start == std::string::npos) {
    parts.scheme_host = url;
    parts.path = "/";
  } else {
    parts.scheme_host = url.substr(0, path_start);
    parts.path = url.substr(path_start);
  }
  return parts;
}

}  // namespace

std::string cache_path_for_url(const std::string& cache_dir,
                               const std::string& url) {
  return (std::filesystem::path(cache_dir) / (url_hash(url) + ".csv")).string();
}

RawSeries fetch_remote_series(const std::string& url,
                              const std::string& cache_dir,
                              const std::string& date_column,
                              const std::string& value_column) {
  const std::string cache_file = cache_path_for_url(cache_dir, url);
  if (std::filesystem::exists(cache_file)) {
    std::ifstream in(cache_file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_series_csv(buf.str(), date_column, value_column, url);
  }

  UrlParts parts = split_url(url);
  httplib::Client client(parts.scheme_host);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(parts.path);
  if (!res)
    throw NetworkError("fetch failed: no response from " + url);
  if (res->status != 200)
    throw NetworkError("fetch failed: HTTP " + std::to_string(res->status) +
                       " from " + url);

  // Validate before caching so a bad payload never poisons the cache.
  RawSeries series = parse_series_csv(res->body, date_column, value_column, url);

  std::filesystem::create_directories(cache_dir);
  std::ofstream out(cache_file, std::ios::binary);
  if (!out) throw InputError("fetch: cannot write cache file: " + cache_file);
  out << res->body;
  return series;
}

}  // namespace corrkit
