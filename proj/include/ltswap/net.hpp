#pragma once

#include <string>
#include <utility>
#include <vector>

#include <httplib.h>

#include "ltswap/error.hpp"

namespace ltswap::net {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

inline Url parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("not a URL: '" + url + "'");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme '" + scheme + "'");
  const auto path_begin = url.find('/', scheme_end + 3);
  Url u;
  u.origin = url.substr(0, path_begin);
  u.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (u.origin.size() <= scheme_end + 3) throw ConfigError("URL without host: '" + url + "'");
  return u;
}

using Headers = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body and returns the response body. Connection failures and
/// non-2xx statuses raise BackendError.
inline std::string post_json(const Url& url, const std::string& body, const Headers& headers = {},
                             int timeout_seconds = 60) {
  httplib::Client cli(url.origin);
  cli.set_connection_timeout(timeout_seconds, 0);
  cli.set_read_timeout(timeout_seconds, 0);
  cli.set_write_timeout(timeout_seconds, 0);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = cli.Post(url.path, h, body, "application/json");
  if (!res) throw BackendError("POST " + url.origin + url.path + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw BackendError("POST " + url.origin + url.path + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace ltswap::net
