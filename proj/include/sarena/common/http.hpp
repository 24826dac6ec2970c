#pragma once

#include <chrono>
#include <map>
#include <string>

namespace sarena {

struct HttpResult {
  int status = 0;         // 0 when no response arrived
  std::string body;
  std::string error;      // transport failure, empty on success
  bool ok() const { return error.empty() && status >= 200 && status < 300; }
};

// POST a JSON body to an http:// or https:// URL.
HttpResult http_post_json(const std::string& url, const std::string& body,
                          const std::map<std::string, std::string>& headers,
                          std::chrono::milliseconds timeout);

}  // namespace sarena
