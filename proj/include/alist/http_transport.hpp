// Copyright 2026 The Alist Authors
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

#pragma once

// Live HTTP(S) transport. Pulls in cpp-httplib with OpenSSL; link
// OpenSSL::SSL and OpenSSL::Crypto.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <chrono>
#include <string>

#include "alist/transport.hpp"

namespace alist {

class LiveTransport : public Transport {
 public:
  explicit LiveTransport(int retries = 1) : retries_(retries) {}

  std::string get(const std::string& source, const std::string& url,
                  std::chrono::milliseconds timeout) const override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    std::string last_error;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      httplib::Client client(origin);
      client.set_follow_location(true);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      httplib::Headers headers{{"Accept", "application/sparql-results+json, application/json"},
                               {"User-Agent", "alist/0.1"}};
      auto res = client.Get(path, headers);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 200 && res->status < 300) return res->body;
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status < 500) break;
    }
    throw TransportError(source + ": GET " + url + " failed: " + last_error);
  }

 private:
  int retries_;
};

}  // namespace alist
