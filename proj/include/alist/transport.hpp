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

// HTTP access for remote sources. FixtureTransport replays recorded
// responses from <dir>/<source>/<sha256("GET " + url)>.json.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "alist/errors.hpp"

namespace alist {

class Transport {
 public:
  virtual ~Transport() = default;

  /// Body of a successful GET; TransportError on any failure. Must be safe
  /// to call concurrently.
  virtual std::string get(const std::string& source, const std::string& url,
                          std::chrono::milliseconds timeout) const = 0;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw TransportError("sha256 failed");
  }
  std::string out;
  out.reserve(len * 2);
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

/// Recording key of a request.
inline std::string fixture_key(std::string_view url) { return sha256_hex("GET " + std::string(url)); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const std::string& source, const std::string& url) const {
    return dir_ / source / (fixture_key(url) + ".json");
  }

  std::string get(const std::string& source, const std::string& url,
                  std::chrono::milliseconds) const override {
    const auto path = path_for(source, url);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw TransportError("no recorded response for GET " + url + " (expected " + path.string() + ")");
    }
    return read_file(path);
  }

 private:
  std::filesystem::path dir_;
};

/// Fails every request; used when offline without a fixture directory.
class NullTransport : public Transport {
 public:
  std::string get(const std::string&, const std::string& url, std::chrono::milliseconds) const override {
    throw TransportError("offline: no transport for GET " + url);
  }
};

}  // namespace alist
