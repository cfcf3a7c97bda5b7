// Copyright 2026 The Authors.
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

#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "divsample/error.hpp"
#include "divsample/synthgen.hpp"

namespace divsample {

using nlohmann::json;

HttpBackend::HttpBackend(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {
  if (url_.starts_with("https://")) throw UsageError(fmt::format("https is not supported: '{}'", url_));
  static const std::regex re(R"(^(http://[^/\s]+)(/\S*)?$)");
  std::smatch m;
  if (!std::regex_match(url_, m, re)) throw UsageError(fmt::format("malformed backend URL '{}'", url_));
  origin_ = m.str(1);
  path_ = m[2].matched ? m.str(2) : "/";
}

std::string HttpBackend::generate(const GenerationRequest& request) {
  httplib::Client client(origin_);
  if (!client.is_valid()) throw BackendError(fmt::format("unsupported backend URL '{}'", url_));
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  const json body{{"prompt", request.prompt},
                  {"temperature", request.temperature},
                  {"max_tokens", request.max_tokens}};
  const auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw BackendError(fmt::format("request to {} failed: {}", url_, httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw BackendError(fmt::format("{} answered HTTP {}", url_, res->status));
  }
  try {
    return json::parse(res->body).at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(fmt::format("{} returned an invalid reply: {}", url_, e.what()));
  }
}

}  // namespace divsample
