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

#include "divsample/templates.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "divsample/error.hpp"

namespace divsample {

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

bool valid_slot_name(std::string_view name) {
  if (name.empty()) return false;
  for (const char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// Calls on_text for literal runs and on_slot for slot names, in order.
template <typename Text, typename Slot>
void scan(std::string_view id, std::string_view body, Text&& on_text, Slot&& on_slot) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find(kOpen, pos);
    if (open == std::string_view::npos) {
      on_text(body.substr(pos));
      return;
    }
    on_text(body.substr(pos, open - pos));
    const auto close = body.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) {
      throw DataError(fmt::format("template '{}': unterminated slot at offset {}", id, open));
    }
    const auto name = body.substr(open + kOpen.size(), close - open - kOpen.size());
    if (!valid_slot_name(name)) {
      throw DataError(fmt::format("template '{}': invalid slot name '{}'", id, name));
    }
    on_slot(name);
    pos = close + kClose.size();
  }
}

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string body)
    : id_(std::move(id)), body_(std::move(body)) {
  scan(id_, body_, [](std::string_view) {}, [&](std::string_view name) {
    slots_.emplace(name);
  });
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  out.reserve(body_.size());
  scan(
      id_, body_, [&](std::string_view t) { out += t; },
      [&](std::string_view name) {
        const auto it = values.find(std::string(name));
        if (it == values.end()) {
          throw DataError(fmt::format("template '{}': no value for slot '{}'", id_, name));
        }
        out += it->second;
      });
  return out;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw DataError(fmt::format("template directory '{}' does not exist", dir.string()));
  }
  TemplateLibrary lib;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read template '{}'", entry.path().string()));
    std::ostringstream body;
    body << in.rdbuf();
    lib.add(PromptTemplate(entry.path().stem().string(), body.str()));
  }
  return lib;
}

void TemplateLibrary::add(PromptTemplate t) {
  const std::string id = t.id();
  templates_.insert_or_assign(id, std::move(t));
}

const PromptTemplate& TemplateLibrary::get(std::string_view id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) {
    std::string known;
    for (const auto& [name, _] : templates_) known += (known.empty() ? "" : ", ") + name;
    throw UsageError(fmt::format("unknown template '{}' (available: {})", id,
                                 known.empty() ? "none" : known));
  }
  return it->second;
}

bool TemplateLibrary::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

std::set<std::string> TemplateLibrary::ids() const {
  std::set<std::string> out;
  for (const auto& [name, _] : templates_) out.insert(name);
  return out;
}

}  // namespace divsample
