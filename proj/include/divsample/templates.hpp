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

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace divsample {

/// A plain-text prompt with `{{name}}` slots.
class PromptTemplate {
 public:
  /// Throws DataError on an unterminated or malformed slot.
  PromptTemplate(std::string id, std::string body);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  const std::set<std::string>& slots() const { return slots_; }

  /// Substitutes every slot in a single pass; values are inserted verbatim
  /// and never rescanned. Throws DataError when a slot has no value.
  std::string render(const std::map<std::string, std::string>& values) const;

 private:
  std::string id_;
  std::string body_;
  std::set<std::string> slots_;
};

/// Templates stored as `<id>.txt` in a directory.
class TemplateLibrary {
 public:
  static TemplateLibrary load(const std::filesystem::path& dir);

  void add(PromptTemplate t);
  /// Throws UsageError for an unknown id.
  const PromptTemplate& get(std::string_view id) const;
  bool contains(std::string_view id) const;
  std::set<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace divsample
