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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the corpus filters, mention matching and scoring.
namespace divsample::text {

/// A decoded code point with the byte range it occupies in the source.
struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

/// Decodes UTF-8. Ill-formed sequences decode to U+FFFD one byte at a time.
std::vector<CodePoint> decode(std::string_view s);

/// Number of unicode scalar values in s.
std::size_t scalar_count(std::string_view s);

/// Simple (one-to-one) unicode case folding.
char32_t fold(char32_t c);
std::string casefold(std::string_view s);

bool is_alnum(char32_t c);
bool is_space(char32_t c);

std::string_view trim(std::string_view s);

/// Trims and collapses every internal whitespace run to a single space.
std::string normalize_space(std::string_view s);

/// casefold(normalize_space(s)).
std::string fold_key(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

bool contains(std::string_view haystack, std::string_view needle);

void append_utf8(std::string& out, char32_t c);

}  // namespace divsample::text
