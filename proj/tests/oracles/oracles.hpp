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

// Reference implementations used as test oracles. They are written from
// first principles with standard containers and share no code with the
// library under test.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Doc {
  std::string id;
  std::vector<std::pair<std::string, std::string>> relations;  // (organism, chemical)
};

inline double entropy(const std::map<std::string, long>& counts) {
  double total = 0.0;
  for (const auto& [k, c] : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw std::domain_error("empty distribution");
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

struct Step {
  std::string doc_id;
  double h_organisms;
  double h_chemicals;
  double distance;
};

// Exhaustive greedy: every step recounts the candidate sample from scratch
// and evaluates every remaining document.
inline std::vector<Step> greedy(const std::vector<Doc>& docs, double tie = 1e-12) {
  std::set<std::string> all_o, all_c;
  for (const auto& d : docs) {
    for (const auto& [o, c] : d.relations) {
      all_o.insert(o);
      all_c.insert(c);
    }
  }
  const double uo = std::log(static_cast<double>(all_o.size()));
  const double uc = std::log(static_cast<double>(all_c.size()));
  std::vector<std::size_t> chosen;
  std::vector<bool> used(docs.size(), false);
  std::vector<Step> steps;
  for (std::size_t step = 0; step < docs.size(); ++step) {
    std::vector<std::pair<double, std::size_t>> scored;
    std::vector<std::pair<double, double>> hs(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (used[i]) continue;
      std::map<std::string, long> co, cc;
      auto add = [&](const Doc& d) {
        for (const auto& [o, c] : d.relations) {
          ++co[o];
          ++cc[c];
        }
      };
      for (auto j : chosen) add(docs[j]);
      add(docs[i]);
      const double ho = entropy(co), hc = entropy(cc);
      hs[i] = {ho, hc};
      scored.emplace_back(std::hypot(ho - uo, hc - uc), i);
    }
    double best = scored.front().first;
    for (const auto& s : scored) best = std::min(best, s.first);
    std::optional<std::size_t> pick;
    for (const auto& [dist, i] : scored) {
      if (dist - best > tie) continue;
      if (!pick || docs[i].id < docs[*pick].id) pick = i;
    }
    used[*pick] = true;
    chosen.push_back(*pick);
    double dist = 0.0;
    for (const auto& s : scored) {
      if (s.second == *pick) dist = s.first;
    }
    steps.push_back({docs[*pick].id, hs[*pick].first, hs[*pick].second, dist});
  }
  return steps;
}

// Kneedle-style knee: after min-max normalization of both axes, the index
// with the largest perpendicular distance above the chord through the first
// and last points, computed with a 2-D cross product. nullopt when no point
// lies strictly above the chord.
inline std::optional<std::size_t> knee(const std::vector<double>& y) {
  const std::size_t n = y.size();
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (n < 3 || *hi == *lo) return std::nullopt;
  auto px = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
  auto py = [&](std::size_t i) { return (y[i] - *lo) / (*hi - *lo); };
  const double ax = px(0), ay = py(0), bx = px(n - 1), by = py(n - 1);
  const double len = std::hypot(bx - ax, by - ay);
  std::optional<std::size_t> best;
  double best_d = 1e-9;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double cross = (bx - ax) * (py(i) - ay) - (by - ay) * (px(i) - ax);
    const double d = cross / len;
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline std::string lower_ascii(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline bool word_char(unsigned char ch) { return std::isalnum(ch) || ch >= 0x80; }

// Case-insensitive (ASCII) occurrence of needle not flanked by a letter or digit.
inline bool mentions(const std::string& text, const std::string& needle) {
  const auto t = lower_ascii(text), n = lower_ascii(needle);
  if (n.empty()) return false;
  for (auto pos = t.find(n); pos != std::string::npos; pos = t.find(n, pos + 1)) {
    const bool left = pos == 0 || !word_char(static_cast<unsigned char>(t[pos - 1]));
    const auto end = pos + n.size();
    const bool right = end == t.size() || !word_char(static_cast<unsigned char>(t[end]));
    if (left && right) return true;
  }
  return false;
}

// A label "stem X" (X a single capital letter) is implicitly mentioned by
// "stem(s) A-D", "stem(s) A to D" or "stem(s) A, C and F" covering X.
inline bool mentions_as_member(const std::string& text, const std::string& label) {
  static const std::regex split_re(R"(^(.{3,}) ([A-Z])$)");
  std::smatch m;
  if (!std::regex_match(label, m, split_re)) return false;
  const std::string stem = m[1];
  const char letter = m[2].str()[0];
  std::string escaped;
  for (char ch : lower_ascii(stem)) {
    if (std::string_view(R"(\^$.|?*+()[]{}-)").find(ch) != std::string_view::npos) escaped += '\\';
    escaped += ch;
  }
  const std::string t = lower_ascii(text);
  const std::regex range_re("(^|[^a-z0-9])" + escaped + "s? ([a-z]) ?(?:-|to) ?([a-z])(?![a-z0-9])");
  const char l = static_cast<char>(std::tolower(letter));
  for (std::sregex_iterator it(t.begin(), t.end(), range_re), end; it != end; ++it) {
    const char a = (*it)[2].str()[0], b = (*it)[3].str()[0];
    if (a <= l && l <= b) return true;
  }
  const std::regex list_re("(^|[^a-z0-9])" + escaped + "s? ([a-z](?:, [a-z])*,? (?:and|&) [a-z])(?![a-z0-9])");
  for (std::sregex_iterator it(t.begin(), t.end(), list_re), end; it != end; ++it) {
    const std::string letters = (*it)[2];
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const bool alone = (i == 0 || !std::isalpha(static_cast<unsigned char>(letters[i - 1]))) &&
                         (i + 1 == letters.size() || !std::isalpha(static_cast<unsigned char>(letters[i + 1])));
      if (alone && letters[i] == l) return true;
    }
  }
  return false;
}

struct Mentionable {
  std::string label;
  std::vector<std::string> synonyms;
};

inline bool entity_mentioned(const std::string& text, const Mentionable& e, bool allow_member) {
  if (mentions(text, e.label)) return true;
  for (const auto& s : e.synonyms) {
    if (mentions(text, s)) return true;
  }
  return allow_member && mentions_as_member(text, e.label);
}

// Fraction of (organism, chemical) pairs with both partners mentioned.
inline double coverage(const std::string& text,
                       const std::vector<std::pair<Mentionable, Mentionable>>& relations) {
  if (relations.empty()) return 0.0;
  std::size_t covered = 0;
  for (const auto& [o, c] : relations) {
    if (entity_mentioned(text, o, false) && entity_mentioned(text, c, true)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(relations.size());
}

// Micro precision, recall and F1 over sets of (organism, chemical) strings.
struct Prf {
  double p, r, f;
};

inline Prf micro(const std::vector<std::set<std::pair<std::string, std::string>>>& gold,
                 const std::vector<std::set<std::pair<std::string, std::string>>>& pred) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& g : gold[i]) (pred[i].contains(g) ? tp : fn) += 1;
    for (const auto& p : pred[i]) fp += gold[i].contains(p) ? 0 : 1;
  }
  const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return {p, r, p + r == 0.0 ? 0.0 : 2 * p * r / (p + r)};
}

}  // namespace oracle
