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

#include "divsample/mention.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "divsample/error.hpp"
#include "divsample/text.hpp"

namespace divsample {

using nlohmann::json;

std::string_view to_string(MentionStatus s) {
  switch (s) {
    case MentionStatus::matched_label:
      return "matched_label";
    case MentionStatus::matched_synonym:
      return "matched_synonym";
    case MentionStatus::multiple_implicit:
      return "multiple_implicit";
    case MentionStatus::not_found:
      return "not_found";
  }
  return "not_found";
}

std::string_view to_string(EnumerationKind k) {
  switch (k) {
    case EnumerationKind::letter_range:
      return "letter_range";
    case EnumerationKind::letter_list:
      return "letter_list";
    case EnumerationKind::numbered_range:
      return "numbered_range";
  }
  return "letter_range";
}

namespace {

struct FoldedText {
  std::vector<char32_t> folded;
  std::vector<text::CodePoint> cps;

  explicit FoldedText(std::string_view s) : cps(text::decode(s)) {
    folded.reserve(cps.size());
    for (const auto& cp : cps) folded.push_back(text::fold(cp.value));
  }
};

std::optional<TextSpan> find_in(const FoldedText& hay, std::string_view needle) {
  const FoldedText pattern(text::trim(needle));
  const auto& h = hay.folded;
  const auto& p = pattern.folded;
  if (p.empty() || p.size() > h.size()) return std::nullopt;
  for (std::size_t i = 0; i + p.size() <= h.size(); ++i) {
    if (!std::equal(p.begin(), p.end(), h.begin() + static_cast<std::ptrdiff_t>(i))) continue;
    const bool left_ok = i == 0 || !text::is_alnum(hay.cps[i - 1].value);
    const std::size_t after = i + p.size();
    const bool right_ok = after == h.size() || !text::is_alnum(hay.cps[after].value);
    if (left_ok && right_ok) return TextSpan{hay.cps[i].begin, hay.cps[after - 1].end};
  }
  return std::nullopt;
}

MentionVerdict match_folded(std::string_view abstract, const FoldedText& folded,
                            const Entity& entity, std::span<const std::string> extra) {
  MentionVerdict v;
  v.entity_id = entity.id;
  v.kind = entity.kind;
  auto set_match = [&](MentionStatus status, TextSpan span) {
    v.status = status;
    v.span = span;
    v.matched_surface = std::string(abstract.substr(span.begin, span.end - span.begin));
  };
  if (const auto span = find_in(folded, entity.label)) {
    set_match(MentionStatus::matched_label, *span);
    return v;
  }
  std::optional<TextSpan> best;
  auto consider = [&](const std::string& synonym) {
    const auto span = find_in(folded, synonym);
    if (span && (!best || span->begin < best->begin)) best = span;
  };
  for (const auto& s : entity.synonyms) consider(s);
  for (const auto& s : extra) consider(s);
  if (best) set_match(MentionStatus::matched_synonym, *best);
  return v;
}

// The enumeration grammar runs over an ASCII shadow of the text holding one
// character per code point: non-ASCII letters and digits become 'x', unicode
// dashes '-', primes and apostrophes '\'', spaces ' ', anything else '#'.
struct Shadow {
  std::string ascii;
  std::vector<text::CodePoint> cps;
};

Shadow make_shadow(std::string_view s) {
  Shadow sh;
  sh.cps = text::decode(s);
  sh.ascii.reserve(sh.cps.size());
  for (const auto& cp : sh.cps) {
    const char32_t c = cp.value;
    if (c < 0x80) {
      sh.ascii += static_cast<char>(c);
    } else if ((c >= 0x2010 && c <= 0x2015) || c == 0x2212 || c == 0xFE63 || c == 0xFF0D) {
      sh.ascii += '-';
    } else if (c == 0x2019 || c == 0x2032 || c == 0x2033) {
      sh.ascii += '\'';
    } else if (text::is_space(c)) {
      sh.ascii += ' ';
    } else if (text::is_alnum(c)) {
      sh.ascii += 'x';
    } else {
      sh.ascii += '#';
    }
  }
  return sh;
}

// Head nouns that take the preceding word into the stem ("ganoderic acids").
const std::set<std::string>& generic_heads() {
  static const std::set<std::string> heads{"acid",    "ester",    "amide",   "lactone",
                                           "glycoside", "alkaloid", "peptide", "ether",
                                           "aldehyde",  "oxide",    "lactam",  "anhydride"};
  return heads;
}

// Groups: 1 previous word (optional), 2 stem word, then per pattern.
constexpr const char* kWord = "[A-Za-z0-9x'][A-Za-z0-9x'\\-]*[A-Za-z]";
constexpr const char* kBoundary = "(?![A-Za-z0-9x])";

const std::regex& range_regex() {
  static const std::regex re(fmt::format(
      "(?:({0}) )?({0})\\s+([A-Z])(?:\\s*-\\s*|\\s+to\\s+)([A-Z]){1}"
      "(\\s*\\(\\s*\\d+\\s*-\\s*\\d+\\s*\\))?",
      kWord, kBoundary));
  return re;
}

const std::regex& list_regex() {
  static const std::regex re(fmt::format(
      "(?:({0}) )?({0})\\s+([A-Z]{1}(?:\\s*,\\s*[A-Z]{1})*)\\s*,?\\s*(?:and|&)\\s+([A-Z]){1}",
      kWord, kBoundary));
  return re;
}

const std::regex& numbered_regex() {
  static const std::regex re(
      fmt::format("(?:({0}) )?({0})\\s+(\\d+)\\s*-\\s*(\\d+){1}", kWord, kBoundary));
  return re;
}

constexpr std::size_t kMaxNumberedWidth = 50;

bool preceded_by_word_char(const std::string& ascii, std::size_t pos) {
  if (pos == 0) return false;
  const char c = ascii[pos - 1];
  return std::isalnum(static_cast<unsigned char>(c)) || c == 'x' || c == '-' || c == '\'';
}

struct StemChoice {
  std::string stem;
  std::size_t begin_cp;  // code point index where the enumeration surface starts
};

std::string original(const Shadow& sh, std::string_view text, std::size_t cp_begin,
                     std::size_t cp_end) {
  if (cp_begin >= cp_end) return {};
  const auto b = sh.cps[cp_begin].begin;
  const auto e = sh.cps[cp_end - 1].end;
  return std::string(text.substr(b, e - b));
}

void add_pattern(std::vector<EnumerationPattern>& out, const Shadow& sh, std::string_view text,
                 const StemChoice& stem, std::size_t end_cp, EnumerationKind kind,
                 std::vector<std::string> suffixes) {
  if (suffixes.size() < 2) return;
  EnumerationPattern p;
  p.stem = stem.stem;
  p.kind = kind;
  for (const auto& s : suffixes) p.members.push_back(stem.stem + " " + s);
  p.span = {sh.cps[stem.begin_cp].begin, sh.cps[end_cp - 1].end};
  p.surface = std::string(text.substr(p.span.begin, p.span.end - p.span.begin));
  out.push_back(std::move(p));
}

template <typename Handler>
void for_each_match(const Shadow& sh, const std::regex& re, Handler&& handle) {
  auto begin = sh.ascii.cbegin();
  std::smatch m;
  while (std::regex_search(begin, sh.ascii.cend(), m, re)) {
    const auto offset = static_cast<std::size_t>(begin - sh.ascii.cbegin());
    const auto start = offset + static_cast<std::size_t>(m.position(0));
    // Matches must start at a word boundary of the full text.
    if (!preceded_by_word_char(sh.ascii, start)) {
      std::smatch absolute;
      std::regex_search(sh.ascii.cbegin() + static_cast<std::ptrdiff_t>(start), sh.ascii.cend(),
                        absolute, re, std::regex_constants::match_continuous);
      handle(absolute, start);
      begin = sh.ascii.cbegin() + static_cast<std::ptrdiff_t>(start + absolute.length(0));
    } else {
      begin = sh.ascii.cbegin() + static_cast<std::ptrdiff_t>(start + 1);
    }
    if (begin >= sh.ascii.cend()) break;
  }
}

// Shifts match positions (relative to `start`) so they index code points.
struct MatchView {
  const std::smatch& m;
  std::size_t start;
  bool matched(int i) const { return m[i].matched; }
  std::size_t pos(int i) const { return start + static_cast<std::size_t>(m.position(i)); }
  std::size_t end(int i) const { return pos(i) + static_cast<std::size_t>(m.length(i)); }
  std::string str(int i) const { return m.str(i); }
};

std::optional<StemChoice> stem_of(const Shadow& sh, std::string_view text, const MatchView& v) {
  const auto word_begin = v.pos(2);
  const auto word_end = v.end(2);
  std::string word = original(sh, text, word_begin, word_end);
  if (text::scalar_count(word) < 3) return std::nullopt;
  if (word.back() == 's') word.pop_back();
  const bool generic = generic_heads().contains(text::casefold(word));
  if (generic && v.matched(1)) {
    return StemChoice{original(sh, text, v.pos(1), word_begin - 1) + " " + word, v.pos(1)};
  }
  return StemChoice{word, word_begin};
}

}  // namespace

std::optional<TextSpan> find_mention(std::string_view haystack, std::string_view needle) {
  return find_in(FoldedText(haystack), needle);
}

MentionVerdict match_entity(std::string_view abstract, const Entity& entity,
                            std::span<const std::string> extra_synonyms) {
  return match_folded(abstract, FoldedText(abstract), entity, extra_synonyms);
}

std::vector<EnumerationPattern> detect_enumerations(std::string_view text) {
  const Shadow sh = make_shadow(text);
  std::vector<EnumerationPattern> out;
  std::vector<std::pair<std::size_t, std::size_t>> claimed;
  auto overlaps = [&](std::size_t b, std::size_t e) {
    return std::any_of(claimed.begin(), claimed.end(),
                       [&](const auto& c) { return b < c.second && c.first < e; });
  };

  for_each_match(sh, range_regex(), [&](const std::smatch& m, std::size_t start) {
    const MatchView v{m, start};
    const auto stem = stem_of(sh, text, v);
    if (!stem) return;
    const char first = v.str(3)[0];
    const char last = v.str(4)[0];
    if (last <= first) return;
    std::vector<std::string> suffixes;
    for (char c = first; c <= last; ++c) suffixes.emplace_back(1, c);
    const auto end = v.matched(5) ? v.end(5) : v.end(4);
    add_pattern(out, sh, text, *stem, end, EnumerationKind::letter_range, std::move(suffixes));
    claimed.emplace_back(stem->begin_cp, end);
  });

  for_each_match(sh, list_regex(), [&](const std::smatch& m, std::size_t start) {
    const MatchView v{m, start};
    const auto stem = stem_of(sh, text, v);
    if (!stem || overlaps(v.pos(2), v.end(4))) return;
    std::vector<std::string> suffixes;
    for (const char c : v.str(3)) {
      if (c >= 'A' && c <= 'Z') suffixes.emplace_back(1, c);
    }
    suffixes.emplace_back(v.str(4));
    std::set<std::string> distinct(suffixes.begin(), suffixes.end());
    if (distinct.size() != suffixes.size()) return;
    add_pattern(out, sh, text, *stem, v.end(4), EnumerationKind::letter_list, std::move(suffixes));
    claimed.emplace_back(stem->begin_cp, v.end(4));
  });

  for_each_match(sh, numbered_regex(), [&](const std::smatch& m, std::size_t start) {
    const MatchView v{m, start};
    const auto stem = stem_of(sh, text, v);
    if (!stem || overlaps(v.pos(2), v.end(4))) return;
    const auto lo = std::stoul(v.str(3));
    const auto hi = std::stoul(v.str(4));
    if (hi <= lo || hi - lo + 1 > kMaxNumberedWidth) return;
    std::vector<std::string> suffixes;
    for (auto n = lo; n <= hi; ++n) suffixes.push_back(std::to_string(n));
    add_pattern(out, sh, text, *stem, v.end(4), EnumerationKind::numbered_range,
                std::move(suffixes));
  });

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.span.begin < b.span.begin;
  });
  return out;
}

std::optional<std::pair<std::string, char>> split_letter_suffix(std::string_view label) {
  const auto trimmed = text::trim(label);
  if (trimmed.size() < 3) return std::nullopt;
  const char letter = trimmed.back();
  if (letter < 'A' || letter > 'Z' || trimmed[trimmed.size() - 2] != ' ') return std::nullopt;
  const auto stem = text::trim(trimmed.substr(0, trimmed.size() - 2));
  if (stem.empty()) return std::nullopt;
  return std::make_pair(std::string(stem), letter);
}

std::string contract_members(std::string_view stem, std::span<const char> letters) {
  if (letters.size() < 2) throw std::invalid_argument("contraction needs at least two members");
  for (std::size_t i = 1; i < letters.size(); ++i) {
    if (letters[i] <= letters[i - 1]) {
      throw std::invalid_argument("contraction letters must be ascending and distinct");
    }
  }
  const std::string plural = std::string(stem) + "s";
  const bool consecutive = letters.back() - letters.front() ==
                           static_cast<int>(letters.size()) - 1;
  if (consecutive && letters.size() >= 3) {
    return fmt::format("{} {}-{}", plural, letters.front(), letters.back());
  }
  std::string out = plural + " ";
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i > 0) out += i + 1 == letters.size() ? " and " : ", ";
    out += letters[i];
  }
  return out;
}

bool contraction_round_trips(std::string_view stem, std::span<const char> letters) {
  const auto found = detect_enumerations(contract_members(stem, letters));
  if (found.size() != 1) return false;
  const auto& members = found.front().members;
  if (members.size() != letters.size()) return false;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (members[i] != fmt::format("{} {}", stem, letters[i])) return false;
  }
  return true;
}

MentionTally& MentionTally::operator+=(const MentionTally& o) {
  for (std::size_t i = 0; i < 4; ++i) {
    organisms[i] += o.organisms[i];
    chemicals[i] += o.chemicals[i];
  }
  relations += o.relations;
  pairs_complete += o.pairs_complete;
  return *this;
}

DocumentMentions classify_document_mentions(const Document& doc, const SynonymTable& synonyms) {
  if (!doc.has_abstract()) {
    throw DataError(fmt::format("document '{}' has no abstract", doc.id));
  }
  const std::string_view abstract = *doc.abstract;
  const FoldedText folded(abstract);
  std::set<std::string> implicit_members;
  for (const auto& p : detect_enumerations(abstract)) {
    for (const auto& m : p.members) implicit_members.insert(text::fold_key(m));
  }

  DocumentMentions out;
  out.doc_id = doc.id;
  std::map<std::pair<EntityKind, std::string>, MentionStatus> status_of;
  auto verdict_for = [&](const Entity& e) {
    const auto key = std::make_pair(e.kind == EntityKind::organism ? EntityKind::organism
                                                                   : EntityKind::chemical,
                                    e.id);
    if (const auto it = status_of.find(key); it != status_of.end()) return it->second;
    static const std::vector<std::string> kNone;
    const auto table = synonyms.find(e.id);
    const auto& extra = table == synonyms.end() ? kNone : table->second;
    auto v = match_folded(abstract, folded, e, extra);
    if (v.status == MentionStatus::not_found && e.kind != EntityKind::organism &&
        implicit_members.contains(text::fold_key(e.label))) {
      v.status = MentionStatus::multiple_implicit;
    }
    auto& bucket = key.first == EntityKind::organism ? out.tally.organisms : out.tally.chemicals;
    ++bucket[static_cast<std::size_t>(v.status)];
    status_of.emplace(key, v.status);
    out.verdicts.push_back(std::move(v));
    return out.verdicts.back().status;
  };

  for (const auto& r : doc.relations) {
    const auto o = verdict_for(r.organism);
    const auto c = verdict_for(r.chemical);
    ++out.tally.relations;
    if (o != MentionStatus::not_found && c != MentionStatus::not_found) ++out.tally.pairs_complete;
  }
  return out;
}

MismatchReport mismatch_report(const Corpus& corpus, const SynonymTable& synonyms) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.documents.size());
  std::vector<std::optional<DocumentMentions>> results(corpus.documents.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& d = corpus.documents[static_cast<std::size_t>(i)];
    if (d.has_abstract()) results[static_cast<std::size_t>(i)] = classify_document_mentions(d, synonyms);
  }
  MismatchReport report;
  for (const auto& r : results) {
    if (!r) {
      ++report.skipped_without_abstract;
      continue;
    }
    ++report.documents;
    report.tally += r->tally;
    if (r->pair_complete()) ++report.pair_complete_documents;
  }
  return report;
}

json to_json(const MismatchReport& report) {
  auto statuses = [](const std::array<std::size_t, 4>& counts) {
    json j = json::object();
    std::size_t total = 0;
    for (const auto c : counts) total += c;
    for (std::size_t i = 0; i < 4; ++i) {
      j[std::string(to_string(static_cast<MentionStatus>(i)))] = counts[i];
    }
    j["total"] = total;
    const auto found = counts[0] + counts[1];
    j["found_fraction"] = total == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(total);
    return j;
  };
  return json{{"grammar_version", kEnumerationGrammarVersion},
              {"documents", report.documents},
              {"skipped_without_abstract", report.skipped_without_abstract},
              {"pair_complete_documents", report.pair_complete_documents},
              {"relations", report.tally.relations},
              {"pairs_complete", report.tally.pairs_complete},
              {"organisms", statuses(report.tally.organisms)},
              {"chemicals", statuses(report.tally.chemicals)}};
}

}  // namespace divsample
