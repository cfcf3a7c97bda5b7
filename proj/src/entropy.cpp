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

#include "divsample/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace divsample {

EntityId EntityInterner::intern(std::string_view id) {
  const auto [it, inserted] = ids_.emplace(std::string(id), static_cast<EntityId>(names_.size()));
  if (inserted) names_.emplace_back(id);
  return it->second;
}

std::optional<EntityId> EntityInterner::find(std::string_view id) const {
  const auto it = ids_.find(std::string(id));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<ProfileEntry> aggregate(std::vector<EntityId> ids) {
  std::sort(ids.begin(), ids.end());
  std::vector<ProfileEntry> out;
  for (const auto id : ids) {
    if (!out.empty() && out.back().entity == id) {
      ++out.back().multiplicity;
    } else {
      out.push_back({id, 1});
    }
  }
  return out;
}

}  // namespace

DocumentProfile make_profile(const Document& doc, EntityInterner& organisms,
                             EntityInterner& chemicals) {
  std::vector<EntityId> org_ids;
  std::vector<EntityId> chem_ids;
  org_ids.reserve(doc.relations.size());
  chem_ids.reserve(doc.relations.size());
  for (const auto& r : doc.relations) {
    org_ids.push_back(organisms.intern(r.organism.id));
    chem_ids.push_back(chemicals.intern(r.chemical.id));
  }
  DocumentProfile p;
  p.organisms = aggregate(std::move(org_ids));
  p.chemicals = aggregate(std::move(chem_ids));
  p.n_relations = static_cast<std::uint32_t>(doc.relations.size());
  return p;
}

CorpusIndex CorpusIndex::build(const Corpus& corpus) {
  CorpusIndex index;
  index.profiles.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) {
    index.profiles.push_back(make_profile(d, index.organisms, index.chemicals));
  }
  return index;
}

namespace detail {
namespace {

constexpr std::uint64_t kTableSize = 1u << 16;

FixedSum to_fixed(double x) { return static_cast<FixedSum>(std::ldexp(x, 64)); }

FixedSum compute_xlogx(std::uint64_t c) {
  if (c < 2) return 0;
  const auto x = static_cast<double>(c);
  return to_fixed(x * std::log(x));
}

const std::vector<FixedSum>& xlogx_table() {
  static const std::vector<FixedSum> table = [] {
    std::vector<FixedSum> t(kTableSize);
    for (std::uint64_t c = 0; c < kTableSize; ++c) t[c] = compute_xlogx(c);
    return t;
  }();
  return table;
}

}  // namespace

FixedSum xlogx_fixed(std::uint64_t c) {
  return c < kTableSize ? xlogx_table()[c] : compute_xlogx(c);
}

double entropy_from(std::uint64_t total, FixedSum sum_c_log_c) {
  const auto t = static_cast<double>(total);
  const double h = std::log(t) - std::ldexp(static_cast<double>(sum_c_log_c), -64) / t;
  // Rounding can leave a single-entity distribution a hair below zero.
  return h < 0.0 ? 0.0 : h;
}

}  // namespace detail

EntityDistribution EntityDistribution::from_counts(
    const std::map<EntityId, std::uint32_t>& counts) {
  EntityDistribution d;
  for (const auto& [id, c] : counts) {
    if (c > 0) d.add(id, c);
  }
  return d;
}

void EntityDistribution::add(EntityId entity, std::uint32_t multiplicity) {
  if (multiplicity == 0) return;
  if (entity >= counts_.size()) counts_.resize(static_cast<std::size_t>(entity) + 1, 0);
  auto& c = counts_[entity];
  sum_ += detail::xlogx_fixed(c + static_cast<std::uint64_t>(multiplicity)) - detail::xlogx_fixed(c);
  if (c == 0) ++distinct_;
  c += multiplicity;
  total_ += multiplicity;
}

void EntityDistribution::remove(EntityId entity, std::uint32_t multiplicity) {
  if (multiplicity == 0) return;
  if (count(entity) < multiplicity) {
    throw std::logic_error(fmt::format("removing {} occurrences of entity {} but only {} present",
                                       multiplicity, entity, count(entity)));
  }
  auto& c = counts_[entity];
  sum_ -= detail::xlogx_fixed(c) - detail::xlogx_fixed(c - multiplicity);
  c -= multiplicity;
  if (c == 0) --distinct_;
  total_ -= multiplicity;
}

void EntityDistribution::add(std::span<const ProfileEntry> entries) {
  for (const auto& e : entries) add(e.entity, e.multiplicity);
}

void EntityDistribution::remove(std::span<const ProfileEntry> entries) {
  for (const auto& e : entries) remove(e.entity, e.multiplicity);
}

FixedSum EntityDistribution::delta_if_added(std::span<const ProfileEntry> entries) const {
  FixedSum delta = 0;
  for (const auto& e : entries) {
    const std::uint64_t c = count(e.entity);
    delta += detail::xlogx_fixed(c + e.multiplicity) - detail::xlogx_fixed(c);
  }
  return delta;
}

FixedSum EntityDistribution::delta_if_removed(std::span<const ProfileEntry> entries) const {
  FixedSum delta = 0;
  for (const auto& e : entries) {
    const std::uint64_t c = count(e.entity);
    delta += detail::xlogx_fixed(c - std::min<std::uint64_t>(c, e.multiplicity)) -
             detail::xlogx_fixed(c);
  }
  return delta;
}

double EntityDistribution::entropy_if_added(std::span<const ProfileEntry> entries,
                                            std::uint64_t added_total) const {
  const auto total = total_ + added_total;
  if (total == 0) throw std::domain_error("entropy of an empty distribution");
  return detail::entropy_from(total, sum_ + delta_if_added(entries));
}

double EntityDistribution::sum_c_log_c() const { return std::ldexp(static_cast<double>(sum_), -64); }

FixedSum EntityDistribution::recompute_sum() const {
  FixedSum s = 0;
  for (const auto c : counts_) s += detail::xlogx_fixed(c);
  return s;
}

bool EntityDistribution::consistent() const {
  std::uint64_t total = 0;
  std::size_t distinct = 0;
  for (const auto c : counts_) {
    total += c;
    distinct += c > 0 ? 1 : 0;
  }
  return total == total_ && distinct == distinct_ && recompute_sum() == sum_;
}

std::map<EntityId, std::uint32_t> EntityDistribution::counts() const {
  std::map<EntityId, std::uint32_t> out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] > 0) out.emplace(static_cast<EntityId>(i), counts_[i]);
  }
  return out;
}

std::string EntityDistribution::serialize() const {
  std::string out;
  for (const auto& [id, c] : counts()) out += fmt::format("{}:{},", id, c);
  const auto hi = static_cast<std::uint64_t>(sum_ >> 64);
  const auto lo = static_cast<std::uint64_t>(sum_);
  out += fmt::format("|{}|{}|{:016x}{:016x}", total_, distinct_, hi, lo);
  return out;
}

double entropy(const EntityDistribution& dist) {
  if (dist.empty()) throw std::domain_error("entropy of an empty distribution");
  return detail::entropy_from(dist.total(), dist.fixed_sum());
}

void EntropyState::apply(const DocumentProfile& doc) {
  organisms_.add(doc.organisms);
  chemicals_.add(doc.chemicals);
}

void EntropyState::remove(const DocumentProfile& doc) {
  organisms_.remove(doc.organisms);
  chemicals_.remove(doc.chemicals);
}

EntropyPair EntropyState::peek(const DocumentProfile& doc) const {
  return {organisms_.entropy_if_added(doc.organisms, doc.n_relations),
          chemicals_.entropy_if_added(doc.chemicals, doc.n_relations)};
}

EntropyPair EntropyState::current() const { return {entropy(organisms_), entropy(chemicals_)}; }

std::string EntropyState::serialize() const {
  return "O=" + organisms_.serialize() + ";C=" + chemicals_.serialize();
}

double utopian_distance(EntropyPair h, double max_o, double max_c) {
  const double dx = h.h_organisms - max_o;
  const double dy = h.h_chemicals - max_c;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace divsample
