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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "divsample/corpus.hpp"

namespace divsample {

using EntityId = std::uint32_t;

/// Dense ids for entity identifiers, in first-seen order.
class EntityInterner {
 public:
  EntityId intern(std::string_view id);
  std::optional<EntityId> find(std::string_view id) const;
  const std::string& name(EntityId id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, EntityId> ids_;
  std::vector<std::string> names_;
};

struct ProfileEntry {
  EntityId entity;
  std::uint32_t multiplicity;  // relations of the document involving the entity
};

/// A document reduced to what the entropy computation needs. Entries hold
/// each entity once, sorted by id.
struct DocumentProfile {
  std::vector<ProfileEntry> organisms;
  std::vector<ProfileEntry> chemicals;
  std::uint32_t n_relations = 0;
};

DocumentProfile make_profile(const Document& doc, EntityInterner& organisms,
                             EntityInterner& chemicals);

/// Interned view of a corpus; profiles[i] belongs to corpus.documents[i].
struct CorpusIndex {
  EntityInterner organisms;
  EntityInterner chemicals;
  std::vector<DocumentProfile> profiles;

  static CorpusIndex build(const Corpus& corpus);
};

// Fixed-point accumulator with 64 fractional bits. Every c*ln(c) term is a
// double >= 1.38 (or exactly 0), which converts to this format without
// rounding, so sums are exact and independent of update order.
__extension__ using FixedSum = __int128;

namespace detail {
FixedSum xlogx_fixed(std::uint64_t c);
double entropy_from(std::uint64_t total, FixedSum sum_c_log_c);
}  // namespace detail

/// Occurrence counts of one entity role with a cached sum of c*ln(c).
/// Entities with a zero count are never stored as present.
class EntityDistribution {
 public:
  EntityDistribution() = default;
  explicit EntityDistribution(std::size_t capacity) : counts_(capacity, 0) {}

  static EntityDistribution from_counts(const std::map<EntityId, std::uint32_t>& counts);

  void add(EntityId entity, std::uint32_t multiplicity);
  /// Throws std::logic_error when removing more than is present.
  void remove(EntityId entity, std::uint32_t multiplicity);

  void add(std::span<const ProfileEntry> entries);
  void remove(std::span<const ProfileEntry> entries);

  /// Change of the accumulator if entries were added.
  FixedSum delta_if_added(std::span<const ProfileEntry> entries) const;
  FixedSum delta_if_removed(std::span<const ProfileEntry> entries) const;

  /// Entropy (nats) after adding entries covering `added_total` relations.
  double entropy_if_added(std::span<const ProfileEntry> entries, std::uint64_t added_total) const;

  std::uint32_t count(EntityId entity) const {
    return entity < counts_.size() ? counts_[entity] : 0;
  }
  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return distinct_; }
  bool empty() const { return total_ == 0; }

  FixedSum fixed_sum() const { return sum_; }
  double sum_c_log_c() const;

  /// Sum recomputed from the counts, for consistency checks.
  FixedSum recompute_sum() const;
  bool consistent() const;

  std::map<EntityId, std::uint32_t> counts() const;
  std::string serialize() const;

 private:
  std::vector<std::uint32_t> counts_;
  std::uint64_t total_ = 0;
  std::size_t distinct_ = 0;
  FixedSum sum_ = 0;
};

/// Shannon entropy in nats. Throws std::domain_error on an empty distribution.
double entropy(const EntityDistribution& dist);

struct EntropyPair {
  double h_organisms = 0.0;
  double h_chemicals = 0.0;

  bool operator==(const EntropyPair&) const = default;
};

/// Organism and chemical distributions of a growing sample.
class EntropyState {
 public:
  EntropyState() = default;
  EntropyState(std::size_t n_organisms, std::size_t n_chemicals)
      : organisms_(n_organisms), chemicals_(n_chemicals) {}

  void apply(const DocumentProfile& doc);
  void remove(const DocumentProfile& doc);

  /// Entropies the sample would have after adding doc. Does not mutate.
  EntropyPair peek(const DocumentProfile& doc) const;
  /// Entropies of the current sample. Throws on an empty sample.
  EntropyPair current() const;

  const EntityDistribution& organisms() const { return organisms_; }
  const EntityDistribution& chemicals() const { return chemicals_; }
  std::string serialize() const;

 private:
  EntityDistribution organisms_;
  EntityDistribution chemicals_;
};

/// Euclidean distance from h to the utopian point (max_o, max_c).
double utopian_distance(EntropyPair h, double max_o, double max_c);

}  // namespace divsample
