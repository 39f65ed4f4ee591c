#pragma once

// In-memory knowledge graph: deduplicated triples over MIDs, per-entity
// aliases, in-degree, Wikipedia-mapping flag and subject relation sets.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgqa/text_prep.h"

namespace kgqa {

// Dense ids. Both are assigned in ascending string order of the MID /
// relation name, so comparing ids is the same as comparing the strings.
using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Canonical machine identifier, e.g. "m.0abc12".
struct Mid {
  std::string id;

  friend auto operator<=>(const Mid&, const Mid&) = default;
};

// "www.freebase.com/m/0abc", "/m/0abc", "fb:m.0abc" and "m.0abc" all map to
// "m.0abc".
std::string normalize_mid(std::string_view raw);

// "www.freebase.com/people/person/place_of_birth" -> "people/person/place_of_birth".
std::string normalize_relation(std::string_view raw);

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct LoadStats {
  std::size_t triple_lines = 0;
  std::size_t duplicate_triples = 0;
  std::size_t unknown_name_mids = 0;
  std::size_t unknown_wiki_mids = 0;
  std::size_t empty_aliases = 0;
};

class KnowledgeGraph {
 public:
  class Builder;

  KnowledgeGraph() = default;

  // Any of the name/wiki streams may be null. `*_name` is used in error
  // messages only.
  static KnowledgeGraph load(std::istream& triples, std::istream* names, std::istream* wiki,
                             const std::string& triples_name = "triples",
                             const std::string& names_name = "names",
                             const std::string& wiki_name = "wiki");
  static KnowledgeGraph load_files(const std::filesystem::path& triples,
                                   const std::filesystem::path& names,
                                   const std::filesystem::path& wiki);

  // Writes the normalized graph back out in the three source formats.
  void save(const std::filesystem::path& triples, const std::filesystem::path& names,
            const std::filesystem::path& wiki) const;

  std::size_t entity_count() const { return mids_.size(); }
  std::size_t relation_count() const { return relations_.size(); }
  std::size_t triple_count() const { return triples_.size(); }
  std::span<const Triple> triples() const { return triples_; }
  const LoadStats& stats() const { return stats_; }

  std::optional<EntityId> find(std::string_view mid) const;
  std::optional<RelationId> find_relation(std::string_view relation) const;
  const std::string& mid(EntityId e) const { return mids_[e]; }
  const std::string& relation_name(RelationId r) const { return relations_[r]; }

  // Alias 0 is the canonical label.
  std::span<const TokenSeq> aliases(EntityId e) const { return aliases_[e]; }
  // Space-joined tokens of alias 0, or empty when the entity has no name.
  const std::string& canonical_label(EntityId e) const { return labels_[e]; }

  std::uint32_t in_degree(EntityId e) const { return in_degree_[e]; }
  std::uint32_t in_degree(std::string_view mid) const;
  bool has_wiki(EntityId e) const { return has_wiki_[e] != 0; }
  bool has_wiki(std::string_view mid) const;

  // Sorted ascending.
  std::span<const RelationId> subject_relations(EntityId e) const;

  bool valid_pair(EntityId e, RelationId r) const;
  bool valid_pair(std::string_view mid, std::string_view relation) const;

 private:
  std::vector<std::string> mids_;
  std::unordered_map<std::string, EntityId> mid_index_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, RelationId> relation_index_;
  std::vector<Triple> triples_;
  std::vector<std::vector<TokenSeq>> aliases_;
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<std::uint8_t> has_wiki_;
  std::vector<std::size_t> subject_offsets_;
  std::vector<RelationId> subject_relations_;
  LoadStats stats_;
};

// Accumulates raw records; build() normalizes, deduplicates and derives the
// in-degree and subject-relation maps.
class KnowledgeGraph::Builder {
 public:
  Builder& add_triple(std::string_view subject, std::string_view relation,
                      std::string_view object);
  Builder& add_alias(std::string_view mid, std::string_view name);
  Builder& add_wiki(std::string_view mid);

  KnowledgeGraph build() &&;

 private:
  std::uint32_t intern_mid(std::string_view raw);
  std::uint32_t intern_relation(std::string_view raw);

  // Provisional ids in first-seen order; build() remaps to sorted order.
  std::vector<std::string> mids_;
  std::unordered_map<std::string, std::uint32_t> mid_index_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::uint32_t> relation_index_;
  std::vector<Triple> triples_;
  std::vector<std::pair<std::string, std::string>> aliases_;
  std::vector<std::string> wiki_;
};

}  // namespace kgqa
