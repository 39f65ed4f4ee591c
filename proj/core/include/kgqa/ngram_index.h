#pragma once

// Inverted index from token n-grams (n = 1, 2, 3) of entity aliases to the
// (entity, alias) entries that contain them.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgqa/kg_store.h"
#include "kgqa/text_prep.h"

namespace kgqa {

inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 3;

// A gram is stored as its space-joined tokens; the order is the token count.
struct Gram {
  int order = 0;
  std::string text;

  friend bool operator==(const Gram&, const Gram&) = default;
};

struct Posting {
  EntityId entity;
  std::uint32_t alias;

  friend auto operator<=>(const Posting&, const Posting&) = default;
};

// All contiguous windows of length n, in order, duplicates preserved.
// Throws kgqa::Error unless 1 <= n <= 3.
std::vector<Gram> extract_ngrams(const std::vector<std::string>& tokens, int n);

class InvertedIndex {
 public:
  InvertedIndex() = default;

  static InvertedIndex build(const KnowledgeGraph& kg);

  // Postings are sorted by (entity, alias), hence by (MID, alias index), and
  // deduplicated. Unknown grams yield an empty span.
  std::span<const Posting> lookup(const Gram& gram) const;
  std::span<const Posting> lookup(std::string_view joined_gram) const;

  std::size_t doc_freq(std::string_view joined_gram) const { return lookup(joined_gram).size(); }
  std::size_t entry_count() const { return entry_count_; }
  std::size_t gram_count() const { return postings_.size(); }

  // log(1 + entry_count / doc_freq); 0 for unknown grams.
  double idf(std::string_view joined_gram) const;

  // Snapshot: "kgqa-index v1" header, then one
  // "n<TAB>gram<TAB>mid<TAB>alias_idx" line per posting, ordered by
  // (n, gram bytes, mid, alias).
  std::string serialize(const KnowledgeGraph& kg) const;
  static InvertedIndex deserialize(std::string_view text, const KnowledgeGraph& kg,
                                   const std::string& source = "index");

  void save(const std::filesystem::path& path, const KnowledgeGraph& kg) const;
  static InvertedIndex load(const std::filesystem::path& path, const KnowledgeGraph& kg);

  // Visits every (gram, postings) pair in unspecified order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [gram, list] : postings_) fn(std::string_view(gram), std::span<const Posting>(list));
  }

 private:
  void finalize();

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::size_t entry_count_ = 0;
};

}  // namespace kgqa
