#pragma once

// Entity linking: n-gram retrieval from the inverted index with
// highest-order-first backoff, ranked by Levenshtein ratio to the canonical
// label.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kgqa/crf_tagger.h"
#include "kgqa/kg_store.h"
#include "kgqa/levenshtein.h"
#include "kgqa/ngram_index.h"
#include "kgqa/text_prep.h"

namespace kgqa {

struct CandidateEntity {
  EntityId entity = 0;
  // Lowest alias index through which the entity was retrieved.
  std::uint32_t alias = 0;
  // levenshtein_ratio(span text, canonical label); the exported entity score.
  double lev_score = 0.0;
  // Sum of idf over the distinct span grams that retrieved the entity.
  double retrieval_weight = 0.0;
};

struct LinkerConfig {
  // Candidates kept after retrieval, by descending retrieval weight; 0 keeps
  // all of them.
  std::size_t pool_cap = 500;
};

struct CandidatePool {
  std::vector<CandidateEntity> candidates;  // ascending entity id, pre-cap
  std::vector<int> orders_visited;          // e.g. {3} or {3, 2, 1}
  bool exact_match = false;                 // true iff backoff stopped early
};

// Visits n = 3, 2, 1; stops after the first order at which some pooled
// entity's canonical label equals the span text.
CandidatePool gather_candidates(const std::vector<std::string>& span, const InvertedIndex& index,
                                const KnowledgeGraph& kg);

// Output ordered by lev_score desc, in-degree desc, MID asc; at most top_n.
// Empty span or top_n == 0 yields an empty list.
std::vector<CandidateEntity> link(const std::vector<std::string>& span, const InvertedIndex& index,
                                  const KnowledgeGraph& kg, std::size_t top_n,
                                  const LinkerConfig& config = {});

// Query text used when detection produces `spans` over `tokens`: the
// longest span (leftmost on ties), or all tokens when there is none.
std::vector<std::string> choose_linking_query(const std::vector<std::string>& tokens,
                                              const std::vector<Span>& spans);

}  // namespace kgqa
