#include "kgqa/entity_linker.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace kgqa {

CandidatePool gather_candidates(const std::vector<std::string>& span, const InvertedIndex& index,
                                const KnowledgeGraph& kg) {
  CandidatePool pool;
  if (span.empty()) return pool;
  const std::string span_text = join_tokens(span);
  std::unordered_map<EntityId, std::size_t> slot;

  for (int n = kMaxOrder; n >= kMinOrder; --n) {
    if (span.size() < static_cast<std::size_t>(n)) continue;
    pool.orders_visited.push_back(n);
    std::unordered_set<std::string> seen_grams;
    for (const Gram& g : extract_ngrams(span, n)) {
      if (!seen_grams.insert(g.text).second) continue;
      const double idf = index.idf(g.text);
      EntityId last = static_cast<EntityId>(-1);
      for (const Posting& p : index.lookup(g)) {
        auto [it, inserted] = slot.try_emplace(p.entity, pool.candidates.size());
        if (inserted) {
          pool.candidates.push_back(CandidateEntity{p.entity, p.alias, 0.0, 0.0});
          if (kg.canonical_label(p.entity) == span_text) pool.exact_match = true;
        }
        CandidateEntity& c = pool.candidates[it->second];
        c.alias = std::min(c.alias, p.alias);
        // Postings are grouped by entity; count each gram once per entity.
        if (p.entity != last) c.retrieval_weight += idf;
        last = p.entity;
      }
    }
    if (pool.exact_match) break;
  }
  std::sort(pool.candidates.begin(), pool.candidates.end(),
            [](const CandidateEntity& a, const CandidateEntity& b) { return a.entity < b.entity; });
  return pool;
}

std::vector<CandidateEntity> link(const std::vector<std::string>& span, const InvertedIndex& index,
                                  const KnowledgeGraph& kg, std::size_t top_n,
                                  const LinkerConfig& config) {
  if (span.empty() || top_n == 0) return {};
  CandidatePool pool = gather_candidates(span, index, kg);
  std::vector<CandidateEntity>& cands = pool.candidates;

  if (config.pool_cap > 0 && cands.size() > config.pool_cap) {
    std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(config.pool_cap),
                     cands.end(), [](const CandidateEntity& a, const CandidateEntity& b) {
                       if (a.retrieval_weight != b.retrieval_weight) {
                         return a.retrieval_weight > b.retrieval_weight;
                       }
                       return a.entity < b.entity;
                     });
    cands.resize(config.pool_cap);
  }

  const std::u32string span_text = decode_utf8(join_tokens(span));
  for (CandidateEntity& c : cands) {
    c.lev_score = levenshtein_ratio(span_text, decode_utf8(kg.canonical_label(c.entity)));
  }
  auto better = [&kg](const CandidateEntity& a, const CandidateEntity& b) {
    if (a.lev_score != b.lev_score) return a.lev_score > b.lev_score;
    const auto da = kg.in_degree(a.entity);
    const auto db = kg.in_degree(b.entity);
    if (da != db) return da > db;
    return a.entity < b.entity;
  };
  if (cands.size() > top_n) {
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(top_n),
                      cands.end(), better);
    cands.resize(top_n);
  } else {
    std::sort(cands.begin(), cands.end(), better);
  }
  return cands;
}

std::vector<std::string> choose_linking_query(const std::vector<std::string>& tokens,
                                              const std::vector<Span>& spans) {
  if (spans.empty()) return tokens;
  const Span* best = &spans.front();
  for (const Span& s : spans) {
    if (s.length() > best->length()) best = &s;
  }
  return std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(best->begin),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(best->end));
}

}  // namespace kgqa
