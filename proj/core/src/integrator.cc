#include "kgqa/integrator.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace kgqa {

std::vector<AnswerTuple> integrate(const std::vector<EntityScore>& entities,
                                   const std::vector<std::pair<std::string, double>>& relations,
                                   const KnowledgeGraph& kg, const IntegratorConfig& config) {
  std::map<std::pair<std::string, std::string>, AnswerTuple> pairs;
  for (const EntityScore& e : entities) {
    auto eid = kg.find(e.mid);
    if (!eid) continue;
    for (const auto& [relation, prob] : relations) {
      auto rid = kg.find_relation(relation);
      if (!rid || !kg.valid_pair(*eid, *rid)) continue;
      AnswerTuple t{kg.mid(*eid), kg.relation_name(*rid), e.score * prob, kg.in_degree(*eid),
                    kg.has_wiki(*eid)};
      auto [it, inserted] = pairs.try_emplace({t.mid, t.relation}, t);
      if (!inserted && t.score > it->second.score) it->second = t;
    }
  }

  auto tie_order = [](const AnswerTuple& a, const AnswerTuple& b) {
    if (a.in_degree != b.in_degree) return a.in_degree > b.in_degree;
    if (a.has_wiki != b.has_wiki) return a.has_wiki;
    if (a.mid != b.mid) return a.mid < b.mid;
    return a.relation < b.relation;
  };

  std::vector<AnswerTuple> out;
  out.reserve(pairs.size());
  for (auto& [key, t] : pairs) out.push_back(std::move(t));
  // Total order first, so the grouping below does not depend on input order.
  std::sort(out.begin(), out.end(), [&](const AnswerTuple& a, const AnswerTuple& b) {
    if (a.score != b.score) return a.score > b.score;
    return tie_order(a, b);
  });
  std::size_t head = 0;
  while (head < out.size()) {
    std::size_t end = head + 1;
    while (end < out.size() && std::abs(out[head].score - out[end].score) <= config.epsilon) ++end;
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(head),
              out.begin() + static_cast<std::ptrdiff_t>(end), tie_order);
    head = end;
  }
  return out;
}

}  // namespace kgqa
