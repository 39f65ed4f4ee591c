#pragma once

// Evidence integration: cross the top-m entities with the top-r relations,
// drop pairs the graph does not contain, rank by the product of component
// scores, and break score ties by entity popularity.

#include <cstddef>
#include <string>
#include <vector>

#include "kgqa/kg_store.h"

namespace kgqa {

struct EntityScore {
  std::string mid;
  double score = 0.0;
};

struct AnswerTuple {
  std::string mid;
  std::string relation;
  double score = 0.0;
  std::uint32_t in_degree = 0;
  bool has_wiki = false;
};

struct IntegratorConfig {
  std::size_t m = 50;
  std::size_t r = 5;
  // Scores within epsilon of the head of a tie group count as tied.
  double epsilon = 1e-9;
};

// Ordering: score desc; within a tie group in-degree desc, Wikipedia-mapped
// first, MID asc, relation asc. Inputs are used as given; callers truncate
// to m and r. Duplicate (mid, relation) pairs keep the highest score.
std::vector<AnswerTuple> integrate(const std::vector<EntityScore>& entities,
                                   const std::vector<std::pair<std::string, double>>& relations,
                                   const KnowledgeGraph& kg, const IntegratorConfig& config = {});

}  // namespace kgqa
