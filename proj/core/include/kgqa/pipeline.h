#pragma once

// End-to-end question answering: detection -> linking -> relation
// prediction -> integration, plus split-level evaluation.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "kgqa/annotation.h"
#include "kgqa/crf_tagger.h"
#include "kgqa/dataset.h"
#include "kgqa/entity_linker.h"
#include "kgqa/eval_harness.h"
#include "kgqa/integrator.h"
#include "kgqa/kg_store.h"
#include "kgqa/ngram_index.h"
#include "kgqa/relation_clf.h"

namespace kgqa {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// handled exactly once; callers write results into slot i, so output order
// never depends on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct PipelineOptions {
  IntegratorConfig integrator;
  LinkerConfig linker;
  std::size_t threads = 1;
};

// Everything computed for one question.
struct QuestionAnalysis {
  TokenSeq question;
  TagSeq tags;                          // empty when detection is external
  std::vector<Span> spans;
  std::vector<std::string> query;       // tokens handed to the linker
  std::vector<EntityScore> entities;    // ranked
  std::vector<std::pair<std::string, double>> relations;  // ranked
  std::vector<AnswerTuple> answers;
};

class QaSystem {
 public:
  // `crf` / `lr` may be null when the matching stage is supplied externally.
  QaSystem(const KnowledgeGraph& kg, const InvertedIndex* index, const CrfModel* crf,
           const LrModel* lr, PipelineOptions options = {});

  // `entity_depth` / `relation_depth` candidates are kept for recall
  // reporting; integration uses the first m / r of them.
  QuestionAnalysis analyze(const TokenSeq& question,
                           const std::vector<std::pair<std::string, double>>* external_entities,
                           const std::vector<std::pair<std::string, double>>* external_relations,
                           std::size_t entity_depth, std::size_t relation_depth) const;

  QuestionAnalysis answer(std::string_view question) const;

  const PipelineOptions& options() const { return options_; }

 private:
  const KnowledgeGraph& kg_;
  const InvertedIndex* index_;
  const CrfModel* crf_;
  const LrModel* lr_;
  PipelineOptions options_;
};

struct SplitEvaluation {
  std::vector<QuestionAnalysis> questions;
  // detection_{precision,recall,f1} (internal detection only),
  // linking_r@{1,5,20,50}, relation_r@{1,5}, end_to_end_accuracy,
  // answered_fraction. Values are fractions in [0, 1].
  std::map<std::string, double> metrics;
  ProjectionCounts gold_projection;
};

struct ExternalOverrides {
  const ExternalScores* entities = nullptr;
  const ExternalScores* relations = nullptr;
};

SplitEvaluation evaluate_split(const QaSystem& system, const std::vector<QaExample>& examples,
                               const KnowledgeGraph& kg, ExternalOverrides overrides = {});

// Candidate dumps and answer dumps, one line per (qid, rank).
std::string format_entity_candidates(const std::vector<QuestionAnalysis>& qs);
std::string format_relation_candidates(const std::vector<QuestionAnalysis>& qs);
std::string format_answers(const std::vector<QuestionAnalysis>& qs);

}  // namespace kgqa
