#include "kgqa/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>

#include "kgqa/annotation.h"
#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

QaSystem::QaSystem(const KnowledgeGraph& kg, const InvertedIndex* index, const CrfModel* crf,
                   const LrModel* lr, PipelineOptions options)
    : kg_(kg), index_(index), crf_(crf), lr_(lr), options_(options) {
  if (options_.integrator.m == 0 || options_.integrator.r == 0) {
    throw Error("m and r must be at least 1");
  }
}

QuestionAnalysis QaSystem::analyze(
    const TokenSeq& question, const std::vector<std::pair<std::string, double>>* external_entities,
    const std::vector<std::pair<std::string, double>>* external_relations,
    std::size_t entity_depth, std::size_t relation_depth) const {
  QuestionAnalysis a;
  a.question = question;
  entity_depth = std::max(entity_depth, options_.integrator.m);
  relation_depth = std::max(relation_depth, options_.integrator.r);

  if (external_entities) {
    for (const auto& [mid, score] : *external_entities) {
      if (a.entities.size() >= entity_depth) break;
      a.entities.push_back(EntityScore{normalize_mid(mid), score});
    }
  } else {
    if (!crf_ || !index_) throw Error("entity stage needs a CRF model and an index");
    a.tags = tag_tokens(*crf_, question.tokens);
    a.spans = extract_spans(a.tags);
    a.query = choose_linking_query(question.tokens, a.spans);
    for (const CandidateEntity& c : link(a.query, *index_, kg_, entity_depth, options_.linker)) {
      a.entities.push_back(EntityScore{kg_.mid(c.entity), c.lev_score});
    }
  }

  if (external_relations) {
    for (const auto& [rel, score] : *external_relations) {
      if (a.relations.size() >= relation_depth) break;
      a.relations.emplace_back(normalize_relation(rel), score);
    }
  } else {
    if (!lr_) throw Error("relation stage needs an LR model");
    for (RelationScore& rs : predict_topk(*lr_, question.tokens, relation_depth)) {
      a.relations.emplace_back(std::move(rs.relation), rs.probability);
    }
  }

  std::vector<EntityScore> top_entities(
      a.entities.begin(),
      a.entities.begin() + static_cast<std::ptrdiff_t>(std::min(a.entities.size(), options_.integrator.m)));
  std::vector<std::pair<std::string, double>> top_relations(
      a.relations.begin(),
      a.relations.begin() + static_cast<std::ptrdiff_t>(std::min(a.relations.size(), options_.integrator.r)));
  a.answers = integrate(top_entities, top_relations, kg_, options_.integrator);
  return a;
}

QuestionAnalysis QaSystem::answer(std::string_view question) const {
  return analyze(tokenize(question), nullptr, nullptr, options_.integrator.m, options_.integrator.r);
}

namespace {

constexpr std::size_t kLinkingDepths[] = {1, 5, 20, 50};
constexpr std::size_t kRelationDepths[] = {1, 5};

}  // namespace

SplitEvaluation evaluate_split(const QaSystem& system, const std::vector<QaExample>& examples,
                               const KnowledgeGraph& kg, ExternalOverrides overrides) {
  SplitEvaluation ev;
  const std::size_t n = examples.size();
  ev.questions.resize(n);
  std::vector<LabeledQuestion> gold_labels(overrides.entities ? 0 : n);

  auto lookup = [](const ExternalScores* s, std::size_t qid)
      -> const std::vector<std::pair<std::string, double>>* {
    if (!s) return nullptr;
    static const std::vector<std::pair<std::string, double>> kEmpty;
    auto it = s->by_qid.find(qid);
    return it == s->by_qid.end() ? &kEmpty : &it->second;
  };

  parallel_for(n, system.options().threads, [&](std::size_t q) {
    const QaExample& ex = examples[q];
    ev.questions[q] = system.analyze(ex.question, lookup(overrides.entities, q),
                                     lookup(overrides.relations, q), 50, 5);
    if (!overrides.entities) gold_labels[q] = project_entity(ex.question, ex.subject, kg);
  });

  if (!overrides.entities) {
    std::vector<std::vector<Span>> pred(n), gold(n);
    for (std::size_t q = 0; q < n; ++q) {
      pred[q] = ev.questions[q].spans;
      gold[q] = extract_spans(gold_labels[q].tags);
    }
    PrfScore prf = span_prf(pred, gold);
    ev.metrics["detection_precision"] = prf.precision;
    ev.metrics["detection_recall"] = prf.recall;
    ev.metrics["detection_f1"] = prf.f1;
    ev.gold_projection = count_kinds(gold_labels);
  }

  std::vector<std::vector<std::string>> ent_ranked(n), rel_ranked(n);
  std::vector<std::string> gold_mid(n), gold_rel(n);
  std::vector<std::optional<MidRelation>> answers(n);
  std::vector<MidRelation> gold_pairs(n);
  std::size_t answered = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const QuestionAnalysis& a = ev.questions[q];
    for (const EntityScore& e : a.entities) ent_ranked[q].push_back(e.mid);
    for (const auto& r : a.relations) rel_ranked[q].push_back(r.first);
    gold_mid[q] = examples[q].subject;
    gold_rel[q] = examples[q].relation;
    gold_pairs[q] = {examples[q].subject, examples[q].relation};
    if (!a.answers.empty()) {
      answers[q] = MidRelation{a.answers.front().mid, a.answers.front().relation};
      ++answered;
    }
  }
  for (std::size_t d : kLinkingDepths) {
    ev.metrics["linking_r@" + std::to_string(d)] = n ? recall_at_n(ent_ranked, gold_mid, d) : 0.0;
  }
  for (std::size_t d : kRelationDepths) {
    ev.metrics["relation_r@" + std::to_string(d)] = n ? recall_at_n(rel_ranked, gold_rel, d) : 0.0;
  }
  ev.metrics["end_to_end_accuracy"] = end_to_end_accuracy(answers, gold_pairs);
  ev.metrics["answered_fraction"] = n ? static_cast<double>(answered) / static_cast<double>(n) : 0.0;
  return ev;
}

std::string format_entity_candidates(const std::vector<QuestionAnalysis>& qs) {
  std::ostringstream out;
  for (std::size_t q = 0; q < qs.size(); ++q) {
    for (std::size_t r = 0; r < qs[q].entities.size(); ++r) {
      out << q << '\t' << r + 1 << '\t' << qs[q].entities[r].mid << '\t'
          << io::format_double(qs[q].entities[r].score) << '\n';
    }
  }
  return out.str();
}

std::string format_relation_candidates(const std::vector<QuestionAnalysis>& qs) {
  std::ostringstream out;
  for (std::size_t q = 0; q < qs.size(); ++q) {
    for (std::size_t r = 0; r < qs[q].relations.size(); ++r) {
      out << q << '\t' << r + 1 << '\t' << qs[q].relations[r].first << '\t'
          << io::format_double(qs[q].relations[r].second) << '\n';
    }
  }
  return out.str();
}

std::string format_answers(const std::vector<QuestionAnalysis>& qs) {
  std::ostringstream out;
  for (std::size_t q = 0; q < qs.size(); ++q) {
    for (std::size_t r = 0; r < qs[q].answers.size(); ++r) {
      const AnswerTuple& t = qs[q].answers[r];
      out << q << '\t' << r + 1 << '\t' << t.mid << '\t' << t.relation << '\t'
          << io::format_double(t.score) << '\n';
    }
  }
  return out.str();
}

}  // namespace kgqa
