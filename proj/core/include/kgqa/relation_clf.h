#pragma once

// Relation prediction: multinomial logistic regression over the whole
// question, with two featurizers:
//   * tf-idf over unigrams and bigrams, L2-normalized;
//   * averaged 300-d word embeddings concatenated with a binary indicator
//     vector over the most frequent relation-name terms.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgqa/text_prep.h"

namespace kgqa {

inline constexpr std::size_t kEmbeddingDim = 300;
inline constexpr std::size_t kRelationTermSlots = 300;

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly ascending
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
};

SparseVector to_sparse(std::span<const double> dense);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // "token v1 ... v300" lines. When `keep` is non-null only those tokens are
  // retained. Throws ParseError on a wrong dimension or bad number.
  static EmbeddingTable load(const std::filesystem::path& path,
                             const std::unordered_set<std::string>* keep = nullptr);
  static EmbeddingTable parse(std::string_view text,
                              const std::unordered_set<std::string>* keep = nullptr,
                              const std::string& source = "embeddings");

  // Throws kgqa::Error unless vec has kEmbeddingDim entries.
  void add(std::string token, std::span<const float> vec);

  // Null when the token has no vector.
  const float* find(std::string_view token) const;
  std::size_t size() const { return index_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
};

// Terms of a relation name: split on '/' and '_', lowercased, empties dropped.
std::vector<std::string> relation_name_terms(std::string_view relation);

struct RelationTerms {
  std::vector<std::string> terms;  // slot order
  std::unordered_map<std::string, std::size_t> slot;

  std::size_t size() const { return terms.size(); }
};

// Counts each distinct term once per occurrence of a relation in
// `relations` (the training examples' gold relations), keeps the `cap` most
// frequent, ties broken lexicographically. Throws on an empty list.
RelationTerms fit_relation_terms(std::span<const std::string> relations,
                                 std::size_t cap = kRelationTermSlots);
RelationTerms make_relation_terms(std::vector<std::string> terms);

class TfidfFeaturizer {
 public:
  TfidfFeaturizer() = default;

  // idf(g) = ln((1 + N) / (1 + df(g))) + 1 over the N training questions.
  // Grams with df < min_df are left out of the vocabulary.
  static TfidfFeaturizer fit(std::span<const TokenSeq> questions, std::size_t min_df = 1);
  static TfidfFeaturizer from_parts(std::vector<std::string> grams, std::vector<double> idf,
                                    std::size_t documents);

  std::size_t dimension() const { return grams_.size(); }
  std::size_t documents() const { return documents_; }
  const std::vector<std::string>& grams() const { return grams_; }
  const std::vector<double>& idf() const { return idf_; }
  std::int64_t find(std::string_view gram) const;

  // tf * idf over known unigrams and bigrams, L2-normalized; all-OOV input
  // gives the zero vector.
  SparseVector featurize(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> grams_;  // sorted
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> idf_;
  std::size_t documents_ = 0;
};

// Dense vector of kEmbeddingDim + terms.size() entries.
std::vector<double> featurize_embed(const std::vector<std::string>& tokens,
                                    const EmbeddingTable& emb, const RelationTerms& terms);

enum class FeaturizerKind { Tfidf, Embed };

std::string_view featurizer_name(FeaturizerKind k);
FeaturizerKind parse_featurizer(std::string_view s);

struct RelationScore {
  std::string relation;
  double probability = 0.0;
};

struct ClassScore {
  std::uint32_t klass = 0;
  double probability = 0.0;
};

// Softmax over `scores`, sorted by probability desc then class id asc,
// truncated to k.
std::vector<ClassScore> topk_from_scores(std::span<const double> scores, std::size_t k);

std::vector<double> softmax(std::span<const double> scores);

class LrModel {
 public:
  LrModel() = default;

  // Untrained (zero-weight) models with fitted featurizer state.
  static LrModel make_tfidf(std::vector<std::string> classes, TfidfFeaturizer tfidf);
  static LrModel make_embed(std::vector<std::string> classes, RelationTerms terms,
                            std::shared_ptr<const EmbeddingTable> embeddings,
                            std::string embeddings_path = {});

  FeaturizerKind kind() const { return kind_; }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t dimension() const { return dim_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::int64_t find_class(std::string_view relation) const;
  const TfidfFeaturizer& tfidf() const { return tfidf_; }
  const RelationTerms& relation_terms() const { return terms_; }
  const std::string& embeddings_path() const { return embeddings_path_; }

  // Feature-major: weight(feature j, class c) = weights()[j * C + c].
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  SparseVector featurize(const std::vector<std::string>& tokens) const;
  std::vector<double> scores(const SparseVector& x) const;
  std::vector<double> probabilities(const SparseVector& x) const;

  std::string serialize() const;
  // For embed models `load_embeddings` is called with the stored path.
  using EmbeddingLoader =
      std::function<std::shared_ptr<const EmbeddingTable>(const std::string& path)>;
  static LrModel deserialize(std::string_view text, const EmbeddingLoader& load_embeddings = {},
                             const std::string& source = "lr model");
  void save(const std::filesystem::path& path) const;
  static LrModel load(const std::filesystem::path& path,
                      const EmbeddingLoader& load_embeddings = {});

 private:
  void allocate();

  FeaturizerKind kind_ = FeaturizerKind::Tfidf;
  std::vector<std::string> classes_;
  std::unordered_map<std::string, std::uint32_t> class_index_;
  TfidfFeaturizer tfidf_;
  RelationTerms terms_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
  std::string embeddings_path_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

std::vector<RelationScore> predict_topk(const LrModel& model, const std::vector<std::string>& tokens,
                                        std::size_t k);

struct LrExample {
  TokenSeq question;
  std::string relation;
};

struct LrTrainConfig {
  double l2 = 1e-6;
  double step = 1.0;
  // step_t = step / (1 + decay * epoch)
  double decay = 0.1;
  int epochs = 15;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

// Sorted distinct relations; throws kgqa::Error when fewer than two.
std::vector<std::string> collect_classes(std::span<const LrExample> examples);

// Mean NLL + (l2 / 2) * ||W||^2 (bias unregularized). Gradients, when
// requested, are written (not accumulated) in the model's layouts.
double lr_objective(const LrModel& model, std::span<const SparseVector> xs,
                    std::span<const std::uint32_t> ys, double l2,
                    std::vector<double>* grad_weights = nullptr,
                    std::vector<double>* grad_bias = nullptr);

// Mini-batch gradient descent starting from `model`'s current weights.
// Examples whose relation is not a model class are skipped. Throws when the
// model has fewer than two classes. `objective_history` receives
// lr_objective after every epoch.
LrModel train_lr(LrModel model, std::span<const LrExample> examples, const LrTrainConfig& config,
                 std::vector<double>* objective_history = nullptr);

}  // namespace kgqa
