#pragma once

// Linear-chain CRF over the two-tag set {NotEntity, Entity}.
//
// Path score for tags y over L positions:
//   start[y_0] + sum_i emit_i(y_i) + sum_{i>0} trans[y_{i-1}][y_i] + stop[y_{L-1}]
// where emit_i(t) sums the emission weights of the active features at i.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgqa/text_prep.h"

namespace kgqa {

enum class Tag : std::uint8_t { NotEntity = 0, Entity = 1 };
inline constexpr int kNumTags = 2;

using TagSeq = std::vector<Tag>;

// "I" for Entity, "O" for NotEntity.
char tag_char(Tag t);
Tag parse_tag(std::string_view s);
std::string format_tags(const TagSeq& tags);
TagSeq parse_tags(std::string_view space_separated);

// Half-open token span.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

// Maximal runs of Entity tags, in order.
std::vector<Span> extract_spans(const TagSeq& tags);

// Feature strings active at position i. Templates: bias, current and
// neighbouring tokens (+-2), neighbouring token bigrams, prefixes and
// suffixes of length 1-4, collapsed word shape, position bucket
// (first/last/interior), absolute and reverse index, length bucket.
std::vector<std::string> featurize(const std::vector<std::string>& tokens, std::size_t i);

// Per-position active feature ids.
using SequenceFeatures = std::vector<std::vector<std::uint32_t>>;

class FeatureVocab {
 public:
  FeatureVocab() = default;
  // Ids are assigned in lexicographic order of the names.
  explicit FeatureVocab(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  // -1 when absent.
  std::int64_t find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(FeatureVocab vocab, double l2);

  // Flat parameter layout: emission [feature * 2 + tag], then transition
  // [from * 2 + to] (4), start (2), stop (2).
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t param_count() const { return weights_.size(); }

  std::size_t emission_index(std::uint32_t feature, Tag t) const {
    return feature * 2 + static_cast<std::size_t>(t);
  }
  std::size_t transition_index(Tag from, Tag to) const {
    return vocab_.size() * 2 + static_cast<std::size_t>(from) * 2 + static_cast<std::size_t>(to);
  }
  std::size_t start_index(Tag t) const { return vocab_.size() * 2 + 4 + static_cast<std::size_t>(t); }
  std::size_t stop_index(Tag t) const { return vocab_.size() * 2 + 6 + static_cast<std::size_t>(t); }

  const FeatureVocab& vocab() const { return vocab_; }
  double l2() const { return l2_; }

  // Unknown features are dropped.
  SequenceFeatures encode(const std::vector<std::string>& tokens) const;

  std::string serialize() const;
  static CrfModel deserialize(std::string_view text, const std::string& source = "crf model");
  void save(const std::filesystem::path& path) const;
  static CrfModel load(const std::filesystem::path& path);

 private:
  FeatureVocab vocab_;
  std::vector<double> weights_ = std::vector<double>(8, 0.0);
  double l2_ = 0.0;
};

struct Marginals {
  double log_z = 0.0;
  double log_z_backward = 0.0;
  std::vector<std::array<double, 2>> node;   // [position][tag]
  std::vector<std::array<double, 4>> edge;   // [position][from*2+to], position >= 1
};

Marginals forward_backward(const CrfModel& model, const SequenceFeatures& feats);

struct ViterbiResult {
  TagSeq tags;
  double score = 0.0;
};

// Ties between equally scoring paths resolve to the lexicographically
// smallest path with NotEntity < Entity.
ViterbiResult viterbi(const CrfModel& model, const SequenceFeatures& feats);

double path_score(const CrfModel& model, const SequenceFeatures& feats, const TagSeq& tags);

// log p(tags | tokens).
double log_likelihood(const CrfModel& model, const SequenceFeatures& feats, const TagSeq& tags);

// grad += scale * d log p(tags | tokens) / d weights, in the flat layout.
void add_log_likelihood_gradient(const CrfModel& model, const SequenceFeatures& feats,
                                 const TagSeq& tags, double scale, std::span<double> grad);

struct CrfExample {
  std::vector<std::string> tokens;
  TagSeq tags;
};

struct CrfTrainConfig {
  double l2 = 1e-4;
  double step = 0.5;
  // step_t = step / (1 + decay * epoch)
  double decay = 0.1;
  int epochs = 10;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  // Features seen fewer times in training are not added to the vocabulary.
  std::size_t min_feature_count = 1;
};

// Mean negative log-likelihood plus (l2 / 2) * ||w||^2.
double crf_objective(const CrfModel& model, std::span<const SequenceFeatures> feats,
                     std::span<const TagSeq> tags);

// Mini-batch gradient ascent on the L2-regularized conditional
// log-likelihood. `objective_history`, when given, receives crf_objective
// after every epoch. Throws kgqa::Error on an empty set or a length mismatch.
CrfModel train_crf(std::span<const CrfExample> examples, const CrfTrainConfig& config,
                   std::vector<double>* objective_history = nullptr);

// Featurize + encode + Viterbi.
TagSeq tag_tokens(const CrfModel& model, const std::vector<std::string>& tokens);

}  // namespace kgqa
