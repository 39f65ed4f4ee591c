#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "kgqa/error.h"
#include "kgqa/relation_clf.h"
#include "oracles.h"

namespace kgqa {
namespace {

using Tokens = std::vector<std::string>;

std::vector<TokenSeq> questions(std::initializer_list<const char*> qs) {
  std::vector<TokenSeq> out;
  for (const char* q : qs) out.push_back(tokenize(q));
  return out;
}

std::map<std::string, double> as_map(const TfidfFeaturizer& f, const SparseVector& v) {
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < v.nnz(); ++k) out[f.grams()[v.index[k]]] = v.value[k];
  return out;
}

TEST(Tfidf, OovOnlyGivesZeroVector) {
  auto f = TfidfFeaturizer::fit(questions({"where was he born", "who wrote it"}));
  EXPECT_EQ(f.featurize({"zzz", "qqq"}).nnz(), 0u);
}

TEST(Tfidf, SingleKnownUnigramIsUnit) {
  auto f = TfidfFeaturizer::fit(questions({"where was he born", "who wrote it"}));
  SparseVector v = f.featurize({"born", "zzz"});
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_DOUBLE_EQ(v.value[0], 1.0);
}

// Count-and-normalize oracle over unigrams and bigrams.
TEST(TfidfProperty, MatchesCountingOracle) {
  std::mt19937_64 rng(67);
  const auto& words = oracle::toy_words();
  auto random_q = [&] {
    Tokens t(1 + rng() % 7);
    for (auto& w : t) w = words[rng() % 8];
    return t;
  };
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenSeq> train;
    for (int i = 0; i < 20; ++i) train.push_back(TokenSeq{random_q(), ""});
    auto grams_of = [](const Tokens& t) {
      std::map<std::string, double> tf;
      for (std::size_t i = 0; i < t.size(); ++i) {
        tf[t[i]] += 1;
        if (i + 1 < t.size()) tf[t[i] + " " + t[i + 1]] += 1;
      }
      return tf;
    };
    std::map<std::string, double> df;
    for (const auto& q : train) {
      for (const auto& [g, c] : grams_of(q.tokens)) df[g] += 1;
    }
    auto f = TfidfFeaturizer::fit(train);
    ASSERT_EQ(f.dimension(), df.size());
    for (int k = 0; k < 10; ++k) {
      Tokens q = random_q();
      q.push_back(words[8 + rng() % 7]);  // some OOV-ish tokens
      std::map<std::string, double> expect;
      double norm = 0;
      for (const auto& [g, c] : grams_of(q)) {
        if (!df.count(g)) continue;
        double v = c * (std::log((1.0 + 20.0) / (1.0 + df[g])) + 1.0);
        expect[g] = v;
        norm += v * v;
      }
      for (auto& [g, v] : expect) v /= std::sqrt(norm);
      auto got = as_map(f, f.featurize(q));
      ASSERT_EQ(got.size(), expect.size());
      for (const auto& [g, v] : expect) ASSERT_NEAR(got[g], v, 1e-12) << g;
    }
  }
}

TEST(RelationTerms, SingleName) {
  std::vector<std::string> rels = {"people/person/place_of_birth"};
  RelationTerms t = fit_relation_terms(rels);
  std::set<std::string> got(t.terms.begin(), t.terms.end());
  EXPECT_EQ(got, (std::set<std::string>{"people", "person", "place", "of", "birth"}));
}

TEST(RelationTerms, FrequencyOrder) {
  std::vector<std::string> rels;
  for (int i = 0; i < 3; ++i) rels.push_back("film/x");
  for (int i = 0; i < 5; ++i) rels.push_back("person/y");
  RelationTerms t = fit_relation_terms(rels);
  auto pos = [&](const std::string& s) { return t.slot.at(s); };
  EXPECT_LT(pos("person"), pos("film"));
  EXPECT_LT(pos("film"), pos("x"));
}

TEST(RelationTerms, CapAt300) {
  std::vector<std::string> rels;
  for (int i = 0; i < 400; ++i) rels.push_back("t" + std::to_string(i));
  EXPECT_EQ(fit_relation_terms(rels).size(), 300u);
  EXPECT_THROW(fit_relation_terms(std::vector<std::string>{}), Error);
}

std::shared_ptr<EmbeddingTable> table_with(const std::string& token, float base) {
  auto t = std::make_shared<EmbeddingTable>();
  std::vector<float> v(kEmbeddingDim);
  for (std::size_t d = 0; d < v.size(); ++d) v[d] = base + static_cast<float>(d);
  t->add(token, v);
  return t;
}

TEST(FeaturizeEmbed, EmptyAndSingle) {
  auto emb = table_with("born", 0.5f);
  std::vector<std::string> rels = {"people/person/place_of_birth"};
  RelationTerms terms = fit_relation_terms(rels);
  auto zero = featurize_embed({"zzz"}, *emb, terms);
  ASSERT_EQ(zero.size(), kEmbeddingDim + terms.size());
  for (double x : zero) EXPECT_EQ(x, 0.0);
  auto one = featurize_embed({"born", "zzz"}, *emb, terms);
  for (std::size_t d = 0; d < kEmbeddingDim; ++d) EXPECT_EQ(one[d], 0.5 + d);
}

TEST(FeaturizeEmbed, RelationTermIndicator) {
  EmbeddingTable emb;
  std::vector<std::string> rels = {"people/person/place_of_birth", "people/person/born_in"};
  RelationTerms terms = fit_relation_terms(rels);
  auto v = featurize_embed({"where", "was", "he", "born", "born"}, emb, terms);
  EXPECT_EQ(v[kEmbeddingDim + terms.slot.at("born")], 1.0);
  EXPECT_EQ(v[kEmbeddingDim + terms.slot.at("birth")], 0.0);
}

TEST(EmbeddingTable, ParseRejectsWrongDimension) {
  EXPECT_THROW(EmbeddingTable::parse("tok 1 2 3\n"), ParseError);
  EXPECT_THROW(table_with("x", 0)->add("y", std::vector<float>(3)), Error);
}

TEST(Softmax, NormalizedAndShiftInvariant) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g(0, 20);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(2 + rng() % 60);
    for (double& x : s) x = g(rng);
    auto p = softmax(s);
    ASSERT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    auto top = topk_from_scores(s, s.size());
    std::vector<double> shifted = s;
    for (double& x : shifted) x += 123.0;
    auto top2 = topk_from_scores(shifted, s.size());
    for (std::size_t i = 0; i < top.size(); ++i) ASSERT_EQ(top[i].klass, top2[i].klass);
  }
}

TEST(TopK, TiesByClassId) {
  std::vector<double> zero(4, 0.0);
  auto t = topk_from_scores(zero, 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].klass, 0u);
  EXPECT_EQ(t[1].klass, 1u);
  EXPECT_DOUBLE_EQ(t[0].probability, 0.25);
}

std::vector<LrExample> separable_set() {
  std::vector<LrExample> out;
  const char* a[] = {"where was alpha born", "alpha birthplace please", "birth city of alpha",
                     "alpha was born where"};
  const char* b[] = {"who wrote beta", "author of beta", "beta writer name", "beta was written by"};
  const char* c[] = {"what genre is gamma", "gamma music style", "style of gamma", "gamma genre"};
  for (const char* q : a) out.push_back({tokenize(q), "people/person/place_of_birth"});
  for (const char* q : b) out.push_back({tokenize(q), "book/written_work/author"});
  for (const char* q : c) out.push_back({tokenize(q), "music/artist/genre"});
  return out;
}

LrModel tfidf_model(const std::vector<LrExample>& ex) {
  std::vector<TokenSeq> qs;
  for (const auto& e : ex) qs.push_back(e.question);
  return LrModel::make_tfidf(collect_classes(ex), TfidfFeaturizer::fit(qs));
}

TEST(TrainLr, SeparableSetReachesFullTrainingAccuracy) {
  auto ex = separable_set();
  LrTrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 4;
  LrModel m = train_lr(tfidf_model(ex), ex, cfg);
  for (const auto& e : ex) {
    auto top = predict_topk(m, e.question.tokens, 1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].relation, e.relation);
  }
}

TEST(TrainLr, ZeroEpochsIsUniform) {
  auto ex = separable_set();
  LrTrainConfig cfg;
  cfg.epochs = 0;
  LrModel m = train_lr(tfidf_model(ex), ex, cfg);
  auto top = predict_topk(m, ex[0].question.tokens, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_DOUBLE_EQ(top[0].probability, 1.0 / 3.0);
  EXPECT_EQ(top[0].relation, m.classes()[0]);
  EXPECT_EQ(top[1].relation, m.classes()[1]);
}

TEST(TrainLr, SingleClassRejected) {
  std::vector<LrExample> ex = {{tokenize("a"), "r"}, {tokenize("b"), "r"}};
  EXPECT_THROW(collect_classes(ex), Error);
}

TEST(TrainLr, ObjectiveNonIncreasingWithSmallStep) {
  auto ex = separable_set();
  LrTrainConfig cfg;
  cfg.epochs = 20;
  cfg.step = 0.1;
  cfg.batch_size = 1000;
  std::vector<double> hist;
  train_lr(tfidf_model(ex), ex, cfg, &hist);
  for (std::size_t i = 1; i < hist.size(); ++i) EXPECT_LE(hist[i], hist[i - 1] + 1e-12);
}

TEST(LrProperty, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> g(0, 0.7);
  auto ex = separable_set();
  for (int trial = 0; trial < 10; ++trial) {
    LrModel m = tfidf_model(ex);
    for (double& w : m.weights()) w = g(rng);
    for (double& b : m.bias()) b = g(rng);
    std::vector<SparseVector> xs;
    std::vector<std::uint32_t> ys;
    for (const auto& e : ex) {
      xs.push_back(m.featurize(e.question.tokens));
      ys.push_back(static_cast<std::uint32_t>(m.find_class(e.relation)));
    }
    const double l2 = 0.01 * trial;
    std::vector<double> gw, gb;
    lr_objective(m, xs, ys, l2, &gw, &gb);
    const double h = 1e-5;
    auto check = [&](std::span<double> params, const std::vector<double>& grad) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double orig = params[k];
        params[k] = orig + h;
        const double up = lr_objective(m, xs, ys, l2);
        params[k] = orig - h;
        const double down = lr_objective(m, xs, ys, l2);
        params[k] = orig;
        ASSERT_LT(oracle::rel_error(grad[k], (up - down) / (2 * h)), 1e-5) << k;
      }
    };
    check(m.weights(), gw);
    check(m.bias(), gb);
  }
}

TEST(LrProperty, ProbabilitiesSumToOne) {
  auto ex = separable_set();
  LrModel m = train_lr(tfidf_model(ex), ex, LrTrainConfig{});
  for (const char* q : {"where was alpha born", "nothing known here", ""}) {
    auto p = m.probabilities(m.featurize(tokenize(q).tokens));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    auto all = predict_topk(m, tokenize(q).tokens, m.class_count());
    double s = 0;
    for (const auto& r : all) s += r.probability;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(LrModel, TfidfSerializationRoundTrip) {
  auto ex = separable_set();
  LrModel m = train_lr(tfidf_model(ex), ex, LrTrainConfig{});
  const std::string text = m.serialize();
  EXPECT_EQ(text.rfind("kgqa-lr v1\n", 0), 0u);
  LrModel back = LrModel::deserialize(text);
  EXPECT_EQ(back.serialize(), text);
}

TEST(LrModel, EmbedSerializationRoundTrip) {
  auto ex = separable_set();
  auto emb = table_with("alpha", 0.25f);
  std::vector<std::string> rels;
  for (const auto& e : ex) rels.push_back(e.relation);
  LrModel m = LrModel::make_embed(collect_classes(ex), fit_relation_terms(rels), emb, "emb.txt");
  m = train_lr(std::move(m), ex, LrTrainConfig{});
  EXPECT_EQ(m.dimension(), kEmbeddingDim + fit_relation_terms(rels).size());
  std::string seen;
  LrModel back = LrModel::deserialize(m.serialize(), [&](const std::string& p) {
    seen = p;
    return std::shared_ptr<const EmbeddingTable>(emb);
  });
  EXPECT_EQ(seen, "emb.txt");
  EXPECT_EQ(back.serialize(), m.serialize());
  auto x = back.featurize(tokenize("alpha").tokens);
  EXPECT_EQ(back.probabilities(x), m.probabilities(m.featurize(tokenize("alpha").tokens)));
}

}  // namespace
}  // namespace kgqa
