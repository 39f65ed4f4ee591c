#include <gtest/gtest.h>

#include <random>

#include "kgqa/annotation.h"
#include "kgqa/levenshtein.h"
#include "oracles.h"

namespace kgqa {
namespace {

constexpr Tag O = Tag::NotEntity;
constexpr Tag I = Tag::Entity;

std::vector<TokenSeq> aliases(std::initializer_list<const char*> names) {
  std::vector<TokenSeq> out;
  for (const char* n : names) out.push_back(tokenize(n));
  return out;
}

TEST(ProjectEntity, ExactMatch) {
  auto q = tokenize("where was sasha vujacic born ?");
  auto l = project_entity(q, aliases({"sasha vujacic"}));
  EXPECT_EQ(l.kind, ProjectionKind::Exact);
  EXPECT_EQ(l.tags, (TagSeq{O, O, I, I, O, O}));
}

TEST(ProjectEntity, ExactSubwindowBeforeClitic) {
  auto q = tokenize("what is sasha vujacic's height");
  auto l = project_entity(q, aliases({"sasha vujacic"}));
  EXPECT_EQ(l.kind, ProjectionKind::Exact);
  EXPECT_EQ(l.tags, (TagSeq{O, O, I, I, O, O}));
}

TEST(ProjectEntity, LongestAliasThenLeftmost) {
  auto q = tokenize("smith met john smith");
  auto l = project_entity(q, aliases({"smith", "john smith"}));
  EXPECT_EQ(l.tags, (TagSeq{O, O, I, I}));
  auto l2 = project_entity(tokenize("smith and smith"), aliases({"smith"}));
  EXPECT_EQ(l2.tags, (TagSeq{I, O, O}));
}

TEST(ProjectEntity, FuzzyFallback) {
  auto q = tokenize("who is john smith");
  auto l = project_entity(q, aliases({"john smyth"}));
  EXPECT_EQ(l.kind, ProjectionKind::Fuzzy);
  EXPECT_EQ(l.tags, (TagSeq{O, O, I, I}));
}

TEST(ProjectEntity, NoAliasFails) {
  auto q = tokenize("who is it");
  auto l = project_entity(q, std::span<const TokenSeq>{});
  EXPECT_EQ(l.kind, ProjectionKind::Failed);
  EXPECT_EQ(l.tags, TagSeq(3, O));
}

TEST(ProjectEntity, ThroughGraph) {
  oracle::ToyGraph g;
  g.triples.emplace_back("m.1", "r", "m.2");
  g.names.emplace_back("m.1", "Sasha Vujacic");
  KnowledgeGraph kg = g.build();
  auto l = project_entity(tokenize("Where was Sasha Vujacic born?"), "m.1", kg);
  EXPECT_EQ(l.kind, ProjectionKind::Exact);
  EXPECT_EQ(project_entity(tokenize("x"), "m.2", kg).kind, ProjectionKind::Failed);
}

TEST(LabeledCorpus, RoundTrip) {
  std::vector<LabeledQuestion> c = {
      project_entity(tokenize("where was sasha vujacic born ?"), aliases({"sasha vujacic"})),
      project_entity(tokenize("who is john smith"), aliases({"john smyth"})),
      project_entity(tokenize("nothing"), std::span<const TokenSeq>{}),
  };
  const std::string text = format_labeled_corpus(c);
  auto back = parse_labeled_corpus(text);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].question.tokens, c[i].question.tokens);
    EXPECT_EQ(back[i].tags, c[i].tags);
    EXPECT_EQ(back[i].kind, c[i].kind);
  }
  EXPECT_EQ(format_labeled_corpus(back), text);
  ProjectionCounts k = count_kinds(back);
  EXPECT_EQ(k.exact, 1u);
  EXPECT_EQ(k.fuzzy, 1u);
  EXPECT_EQ(k.failed, 1u);
}

// Property: exact whenever some alias occurs verbatim; otherwise the fuzzy
// window is non-empty and no admissible window is strictly closer.
TEST(ProjectEntityProperty, ExactAndFuzzyContracts) {
  std::mt19937_64 rng(53);
  const auto& words = oracle::toy_words();
  auto random_tokens = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
    return tokenize(s);
  };
  for (int trial = 0; trial < 400; ++trial) {
    TokenSeq q = random_tokens(1 + rng() % 8);
    std::vector<TokenSeq> al;
    for (std::size_t k = 0, n = 1 + rng() % 3; k < n; ++k) al.push_back(random_tokens(1 + rng() % 3));
    LabeledQuestion l = project_entity(q, al);
    ASSERT_EQ(l.tags.size(), q.size());
    auto spans = extract_spans(l.tags);
    ASSERT_EQ(spans.size(), 1u);
    const Span s = spans[0];
    std::vector<std::string> window(q.tokens.begin() + s.begin, q.tokens.begin() + s.end);

    bool any_verbatim = false;
    std::size_t longest = 0;
    for (const TokenSeq& a : al) {
      if (oracle::contains_window(q.tokens, a.tokens)) {
        any_verbatim = true;
        longest = std::max(longest, a.size());
      }
    }
    if (any_verbatim) {
      ASSERT_EQ(l.kind, ProjectionKind::Exact);
      ASSERT_EQ(window.size(), longest);
      bool equals_alias = false;
      for (const TokenSeq& a : al) equals_alias |= a.tokens == window;
      ASSERT_TRUE(equals_alias);
      continue;
    }
    ASSERT_EQ(l.kind, ProjectionKind::Fuzzy);
    std::size_t max_alias = 0;
    for (const TokenSeq& a : al) max_alias = std::max(max_alias, a.size());
    auto best_distance = [&](const std::vector<std::string>& w) {
      std::size_t best = SIZE_MAX;
      for (const TokenSeq& a : al) best = std::min(best, indel_distance(join_tokens(w), join_tokens(a.tokens)));
      return best;
    };
    const std::size_t chosen = best_distance(window);
    for (std::size_t len = 1; len <= std::min(q.size(), max_alias + 2); ++len) {
      for (std::size_t i = 0; i + len <= q.size(); ++i) {
        std::vector<std::string> w(q.tokens.begin() + i, q.tokens.begin() + i + len);
        ASSERT_GE(best_distance(w), chosen);
      }
    }
  }
}

}  // namespace
}  // namespace kgqa
