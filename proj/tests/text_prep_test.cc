#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include "kgqa/text_prep.h"

namespace kgqa {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, QuestionMarkIsDetachedAndKept) {
  EXPECT_EQ(tokenize("Where was Sasha Vujacic born?").tokens,
            (Tokens{"where", "was", "sasha", "vujacic", "born", "?"}));
}

TEST(Tokenize, Contractions) {
  EXPECT_EQ(tokenize("don't").tokens, (Tokens{"do", "n't"}));
  EXPECT_EQ(tokenize("Sasha's").tokens, (Tokens{"sasha", "'s"}));
  EXPECT_EQ(tokenize("I'm we're they've you'll he'd").tokens,
            (Tokens{"i", "'m", "we", "'re", "they", "'ve", "you", "'ll", "he", "'d"}));
  EXPECT_EQ(tokenize("DON'T").tokens, (Tokens{"do", "n't"}));
}

TEST(Tokenize, EmptyAndWhitespace) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t\n ").empty());
}

TEST(Tokenize, PunctuationBothEnds) {
  EXPECT_EQ(tokenize("(\"hello,\" she said.)").tokens,
            (Tokens{"(", "\"", "hello", ",", "\"", "she", "said", ".", ")"}));
  EXPECT_EQ(tokenize("what's [this]?!").tokens,
            (Tokens{"what", "'s", "[", "this", "]", "?", "!"}));
}

TEST(Tokenize, InteriorPunctuationStays) {
  EXPECT_EQ(tokenize("u.s.a e-mail 3.14").tokens, (Tokens{"u.s.a", "e-mail", "3.14"}));
}

TEST(Tokenize, RawIsPreserved) {
  EXPECT_EQ(tokenize("Hi There").raw, "Hi There");
}

TEST(Tokenize, BareApostropheSuffixIsNotSplit) {
  // No stem before the clitic, so the chunk stays whole.
  EXPECT_EQ(tokenize("'s").tokens, (Tokens{"'s"}));
}

TEST(JoinTokens, Ranges) {
  Tokens t{"a", "b", "c"};
  EXPECT_EQ(join_tokens(t), "a b c");
  EXPECT_EQ(join_tokens(t, 1, 3), "b c");
  EXPECT_EQ(join_tokens(t, 2, 2), "");
}

// Property: tokens are non-empty, whitespace-free and lowercase, and
// re-tokenizing the joined output is a fixpoint.
TEST(TokenizeProperty, IdempotentLowercaseNoWhitespace) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ '.,?!;:\"()[]ntsmdlrve-09\t";
  for (int trial = 0; trial < 3000; ++trial) {
    std::string s(rng() % 40, ' ');
    for (char& c : s) c = alphabet[rng() % alphabet.size()];
    TokenSeq once = tokenize(s);
    for (const std::string& tok : once.tokens) {
      ASSERT_FALSE(tok.empty());
      for (char c : tok) {
        ASSERT_FALSE(std::isspace(static_cast<unsigned char>(c))) << s;
        ASSERT_FALSE(std::isupper(static_cast<unsigned char>(c))) << s;
      }
    }
    ASSERT_EQ(tokenize(join_tokens(once.tokens)).tokens, once.tokens) << "input: " << s;
  }
}

}  // namespace
}  // namespace kgqa
