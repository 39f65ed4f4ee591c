#pragma once

// Tokenization shared by training, indexing and query time.
//
// Rule table (applied to each whitespace-separated chunk):
//   1. Detach the punctuation characters  . , ? ! ; : " ( ) [ ]  from both
//      ends of the chunk, one token per character.
//   2. If what remains ends in n't, 's, 'm, 're, 've, 'll or 'd (ASCII case
//      insensitive) and the stem before it is non-empty, split the suffix off
//      and re-apply both rules to the stem.
//   3. Downcase (ASCII) every resulting token.
//
// The rules are applied to a fixpoint, so tokenize(join(tokenize(x))) equals
// tokenize(x).

#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string raw;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
};

TokenSeq tokenize(std::string_view raw);

// Space-joined token text, the canonical string form of a token sequence.
std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t end);
inline std::string join_tokens(const std::vector<std::string>& tokens) {
  return join_tokens(tokens, 0, tokens.size());
}

std::string to_lower_ascii(std::string_view s);

}  // namespace kgqa
