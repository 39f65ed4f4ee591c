#include "kgqa/text_prep.h"

#include <array>

namespace kgqa {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_detachable(char c) {
  switch (c) {
    case '.': case ',': case '?': case '!': case ';': case ':':
    case '"': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iends_with(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  std::string_view tail = s.substr(s.size() - suffix.size());
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (lower(tail[i]) != suffix[i]) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 7> kContractions = {"n't", "'s", "'m", "'re",
                                                            "'ve", "'ll", "'d"};

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = chunk.size();
  while (b < e && is_detachable(chunk[b])) {
    out.emplace_back(1, chunk[b]);
    ++b;
  }
  std::vector<std::string> trailing;
  while (e > b && is_detachable(chunk[e - 1])) {
    trailing.emplace_back(1, chunk[e - 1]);
    --e;
  }
  std::string_view core = chunk.substr(b, e - b);
  if (!core.empty()) {
    bool split = false;
    for (std::string_view suffix : kContractions) {
      if (core.size() > suffix.size() && iends_with(core, suffix)) {
        split_chunk(core.substr(0, core.size() - suffix.size()), out);
        out.emplace_back(core.substr(core.size() - suffix.size()));
        split = true;
        break;
      }
    }
    if (!split) out.emplace_back(core);
  }
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

TokenSeq tokenize(std::string_view raw) {
  TokenSeq seq;
  seq.raw = std::string(raw);
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_space(raw[i])) ++i;
    std::size_t start = i;
    while (i < raw.size() && !is_space(raw[i])) ++i;
    if (i > start) split_chunk(raw.substr(start, i - start), seq.tokens);
  }
  for (std::string& t : seq.tokens) {
    for (char& c : t) c = lower(c);
  }
  return seq;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace kgqa
