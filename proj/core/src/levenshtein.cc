#include "kgqa/levenshtein.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace kgqa {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

namespace {

// Hyyrö's bit-parallel LCS; `pattern` must be at most 64 symbols.
std::size_t lcs_bit_parallel(std::u32string_view pattern, std::u32string_view text) {
  std::unordered_map<char32_t, std::uint64_t> match;
  for (std::size_t i = 0; i < pattern.size(); ++i) match[pattern[i]] |= std::uint64_t{1} << i;
  const std::uint64_t mask =
      pattern.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << pattern.size()) - 1);
  std::uint64_t v = mask;
  for (char32_t c : text) {
    auto it = match.find(c);
    std::uint64_t m = it == match.end() ? 0 : it->second;
    std::uint64_t u = v & m;
    v = ((v + u) | (v - u)) & mask;
  }
  return pattern.size() - static_cast<std::size_t>(std::popcount(v));
}

std::size_t lcs_rows(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (char32_t ca : a) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = ca == b[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  if (a.size() <= 64) return lcs_bit_parallel(a, b);
  return lcs_rows(a, b);
}

std::size_t indel_distance(std::u32string_view a, std::u32string_view b) {
  return a.size() + b.size() - 2 * lcs_length(a, b);
}

std::size_t indel_distance(std::string_view a, std::string_view b) {
  return indel_distance(decode_utf8(a), decode_utf8(b));
}

double levenshtein_ratio(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  return static_cast<double>(total - indel_distance(a, b)) / static_cast<double>(total);
}

double levenshtein_ratio(std::string_view a, std::string_view b) {
  return levenshtein_ratio(decode_utf8(a), decode_utf8(b));
}

}  // namespace kgqa
