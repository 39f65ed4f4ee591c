#pragma once

// Indel-weighted edit distance (insert = delete = 1, substitute = 2) over
// Unicode code points, and the similarity ratio derived from it:
//
//   ratio(a, b) = (|a| + |b| - D(a, b)) / (|a| + |b|),  ratio("", "") = 1.
//
// With substitution cost 2, D(a, b) = |a| + |b| - 2 * LCS(a, b), which is
// how it is computed here.

#include <cstddef>
#include <string>
#include <string_view>

namespace kgqa {

// UTF-8 decode; invalid bytes become U+FFFD, one per byte.
std::u32string decode_utf8(std::string_view s);

std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

std::size_t indel_distance(std::u32string_view a, std::u32string_view b);
std::size_t indel_distance(std::string_view a, std::string_view b);

double levenshtein_ratio(std::u32string_view a, std::u32string_view b);
double levenshtein_ratio(std::string_view a, std::string_view b);

}  // namespace kgqa
