#pragma once

// Question splits: "subject_mid<TAB>relation<TAB>object_mid<TAB>question"
// lines. MIDs and relations are normalized on load.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgqa/text_prep.h"

namespace kgqa {

struct QaExample {
  std::string subject;
  std::string relation;
  std::string object;
  TokenSeq question;
};

std::vector<QaExample> parse_split(std::string_view text, const std::string& source = "split");
std::vector<QaExample> load_split(const std::filesystem::path& path);

// Externally produced candidate scores: "qid<TAB>item<TAB>score" lines,
// grouped by ascending qid (the 0-based line index in the evaluated split).
struct ExternalScores {
  // Per qid, ranked by score desc (file order on ties).
  std::map<std::size_t, std::vector<std::pair<std::string, double>>> by_qid;
  std::size_t skipped_unknown_qids = 0;
};

// Lines whose qid is >= question_count are skipped and counted. Throws
// ParseError on malformed lines or descending qids.
ExternalScores parse_external_scores(std::string_view text, std::size_t question_count,
                                     const std::string& source = "scores");
ExternalScores load_external_scores(const std::filesystem::path& path,
                                    std::size_t question_count);

}  // namespace kgqa
