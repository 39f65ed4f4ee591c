#include "kgqa/dataset.h"

#include <algorithm>

#include "kgqa/error.h"
#include "kgqa/kg_store.h"
#include "kgqa/text_io.h"

namespace kgqa {

std::vector<QaExample> parse_split(std::string_view text, const std::string& source) {
  std::vector<QaExample> out;
  std::size_t lineno = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++lineno;
    std::string_view line = io::chomp(raw);
    if (line.empty()) continue;
    auto f = io::split(line, '\t');
    if (f.size() != 4) {
      throw ParseError(source, lineno,
                       "expected 'subject<TAB>relation<TAB>object<TAB>question', got " +
                           std::to_string(f.size()) + " fields");
    }
    QaExample ex{normalize_mid(f[0]), normalize_relation(f[1]), normalize_mid(f[2]),
                 tokenize(f[3])};
    if (ex.subject.empty() || ex.relation.empty()) {
      throw ParseError(source, lineno, "empty subject or relation");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<QaExample> load_split(const std::filesystem::path& path) {
  return parse_split(io::read_file(path), path.string());
}

ExternalScores parse_external_scores(std::string_view text, std::size_t question_count,
                                     const std::string& source) {
  ExternalScores scores;
  std::size_t lineno = 0;
  long long last_qid = -1;
  for (std::string_view raw : io::split(text, '\n')) {
    ++lineno;
    std::string_view line = io::chomp(raw);
    if (line.empty()) continue;
    auto f = io::split(line, '\t');
    if (f.size() != 3 || f[1].empty()) throw ParseError(source, lineno, "expected 'qid<TAB>item<TAB>score'");
    long long qid = 0;
    double score = 0.0;
    try {
      qid = io::parse_int(f[0]);
      score = io::parse_double(f[2]);
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (qid < 0) throw ParseError(source, lineno, "negative qid");
    if (qid < last_qid) throw ParseError(source, lineno, "qids are not sorted ascending");
    last_qid = qid;
    if (static_cast<std::size_t>(qid) >= question_count) {
      ++scores.skipped_unknown_qids;
      continue;
    }
    scores.by_qid[static_cast<std::size_t>(qid)].emplace_back(std::string(f[1]), score);
  }
  for (auto& [qid, list] : scores.by_qid) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
  }
  return scores;
}

ExternalScores load_external_scores(const std::filesystem::path& path,
                                    std::size_t question_count) {
  return parse_external_scores(io::read_file(path), question_count, path.string());
}

}  // namespace kgqa
