#pragma once

// Distant supervision: projects the gold subject's name onto the question to
// derive Entity / NotEntity training tags.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/crf_tagger.h"
#include "kgqa/kg_store.h"
#include "kgqa/text_prep.h"

namespace kgqa {

enum class ProjectionKind { Exact, Fuzzy, Failed };

std::string_view projection_kind_name(ProjectionKind k);
ProjectionKind parse_projection_kind(std::string_view s);

struct LabeledQuestion {
  TokenSeq question;
  TagSeq tags;
  ProjectionKind kind = ProjectionKind::Failed;
};

// Exact pass: the longest alias that occurs verbatim as a token window is
// tagged (leftmost occurrence on ties). Fuzzy pass: among windows of
// 1..min(|q|, longest alias + 2) tokens, the one whose joined text has the
// smallest indel distance to some alias (ties: shorter window, then
// leftmost, then lower alias index). Without aliases the result is Failed
// and all NotEntity.
LabeledQuestion project_entity(const TokenSeq& question, std::span<const TokenSeq> aliases);
LabeledQuestion project_entity(const TokenSeq& question, std::string_view subject_mid,
                               const KnowledgeGraph& kg);

struct ProjectionCounts {
  std::size_t exact = 0;
  std::size_t fuzzy = 0;
  std::size_t failed = 0;
};

ProjectionCounts count_kinds(std::span<const LabeledQuestion> corpus);

// "question-tokens<TAB>tags<TAB>kind" lines, tags as space-separated I/O.
std::string format_labeled_corpus(std::span<const LabeledQuestion> corpus);
std::vector<LabeledQuestion> parse_labeled_corpus(std::string_view text,
                                                  const std::string& source = "labeled corpus");
void save_labeled_corpus(const std::filesystem::path& path,
                         std::span<const LabeledQuestion> corpus);
std::vector<LabeledQuestion> load_labeled_corpus(const std::filesystem::path& path);

}  // namespace kgqa
