#include "kgqa/annotation.h"

#include <algorithm>
#include <limits>

#include "kgqa/error.h"
#include "kgqa/levenshtein.h"
#include "kgqa/text_io.h"

namespace kgqa {

std::string_view projection_kind_name(ProjectionKind k) {
  switch (k) {
    case ProjectionKind::Exact: return "exact";
    case ProjectionKind::Fuzzy: return "fuzzy";
    case ProjectionKind::Failed: return "failed";
  }
  return "failed";
}

ProjectionKind parse_projection_kind(std::string_view s) {
  if (s == "exact") return ProjectionKind::Exact;
  if (s == "fuzzy") return ProjectionKind::Fuzzy;
  if (s == "failed") return ProjectionKind::Failed;
  throw Error("unknown projection kind '" + std::string(s) + "'");
}

namespace {

void tag_window(LabeledQuestion& out, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) out.tags[i] = Tag::Entity;
}

}  // namespace

LabeledQuestion project_entity(const TokenSeq& question, std::span<const TokenSeq> aliases) {
  LabeledQuestion out;
  out.question = question;
  out.tags.assign(question.size(), Tag::NotEntity);
  const auto& q = question.tokens;
  if (aliases.empty() || q.empty()) return out;

  // Exact pass.
  std::size_t best_len = 0;
  std::size_t best_pos = 0;
  for (const TokenSeq& alias : aliases) {
    const std::size_t len = alias.size();
    if (len == 0 || len > q.size() || len < best_len) continue;
    for (std::size_t pos = 0; pos + len <= q.size(); ++pos) {
      if (len == best_len && pos >= best_pos) break;
      if (std::equal(alias.tokens.begin(), alias.tokens.end(), q.begin() + pos)) {
        best_len = len;
        best_pos = pos;
        break;
      }
    }
  }
  if (best_len > 0) {
    tag_window(out, best_pos, best_pos + best_len);
    out.kind = ProjectionKind::Exact;
    return out;
  }

  // Fuzzy pass.
  std::size_t max_alias = 0;
  std::vector<std::u32string> alias_text;
  for (const TokenSeq& alias : aliases) {
    max_alias = std::max(max_alias, alias.size());
    alias_text.push_back(decode_utf8(join_tokens(alias.tokens)));
  }
  const std::size_t max_window = std::min(q.size(), max_alias + 2);
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  std::size_t best_w = 0;
  // Window length outer and position inner, with strict improvement only,
  // gives the shorter-then-leftmost tie-break.
  for (std::size_t w = 1; w <= max_window; ++w) {
    for (std::size_t pos = 0; pos + w <= q.size(); ++pos) {
      std::u32string window = decode_utf8(join_tokens(q, pos, pos + w));
      for (const std::u32string& a : alias_text) {
        std::size_t d = indel_distance(window, a);
        if (d < best_dist) {
          best_dist = d;
          best_w = w;
          best_pos = pos;
        }
      }
    }
  }
  tag_window(out, best_pos, best_pos + best_w);
  out.kind = ProjectionKind::Fuzzy;
  return out;
}

LabeledQuestion project_entity(const TokenSeq& question, std::string_view subject_mid,
                               const KnowledgeGraph& kg) {
  auto e = kg.find(subject_mid);
  if (!e) return project_entity(question, std::span<const TokenSeq>{});
  return project_entity(question, kg.aliases(*e));
}

ProjectionCounts count_kinds(std::span<const LabeledQuestion> corpus) {
  ProjectionCounts c;
  for (const LabeledQuestion& q : corpus) {
    switch (q.kind) {
      case ProjectionKind::Exact: ++c.exact; break;
      case ProjectionKind::Fuzzy: ++c.fuzzy; break;
      case ProjectionKind::Failed: ++c.failed; break;
    }
  }
  return c;
}

std::string format_labeled_corpus(std::span<const LabeledQuestion> corpus) {
  std::string out;
  for (const LabeledQuestion& q : corpus) {
    out += join_tokens(q.question.tokens);
    out += '\t';
    out += format_tags(q.tags);
    out += '\t';
    out += projection_kind_name(q.kind);
    out += '\n';
  }
  return out;
}

std::vector<LabeledQuestion> parse_labeled_corpus(std::string_view text,
                                                  const std::string& source) {
  std::vector<LabeledQuestion> out;
  std::size_t lineno = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++lineno;
    std::string_view line = io::chomp(raw);
    if (line.empty()) continue;
    auto f = io::split(line, '\t');
    if (f.size() != 3) throw ParseError(source, lineno, "expected 3 fields");
    try {
      LabeledQuestion q;
      q.question = tokenize(f[0]);
      q.tags = parse_tags(f[1]);
      q.kind = parse_projection_kind(f[2]);
      if (q.tags.size() != q.question.size()) throw Error("tag count does not match tokens");
      out.push_back(std::move(q));
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return out;
}

void save_labeled_corpus(const std::filesystem::path& path,
                         std::span<const LabeledQuestion> corpus) {
  io::write_file_atomic(path, format_labeled_corpus(corpus));
}

std::vector<LabeledQuestion> load_labeled_corpus(const std::filesystem::path& path) {
  return parse_labeled_corpus(io::read_file(path), path.string());
}

}  // namespace kgqa
