#include "kgqa/kg_store.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string_view strip_prefix(std::string_view s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) == prefix) s.remove_prefix(prefix.size());
  return s;
}

std::string_view strip_url(std::string_view s) {
  s = trim(s);
  s = strip_prefix(s, "<");
  if (!s.empty() && s.back() == '>') s.remove_suffix(1);
  s = strip_prefix(s, "http://");
  s = strip_prefix(s, "https://");
  s = strip_prefix(s, "www.freebase.com");
  s = strip_prefix(s, "rdf.freebase.com/ns");
  s = strip_prefix(s, "fb:");
  while (!s.empty() && s.front() == '/') s.remove_prefix(1);
  return s;
}

}  // namespace

std::string normalize_mid(std::string_view raw) {
  std::string out(strip_url(raw));
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

std::string normalize_relation(std::string_view raw) {
  std::string_view s = strip_url(raw);
  while (!s.empty() && s.back() == '/') s.remove_suffix(1);
  return std::string(s);
}

// ---------------------------------------------------------------------------
// Builder

std::uint32_t KnowledgeGraph::Builder::intern_mid(std::string_view raw) {
  std::string mid = normalize_mid(raw);
  if (mid.empty()) throw Error("empty MID");
  auto [it, inserted] = mid_index_.try_emplace(mid, static_cast<std::uint32_t>(mids_.size()));
  if (inserted) mids_.push_back(std::move(mid));
  return it->second;
}

std::uint32_t KnowledgeGraph::Builder::intern_relation(std::string_view raw) {
  std::string rel = normalize_relation(raw);
  if (rel.empty()) throw Error("empty relation");
  auto [it, inserted] =
      relation_index_.try_emplace(rel, static_cast<std::uint32_t>(relations_.size()));
  if (inserted) relations_.push_back(std::move(rel));
  return it->second;
}

KnowledgeGraph::Builder& KnowledgeGraph::Builder::add_triple(std::string_view subject,
                                                             std::string_view relation,
                                                             std::string_view object) {
  Triple t{intern_mid(subject), intern_relation(relation), intern_mid(object)};
  triples_.push_back(t);
  return *this;
}

KnowledgeGraph::Builder& KnowledgeGraph::Builder::add_alias(std::string_view mid,
                                                            std::string_view name) {
  aliases_.emplace_back(normalize_mid(mid), std::string(name));
  return *this;
}

KnowledgeGraph::Builder& KnowledgeGraph::Builder::add_wiki(std::string_view mid) {
  wiki_.push_back(normalize_mid(mid));
  return *this;
}

namespace {

// Returns remap[provisional] = sorted id, and sorts `names` in place.
std::vector<std::uint32_t> sort_and_remap(std::vector<std::string>& names) {
  std::vector<std::uint32_t> order(names.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return names[a] < names[b]; });
  std::vector<std::uint32_t> remap(names.size());
  std::vector<std::string> sorted(names.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = i;
    sorted[i] = std::move(names[order[i]]);
  }
  names = std::move(sorted);
  return remap;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::Builder::build() && {
  KnowledgeGraph kg;
  kg.stats_.triple_lines = triples_.size();

  std::vector<std::uint32_t> mid_remap = sort_and_remap(mids_);
  std::vector<std::uint32_t> rel_remap = sort_and_remap(relations_);
  for (Triple& t : triples_) {
    t.subject = mid_remap[t.subject];
    t.relation = rel_remap[t.relation];
    t.object = mid_remap[t.object];
  }
  std::sort(triples_.begin(), triples_.end());
  auto last = std::unique(triples_.begin(), triples_.end());
  kg.stats_.duplicate_triples = static_cast<std::size_t>(triples_.end() - last);
  triples_.erase(last, triples_.end());

  const std::size_t n = mids_.size();
  kg.mids_ = std::move(mids_);
  kg.relations_ = std::move(relations_);
  kg.triples_ = std::move(triples_);
  for (EntityId e = 0; e < n; ++e) kg.mid_index_.emplace(kg.mids_[e], e);
  for (RelationId r = 0; r < kg.relations_.size(); ++r) {
    kg.relation_index_.emplace(kg.relations_[r], r);
  }

  kg.in_degree_.assign(n, 0);
  kg.subject_offsets_.assign(n + 1, 0);
  // Triples are sorted by (subject, relation, object), so distinct
  // (subject, relation) pairs come out grouped and in order.
  for (std::size_t i = 0; i < kg.triples_.size(); ++i) {
    const Triple& t = kg.triples_[i];
    ++kg.in_degree_[t.object];
    if (i == 0 || kg.triples_[i - 1].subject != t.subject ||
        kg.triples_[i - 1].relation != t.relation) {
      kg.subject_relations_.push_back(t.relation);
      ++kg.subject_offsets_[t.subject + 1];
    }
  }
  std::partial_sum(kg.subject_offsets_.begin(), kg.subject_offsets_.end(),
                   kg.subject_offsets_.begin());

  kg.aliases_.assign(n, {});
  kg.labels_.assign(n, {});
  for (auto& [mid, name] : aliases_) {
    auto it = kg.mid_index_.find(mid);
    if (it == kg.mid_index_.end()) {
      ++kg.stats_.unknown_name_mids;
      continue;
    }
    TokenSeq seq = tokenize(name);
    if (seq.empty()) {
      ++kg.stats_.empty_aliases;
      continue;
    }
    auto& list = kg.aliases_[it->second];
    bool duplicate = std::any_of(list.begin(), list.end(), [&](const TokenSeq& a) {
      return a.tokens == seq.tokens;
    });
    if (!duplicate) list.push_back(std::move(seq));
  }
  for (EntityId e = 0; e < n; ++e) {
    if (!kg.aliases_[e].empty()) kg.labels_[e] = join_tokens(kg.aliases_[e][0].tokens);
  }

  kg.has_wiki_.assign(n, 0);
  for (const std::string& mid : wiki_) {
    auto it = kg.mid_index_.find(mid);
    if (it == kg.mid_index_.end()) {
      ++kg.stats_.unknown_wiki_mids;
      continue;
    }
    kg.has_wiki_[it->second] = 1;
  }
  return kg;
}

// ---------------------------------------------------------------------------
// Loading

KnowledgeGraph KnowledgeGraph::load(std::istream& triples, std::istream* names,
                                    std::istream* wiki, const std::string& triples_name,
                                    const std::string& names_name,
                                    const std::string& wiki_name) {
  Builder builder;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(triples, line)) {
    ++lineno;
    std::string_view l = io::chomp(line);
    if (trim(l).empty()) continue;
    auto fields = io::split(l, '\t');
    if (fields.size() != 3) {
      throw ParseError(triples_name, lineno,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    try {
      builder.add_triple(fields[0], fields[1], fields[2]);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(triples_name, lineno, e.what());
    }
  }
  if (names) {
    lineno = 0;
    while (std::getline(*names, line)) {
      ++lineno;
      std::string_view l = io::chomp(line);
      if (trim(l).empty()) continue;
      auto fields = io::split(l, '\t');
      if (fields.size() != 2 || normalize_mid(fields[0]).empty()) {
        throw ParseError(names_name, lineno, "expected 'mid<TAB>name'");
      }
      builder.add_alias(fields[0], fields[1]);
    }
  }
  if (wiki) {
    lineno = 0;
    while (std::getline(*wiki, line)) {
      ++lineno;
      std::string_view l = trim(io::chomp(line));
      if (l.empty()) continue;
      if (l.find('\t') != std::string_view::npos || l.find(' ') != std::string_view::npos) {
        throw ParseError(wiki_name, lineno, "expected a single MID per line");
      }
      builder.add_wiki(l);
    }
  }
  return std::move(builder).build();
}

KnowledgeGraph KnowledgeGraph::load_files(const std::filesystem::path& triples,
                                          const std::filesystem::path& names,
                                          const std::filesystem::path& wiki) {
  std::ifstream t(triples);
  if (!t) throw Error("cannot open triple file " + triples.string());
  std::ifstream n;
  std::ifstream w;
  if (!names.empty()) {
    n.open(names);
    if (!n) throw Error("cannot open names file " + names.string());
  }
  if (!wiki.empty()) {
    w.open(wiki);
    if (!w) throw Error("cannot open wiki file " + wiki.string());
  }
  return load(t, names.empty() ? nullptr : &n, wiki.empty() ? nullptr : &w, triples.string(),
              names.string(), wiki.string());
}

void KnowledgeGraph::save(const std::filesystem::path& triples,
                          const std::filesystem::path& names,
                          const std::filesystem::path& wiki) const {
  std::ostringstream t;
  for (const Triple& tr : triples_) {
    t << mids_[tr.subject] << '\t' << relations_[tr.relation] << '\t' << mids_[tr.object]
      << '\n';
  }
  io::write_file_atomic(triples, t.str());

  std::ostringstream nm;
  for (EntityId e = 0; e < mids_.size(); ++e) {
    for (const TokenSeq& a : aliases_[e]) nm << mids_[e] << '\t' << a.raw << '\n';
  }
  io::write_file_atomic(names, nm.str());

  std::ostringstream w;
  for (EntityId e = 0; e < mids_.size(); ++e) {
    if (has_wiki_[e]) w << mids_[e] << '\n';
  }
  io::write_file_atomic(wiki, w.str());
}

// ---------------------------------------------------------------------------
// Queries

std::optional<EntityId> KnowledgeGraph::find(std::string_view mid) const {
  auto it = mid_index_.find(std::string(mid));
  if (it == mid_index_.end()) {
    it = mid_index_.find(normalize_mid(mid));
    if (it == mid_index_.end()) return std::nullopt;
  }
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view relation) const {
  auto it = relation_index_.find(std::string(relation));
  if (it == relation_index_.end()) {
    it = relation_index_.find(normalize_relation(relation));
    if (it == relation_index_.end()) return std::nullopt;
  }
  return it->second;
}

std::uint32_t KnowledgeGraph::in_degree(std::string_view mid) const {
  auto e = find(mid);
  return e ? in_degree_[*e] : 0;
}

bool KnowledgeGraph::has_wiki(std::string_view mid) const {
  auto e = find(mid);
  return e && has_wiki_[*e] != 0;
}

std::span<const RelationId> KnowledgeGraph::subject_relations(EntityId e) const {
  return std::span<const RelationId>(subject_relations_.data() + subject_offsets_[e],
                                     subject_offsets_[e + 1] - subject_offsets_[e]);
}

bool KnowledgeGraph::valid_pair(EntityId e, RelationId r) const {
  if (e >= mids_.size()) return false;
  auto rels = subject_relations(e);
  return std::binary_search(rels.begin(), rels.end(), r);
}

bool KnowledgeGraph::valid_pair(std::string_view mid, std::string_view relation) const {
  auto e = find(mid);
  auto r = find_relation(relation);
  return e && r && valid_pair(*e, *r);
}

}  // namespace kgqa
