#include "kgqa/ngram_index.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {

std::vector<Gram> extract_ngrams(const std::vector<std::string>& tokens, int n) {
  if (n < kMinOrder || n > kMaxOrder) {
    throw Error("n-gram order must be in [1, 3], got " + std::to_string(n));
  }
  std::vector<Gram> out;
  const auto size = static_cast<std::size_t>(n);
  if (tokens.size() < size) return out;
  out.reserve(tokens.size() - size + 1);
  for (std::size_t i = 0; i + size <= tokens.size(); ++i) {
    out.push_back(Gram{n, join_tokens(tokens, i, i + size)});
  }
  return out;
}

InvertedIndex InvertedIndex::build(const KnowledgeGraph& kg) {
  InvertedIndex index;
  for (EntityId e = 0; e < kg.entity_count(); ++e) {
    auto aliases = kg.aliases(e);
    for (std::uint32_t a = 0; a < aliases.size(); ++a) {
      ++index.entry_count_;
      for (int n = kMinOrder; n <= kMaxOrder; ++n) {
        for (Gram& g : extract_ngrams(aliases[a].tokens, n)) {
          auto& list = index.postings_[std::move(g.text)];
          Posting p{e, a};
          // Entities are visited in id order, so a repeat of the same gram
          // inside one alias can only collide with the last entry.
          if (list.empty() || list.back() != p) list.push_back(p);
        }
      }
    }
  }
  return index;
}

void InvertedIndex::finalize() {
  std::set<Posting> entries;
  for (auto& [gram, list] : postings_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (gram.find(' ') == std::string::npos) entries.insert(list.begin(), list.end());
  }
  entry_count_ = entries.size();
}

std::span<const Posting> InvertedIndex::lookup(const Gram& gram) const {
  return lookup(std::string_view(gram.text));
}

std::span<const Posting> InvertedIndex::lookup(std::string_view joined_gram) const {
  auto it = postings_.find(std::string(joined_gram));
  if (it == postings_.end()) return {};
  return it->second;
}

double InvertedIndex::idf(std::string_view joined_gram) const {
  std::size_t df = doc_freq(joined_gram);
  if (df == 0) return 0.0;
  return std::log(1.0 + static_cast<double>(entry_count_) / static_cast<double>(df));
}

namespace {

int gram_order(std::string_view gram) {
  return 1 + static_cast<int>(std::count(gram.begin(), gram.end(), ' '));
}

}  // namespace

std::string InvertedIndex::serialize(const KnowledgeGraph& kg) const {
  std::vector<std::pair<int, const std::string*>> keys;
  keys.reserve(postings_.size());
  for (const auto& [gram, list] : postings_) keys.emplace_back(gram_order(gram), &gram);
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return *a.second < *b.second;
  });
  std::string out = "kgqa-index v1\n";
  for (const auto& [order, gram] : keys) {
    for (const Posting& p : postings_.at(*gram)) {
      out += std::to_string(order);
      out += '\t';
      out += *gram;
      out += '\t';
      out += kg.mid(p.entity);
      out += '\t';
      out += std::to_string(p.alias);
      out += '\n';
    }
  }
  return out;
}

InvertedIndex InvertedIndex::deserialize(std::string_view text, const KnowledgeGraph& kg,
                                         const std::string& source) {
  InvertedIndex index;
  std::size_t lineno = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = io::chomp(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (!header) {
      if (line != "kgqa-index v1") throw ParseError(source, lineno, "bad header");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    auto f = io::split(line, '\t');
    if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields");
    try {
      int n = static_cast<int>(io::parse_int(f[0]));
      if (n < kMinOrder || n > kMaxOrder || gram_order(f[1]) != n) {
        throw Error("gram order mismatch");
      }
      auto e = kg.find(f[2]);
      if (!e) throw Error("unknown MID " + std::string(f[2]));
      auto alias = io::parse_int(f[3]);
      if (alias < 0 || static_cast<std::size_t>(alias) >= kg.aliases(*e).size()) {
        throw Error("alias index out of range");
      }
      index.postings_[std::string(f[1])].push_back(
          Posting{*e, static_cast<std::uint32_t>(alias)});
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      throw ParseError(source, lineno, err.what());
    }
  }
  if (!header) throw ParseError(source, 1, "missing header");
  index.finalize();
  return index;
}

void InvertedIndex::save(const std::filesystem::path& path, const KnowledgeGraph& kg) const {
  io::write_file_atomic(path, serialize(kg));
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path, const KnowledgeGraph& kg) {
  return deserialize(io::read_file(path), kg, path.string());
}

}  // namespace kgqa
