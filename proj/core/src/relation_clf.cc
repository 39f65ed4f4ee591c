#include "kgqa/relation_clf.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/text_io.h"

namespace kgqa {

SparseVector to_sparse(std::span<const double> dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.index.push_back(static_cast<std::uint32_t>(i));
      v.value.push_back(dense[i]);
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Embeddings

void EmbeddingTable::add(std::string token, std::span<const float> vec) {
  if (vec.size() != kEmbeddingDim) {
    throw Error("embedding for '" + token + "' has " + std::to_string(vec.size()) +
                " dimensions, expected " + std::to_string(kEmbeddingDim));
  }
  auto [it, inserted] = index_.try_emplace(std::move(token), data_.size() / kEmbeddingDim);
  if (inserted) {
    data_.insert(data_.end(), vec.begin(), vec.end());
  } else {
    std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * kEmbeddingDim));
  }
}

const float* EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? nullptr : data_.data() + it->second * kEmbeddingDim;
}

namespace {

void parse_embedding_line(EmbeddingTable& table, std::string_view line,
                          const std::unordered_set<std::string>* keep, const std::string& source,
                          std::size_t lineno) {
  std::size_t sp = line.find(' ');
  if (sp == std::string_view::npos || sp == 0) {
    throw ParseError(source, lineno, "expected 'token v1 ... v300'");
  }
  std::string token(line.substr(0, sp));
  if (keep && !keep->count(token)) return;
  std::vector<float> vec;
  vec.reserve(kEmbeddingDim);
  std::string_view rest = line.substr(sp + 1);
  while (!rest.empty() && rest.back() == ' ') rest.remove_suffix(1);
  try {
    for (std::string_view f : io::split(rest, ' ')) {
      vec.push_back(static_cast<float>(io::parse_double(f)));
    }
    table.add(std::move(token), vec);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source, lineno, e.what());
  }
}

}  // namespace

EmbeddingTable EmbeddingTable::parse(std::string_view text,
                                     const std::unordered_set<std::string>* keep,
                                     const std::string& source) {
  EmbeddingTable table;
  std::size_t lineno = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++lineno;
    std::string_view line = io::chomp(raw);
    if (line.empty()) continue;
    parse_embedding_line(table, line, keep, source, lineno);
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path,
                                    const std::unordered_set<std::string>* keep) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = io::chomp(line);
    if (l.empty()) continue;
    parse_embedding_line(table, l, keep, path.string(), lineno);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Relation terms

std::vector<std::string> relation_name_terms(std::string_view relation) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : relation) {
    if (c == '/' || c == '_') {
      if (!cur.empty()) out.push_back(to_lower_ascii(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(to_lower_ascii(cur));
  return out;
}

RelationTerms make_relation_terms(std::vector<std::string> terms) {
  RelationTerms rt;
  rt.terms = std::move(terms);
  for (std::size_t i = 0; i < rt.terms.size(); ++i) {
    if (!rt.slot.emplace(rt.terms[i], i).second) throw Error("duplicate relation term " + rt.terms[i]);
  }
  return rt;
}

RelationTerms fit_relation_terms(std::span<const std::string> relations, std::size_t cap) {
  if (relations.empty()) throw Error("fit_relation_terms: no relations");
  std::map<std::string, std::size_t> counts;
  for (const std::string& r : relations) {
    std::vector<std::string> terms = relation_name_terms(r);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (std::string& t : terms) ++counts[std::move(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cap) ranked.resize(cap);
  std::vector<std::string> terms;
  terms.reserve(ranked.size());
  for (auto& [t, c] : ranked) terms.push_back(std::move(t));
  return make_relation_terms(std::move(terms));
}

// ---------------------------------------------------------------------------
// tf-idf

namespace {

template <typename Fn>
void for_each_gram(const std::vector<std::string>& tokens, Fn&& fn) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    fn(tokens[i]);
    if (i + 1 < tokens.size()) fn(tokens[i] + " " + tokens[i + 1]);
  }
}

}  // namespace

TfidfFeaturizer TfidfFeaturizer::fit(std::span<const TokenSeq> questions, std::size_t min_df) {
  std::map<std::string, std::size_t> df;
  for (const TokenSeq& q : questions) {
    std::unordered_set<std::string> seen;
    for_each_gram(q.tokens, [&](std::string g) { seen.insert(std::move(g)); });
    for (const std::string& g : seen) ++df[g];
  }
  std::vector<std::string> grams;
  std::vector<double> idf;
  const double n = static_cast<double>(questions.size());
  for (const auto& [g, d] : df) {
    if (d < min_df) continue;
    grams.push_back(g);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  return from_parts(std::move(grams), std::move(idf), questions.size());
}

TfidfFeaturizer TfidfFeaturizer::from_parts(std::vector<std::string> grams,
                                            std::vector<double> idf, std::size_t documents) {
  if (grams.size() != idf.size()) throw Error("tf-idf: gram/idf size mismatch");
  if (!std::is_sorted(grams.begin(), grams.end())) throw Error("tf-idf: grams not sorted");
  TfidfFeaturizer f;
  f.grams_ = std::move(grams);
  f.idf_ = std::move(idf);
  f.documents_ = documents;
  for (std::uint32_t i = 0; i < f.grams_.size(); ++i) {
    if (!f.index_.emplace(f.grams_[i], i).second) throw Error("tf-idf: duplicate gram");
  }
  return f;
}

std::int64_t TfidfFeaturizer::find(std::string_view gram) const {
  auto it = index_.find(std::string(gram));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector TfidfFeaturizer::featurize(const std::vector<std::string>& tokens) const {
  std::map<std::uint32_t, double> tf;
  for_each_gram(tokens, [&](const std::string& g) {
    auto it = index_.find(g);
    if (it != index_.end()) tf[it->second] += 1.0;
  });
  SparseVector v;
  double norm = 0.0;
  for (auto& [j, count] : tf) {
    const double x = count * idf_[j];
    v.index.push_back(j);
    v.value.push_back(x);
    norm += x * x;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v.value) x /= norm;
  }
  return v;
}

std::vector<double> featurize_embed(const std::vector<std::string>& tokens,
                                    const EmbeddingTable& emb, const RelationTerms& terms) {
  std::vector<double> out(kEmbeddingDim + terms.size(), 0.0);
  std::size_t hits = 0;
  for (const std::string& t : tokens) {
    if (const float* v = emb.find(t)) {
      for (std::size_t d = 0; d < kEmbeddingDim; ++d) out[d] += static_cast<double>(v[d]);
      ++hits;
    }
    auto it = terms.slot.find(t);
    if (it != terms.slot.end()) out[kEmbeddingDim + it->second] = 1.0;
  }
  if (hits > 1) {
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) out[d] /= static_cast<double>(hits);
  }
  return out;
}

std::string_view featurizer_name(FeaturizerKind k) {
  return k == FeaturizerKind::Tfidf ? "tfidf" : "embed";
}

FeaturizerKind parse_featurizer(std::string_view s) {
  if (s == "tfidf") return FeaturizerKind::Tfidf;
  if (s == "embed") return FeaturizerKind::Embed;
  throw Error("unknown featurizer '" + std::string(s) + "' (expected tfidf or embed)");
}

// ---------------------------------------------------------------------------
// Scoring

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

std::vector<ClassScore> topk_from_scores(std::span<const double> scores, std::size_t k) {
  std::vector<double> p = softmax(scores);
  std::vector<ClassScore> out(p.size());
  for (std::uint32_t c = 0; c < p.size(); ++c) out[c] = ClassScore{c, p[c]};
  auto better = [](const ClassScore& a, const ClassScore& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.klass < b.klass;
  };
  if (k < out.size()) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), better);
    out.resize(k);
  } else {
    std::sort(out.begin(), out.end(), better);
  }
  return out;
}

void LrModel::allocate() {
  class_index_.clear();
  for (std::uint32_t c = 0; c < classes_.size(); ++c) {
    if (!class_index_.emplace(classes_[c], c).second) throw Error("duplicate class " + classes_[c]);
  }
  weights_.assign(dim_ * classes_.size(), 0.0);
  bias_.assign(classes_.size(), 0.0);
}

LrModel LrModel::make_tfidf(std::vector<std::string> classes, TfidfFeaturizer tfidf) {
  LrModel m;
  m.kind_ = FeaturizerKind::Tfidf;
  m.classes_ = std::move(classes);
  m.tfidf_ = std::move(tfidf);
  m.dim_ = m.tfidf_.dimension();
  m.allocate();
  return m;
}

LrModel LrModel::make_embed(std::vector<std::string> classes, RelationTerms terms,
                            std::shared_ptr<const EmbeddingTable> embeddings,
                            std::string embeddings_path) {
  if (!embeddings) throw Error("embed featurizer requires an embedding table");
  LrModel m;
  m.kind_ = FeaturizerKind::Embed;
  m.classes_ = std::move(classes);
  m.terms_ = std::move(terms);
  m.embeddings_ = std::move(embeddings);
  m.embeddings_path_ = std::move(embeddings_path);
  m.dim_ = kEmbeddingDim + m.terms_.size();
  m.allocate();
  return m;
}

std::int64_t LrModel::find_class(std::string_view relation) const {
  auto it = class_index_.find(std::string(relation));
  return it == class_index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector LrModel::featurize(const std::vector<std::string>& tokens) const {
  if (kind_ == FeaturizerKind::Tfidf) return tfidf_.featurize(tokens);
  return to_sparse(featurize_embed(tokens, *embeddings_, terms_));
}

std::vector<double> LrModel::scores(const SparseVector& x) const {
  const std::size_t c = classes_.size();
  std::vector<double> s(bias_.begin(), bias_.end());
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const double* row = weights_.data() + std::size_t{x.index[k]} * c;
    const double v = x.value[k];
    for (std::size_t j = 0; j < c; ++j) s[j] += v * row[j];
  }
  return s;
}

std::vector<double> LrModel::probabilities(const SparseVector& x) const {
  return softmax(scores(x));
}

std::vector<RelationScore> predict_topk(const LrModel& model, const std::vector<std::string>& tokens,
                                        std::size_t k) {
  std::vector<RelationScore> out;
  for (const ClassScore& cs : topk_from_scores(model.scores(model.featurize(tokens)), k)) {
    out.push_back(RelationScore{model.classes()[cs.klass], cs.probability});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

std::vector<std::string> collect_classes(std::span<const LrExample> examples) {
  std::vector<std::string> classes;
  for (const LrExample& ex : examples) classes.push_back(ex.relation);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) {
    throw Error("relation classifier needs at least two classes, got " +
                std::to_string(classes.size()));
  }
  return classes;
}

double lr_objective(const LrModel& model, std::span<const SparseVector> xs,
                    std::span<const std::uint32_t> ys, double l2,
                    std::vector<double>* grad_weights, std::vector<double>* grad_bias) {
  const std::size_t c = model.class_count();
  if (grad_weights) grad_weights->assign(model.weights().size(), 0.0);
  if (grad_bias) grad_bias->assign(c, 0.0);
  double nll = 0.0;
  const double inv = xs.empty() ? 0.0 : 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> p = model.probabilities(xs[i]);
    nll -= std::log(std::max(p[ys[i]], 1e-300));
    p[ys[i]] -= 1.0;
    if (grad_bias) {
      for (std::size_t j = 0; j < c; ++j) (*grad_bias)[j] += inv * p[j];
    }
    if (grad_weights) {
      for (std::size_t k = 0; k < xs[i].nnz(); ++k) {
        double* row = grad_weights->data() + std::size_t{xs[i].index[k]} * c;
        for (std::size_t j = 0; j < c; ++j) row[j] += inv * xs[i].value[k] * p[j];
      }
    }
  }
  double sq = 0.0;
  auto w = model.weights();
  for (double v : w) sq += v * v;
  if (grad_weights) {
    for (std::size_t k = 0; k < w.size(); ++k) (*grad_weights)[k] += l2 * w[k];
  }
  return nll * inv + 0.5 * l2 * sq;
}

LrModel train_lr(LrModel model, std::span<const LrExample> examples, const LrTrainConfig& config,
                 std::vector<double>* objective_history) {
  if (model.class_count() < 2) throw Error("train_lr: need at least two classes");
  if (config.batch_size == 0) throw Error("train_lr: batch_size must be positive");
  std::vector<SparseVector> xs;
  std::vector<std::uint32_t> ys;
  for (const LrExample& ex : examples) {
    std::int64_t y = model.find_class(ex.relation);
    if (y < 0) continue;
    xs.push_back(model.featurize(ex.question.tokens));
    ys.push_back(static_cast<std::uint32_t>(y));
  }
  if (xs.empty()) throw Error("train_lr: no examples with a known relation");

  const std::size_t c = model.class_count();
  // W = scale * raw; see train_crf for the same lazy L2 scheme.
  std::vector<double> raw(model.weights().begin(), model.weights().end());
  double scale = 1.0;
  std::vector<double> bias(model.bias().begin(), model.bias().end());
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::vector<double> s(c);

  auto materialize = [&] {
    auto w = model.weights();
    for (std::size_t k = 0; k < raw.size(); ++k) w[k] = scale * raw[k];
    std::copy(bias.begin(), bias.end(), model.bias().begin());
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double step = config.step / (1.0 + config.decay * epoch);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double inv = 1.0 / static_cast<double>(e - b);
      // Residuals for the whole batch are computed at the current weights
      // before any update.
      std::vector<std::vector<double>> residual;
      residual.reserve(e - b);
      for (std::size_t k = b; k < e; ++k) {
        const SparseVector& x = xs[order[k]];
        std::copy(bias.begin(), bias.end(), s.begin());
        for (std::size_t n = 0; n < x.nnz(); ++n) {
          const double* row = raw.data() + std::size_t{x.index[n]} * c;
          const double v = scale * x.value[n];
          for (std::size_t j = 0; j < c; ++j) s[j] += v * row[j];
        }
        std::vector<double> p = softmax(s);
        p[ys[order[k]]] -= 1.0;
        residual.push_back(std::move(p));
      }
      const double factor = step * inv / scale;
      for (std::size_t k = b; k < e; ++k) {
        const SparseVector& x = xs[order[k]];
        const std::vector<double>& r = residual[k - b];
        for (std::size_t n = 0; n < x.nnz(); ++n) {
          double* row = raw.data() + std::size_t{x.index[n]} * c;
          const double v = factor * x.value[n];
          for (std::size_t j = 0; j < c; ++j) row[j] -= v * r[j];
        }
        for (std::size_t j = 0; j < c; ++j) bias[j] -= step * inv * r[j];
      }
      scale /= (1.0 + step * config.l2);
      if (scale < 1e-9) {
        for (double& v : raw) v *= scale;
        scale = 1.0;
      }
    }
    if (objective_history) {
      materialize();
      objective_history->push_back(lr_objective(model, xs, ys, config.l2));
    }
  }
  materialize();
  return model;
}

// ---------------------------------------------------------------------------
// Persistence

std::string LrModel::serialize() const {
  std::ostringstream out;
  out << "kgqa-lr v1\n";
  out << "featurizer\t" << featurizer_name(kind_) << '\n';
  out << "classes\t" << classes_.size() << '\n';
  for (const std::string& c : classes_) out << c << '\n';
  if (kind_ == FeaturizerKind::Tfidf) {
    out << "documents\t" << tfidf_.documents() << '\n';
    out << "grams\t" << tfidf_.dimension() << '\n';
    for (std::size_t j = 0; j < tfidf_.dimension(); ++j) {
      out << tfidf_.grams()[j] << '\t' << io::format_double(tfidf_.idf()[j]) << '\n';
    }
  } else {
    out << "embeddings\t" << embeddings_path_ << '\n';
    out << "terms\t" << terms_.size() << '\n';
    for (const std::string& t : terms_.terms) out << t << '\n';
  }
  out << "dim\t" << dim_ << '\n';
  out << "weights\n";
  const std::size_t c = classes_.size();
  for (std::size_t k = 0; k < c; ++k) {
    out << k << '\t' << io::format_double(bias_[k]) << '\t';
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j) out << ' ';
      out << io::format_double(weights_[j * c + k]);
    }
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

LrModel LrModel::deserialize(std::string_view text, const EmbeddingLoader& load_embeddings,
                             const std::string& source) {
  std::vector<std::string_view> lines = io::split(text, '\n');
  std::size_t ln = 0;
  auto next = [&]() -> std::string_view {
    if (ln >= lines.size()) throw ParseError(source, ln, "unexpected end of file");
    return io::chomp(lines[ln++]);
  };
  auto fail = [&](const std::string& what) { return ParseError(source, ln, what); };
  auto keyed = [&](std::string_view key) -> std::string_view {
    auto f = io::split(next(), '\t');
    if (f.size() != 2 || f[0] != key) throw fail("expected '" + std::string(key) + "' line");
    return f[1];
  };

  try {
    if (next() != "kgqa-lr v1") throw fail("bad header");
    FeaturizerKind kind = parse_featurizer(keyed("featurizer"));
    auto nclasses = static_cast<std::size_t>(io::parse_int(keyed("classes")));
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < nclasses; ++i) classes.emplace_back(next());

    LrModel m;
    if (kind == FeaturizerKind::Tfidf) {
      auto docs = static_cast<std::size_t>(io::parse_int(keyed("documents")));
      auto ngrams = static_cast<std::size_t>(io::parse_int(keyed("grams")));
      std::vector<std::string> grams;
      std::vector<double> idf;
      for (std::size_t j = 0; j < ngrams; ++j) {
        auto f = io::split(next(), '\t');
        if (f.size() != 2) throw fail("bad gram line");
        grams.emplace_back(f[0]);
        idf.push_back(io::parse_double(f[1]));
      }
      m = make_tfidf(std::move(classes), TfidfFeaturizer::from_parts(std::move(grams), std::move(idf), docs));
    } else {
      std::string path(keyed("embeddings"));
      auto nterms = static_cast<std::size_t>(io::parse_int(keyed("terms")));
      std::vector<std::string> terms;
      for (std::size_t j = 0; j < nterms; ++j) terms.emplace_back(next());
      if (!load_embeddings) throw fail("embed model needs an embedding loader");
      m = make_embed(std::move(classes), make_relation_terms(std::move(terms)), load_embeddings(path),
                     path);
    }
    if (static_cast<std::size_t>(io::parse_int(keyed("dim"))) != m.dim_) {
      throw fail("dimension does not match featurizer");
    }
    if (next() != "weights") throw fail("expected weights section");
    const std::size_t c = m.classes_.size();
    for (std::size_t k = 0; k < c; ++k) {
      auto f = io::split(next(), '\t');
      if (f.size() != 3 || static_cast<std::size_t>(io::parse_int(f[0])) != k) {
        throw fail("bad weight row");
      }
      m.bias_[k] = io::parse_double(f[1]);
      if (m.dim_ == 0) {
        if (!f[2].empty()) throw fail("unexpected weights for zero-dimensional model");
        continue;
      }
      auto vals = io::split(f[2], ' ');
      if (vals.size() != m.dim_) throw fail("weight row has wrong length");
      for (std::size_t j = 0; j < m.dim_; ++j) m.weights_[j * c + k] = io::parse_double(vals[j]);
    }
    if (next() != "end") throw fail("expected end");
    return m;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

void LrModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, serialize());
}

LrModel LrModel::load(const std::filesystem::path& path, const EmbeddingLoader& load_embeddings) {
  return deserialize(io::read_file(path), load_embeddings, path.string());
}

}  // namespace kgqa
